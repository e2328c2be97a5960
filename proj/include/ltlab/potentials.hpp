#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ltlab/core.hpp"

namespace ltlab {

/// Piecewise-constant complex potential. Value values()[j] holds on
/// [breakpoints()[j], breakpoints()[j+1]); zero outside [x0, xn].
/// An empty step list is the zero potential.
class StepPotential {
 public:
  StepPotential() = default;
  StepPotential(std::vector<double> breakpoints, std::vector<Complex> values);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Complex>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }
  bool is_zero() const;

  Complex eval(double x) const;

  StepPotential scaled(Complex factor) const;
  StepPotential shifted(double offset) const;
  /// x -> V(x / factor): breakpoints are multiplied by factor.
  StepPotential dilated(double factor) const;
  StepPotential conjugated() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Complex> values_;
};

/// Uniform samples on [left, right], linearly interpolated, zero outside.
class SampledPotential {
 public:
  SampledPotential(double left, double right, std::vector<Complex> samples);

  double left() const { return left_; }
  double right() const { return right_; }
  const std::vector<Complex>& samples() const { return samples_; }
  double spacing() const { return (right_ - left_) / static_cast<double>(samples_.size() - 1); }

  Complex eval(double x) const;

  SampledPotential scaled(Complex factor) const;
  SampledPotential shifted(double offset) const;
  SampledPotential dilated(double factor) const;
  SampledPotential conjugated() const;

 private:
  double left_;
  double right_;
  std::vector<Complex> samples_;
};

using Potential = std::variant<StepPotential, SampledPotential>;

/// Radially symmetric potential V(|x|) in dimension >= 2. The profile lives on
/// [0, R] and is read as a function of r.
struct RadialPotential {
  int dimension = 3;
  Potential profile;
  int l_max = 0;

  RadialPotential(int dimension, Potential profile, int l_max);
};

Complex eval(const Potential& v, double x);

/// [left, right] of the support; {0, 0} for the zero potential.
std::pair<double, double> support(const Potential& v);

bool is_real(const Potential& v, double tolerance = 1e-14);

/// Integral of |V|^p over the line.
double lp_power_integral(const Potential& v, double p);

/// Integral of max(0, -V)^p; V must be real.
double negative_part_integral(const Potential& v, double p);

/// Whole-space versions: |S^(d-1)| times the radial integral with weight r^(d-1).
bool is_real(const RadialPotential& v, double tolerance = 1e-14);
double lp_power_integral(const RadialPotential& v, double p);
double negative_part_integral(const RadialPotential& v, double p);

/// Named potentials:
///   bogli_stampach(coupling, width)  coupling * i * chi_[0, width]
///   square_well(depth, width)        -depth * chi_[0, width]
///   step_list(x0..xn, re1, im1, ..., ren, imn)
Potential builtin(std::string_view name, std::span<const double> params);

}  // namespace ltlab
