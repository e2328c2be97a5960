#pragma once

#include <optional>
#include <string>

#include "ltlab/eigenset.hpp"
#include "ltlab/potentials.hpp"

namespace ltlab {

enum class FunctionalKind {
  riesz,  ///< sum |E|^gamma
  cone,   ///< sum over |Im E| >= kappa Re E of |E|^gamma
  dhk,    ///< sum |E|^-sigma delta(E)^(gamma+sigma)
  fs,     ///< sum |E|^alpha (delta(E)/|E|)^beta, optionally truncated
  // Sweep-only columns; they need the potential and hbar.
  weyl,       ///< hbar^d riesz / (L^cl int V_-^(gamma+d/2))
  dhk_ratio,  ///< dhk / (hbar^-d int |V|^(gamma+d/2))
};

enum class Truncation { none, below, above };

/// How the truncation threshold T is compared: |E|^gamma vs T (power) or |E| vs T (modulus).
enum class ThresholdForm { power, modulus };

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& name);
std::string to_string(Truncation t);
Truncation truncation_from_string(const std::string& name);
std::string to_string(ThresholdForm f);
ThresholdForm threshold_form_from_string(const std::string& name);

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::riesz;
  double gamma = 1.0;
  double sigma = 0.0;
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  Truncation truncation = Truncation::none;
  ThresholdForm threshold_form = ThresholdForm::power;
  int dimension = 1;
  /// Column label; generated from the parameters when empty.
  std::string name;

  /// Throws InputError if the parameters do not fit the kind.
  void validate() const;
  std::string label() const;
};

/// sum_j m_j |E_j|^gamma; gamma = 0 counts eigenvalues.
double riesz_mean(const EigenSet& eigs, double gamma);

/// sum_j m_j |E_j|^-sigma delta(E_j)^(gamma+sigma).
double dhk_sum(const EigenSet& eigs, double gamma, double sigma);

/// sum over |Im E_j| >= kappa Re E_j of m_j |E_j|^gamma.
double cone_sum(const EigenSet& eigs, double gamma, double kappa);

/// sum_j m_j |E_j|^alpha (delta(E_j)/|E_j|)^beta restricted by truncation:
/// below keeps |E|^gamma <= T (power) or |E| <= T (modulus), above keeps >=.
double fs_sum(const EigenSet& eigs, double alpha, double beta, Truncation truncation = Truncation::none,
              double threshold = 0.0, double gamma = 1.0, ThresholdForm form = ThresholdForm::power);

/// T = hbar^-d int |V|^(gamma + d/2).
double fs_threshold(const Potential& v, double hbar, double gamma, int dimension);
double fs_threshold(const RadialPotential& v, double hbar, double gamma);

/// Ranges of the known instances (a)-(f) of the nonlocal bound. Free
/// parameters default to their lower bound + 0.1 (mid-range for bounded
/// ones) unless given; explicit values are range-checked.
FunctionalSpec case_table(char case_id, int dimension, double gamma, std::optional<double> alpha = std::nullopt,
                          std::optional<double> beta = std::nullopt);

/// L^cl_{gamma,d} = int (|xi|^2 - 1)_-^gamma dxi / (2 pi)^d, by radial quadrature.
double semiclassical_constant(double gamma, int dimension);

/// hbar^d riesz_mean(gamma) / (L^cl_{gamma,d} int V_-^(gamma+d/2)); V real.
double weyl_ratio(const EigenSet& eigs, const Potential& v, double gamma, double hbar, int dimension);
double weyl_ratio(const EigenSet& eigs, const RadialPotential& v, double gamma, double hbar);

/// Value of spec on eigs. weyl, dhk_ratio and truncated fs need v and hbar.
double evaluate(const FunctionalSpec& spec, const EigenSet& eigs, const Potential& v, double hbar);
/// spec.dimension must equal v.dimension.
double evaluate(const FunctionalSpec& spec, const EigenSet& eigs, const RadialPotential& v, double hbar);

}  // namespace ltlab
