#include "ltlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ltlab {

StepPotential::StepPotential(std::vector<double> breakpoints, std::vector<Complex> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() && values_.empty()) return;
  if (breakpoints_.size() < 2 || breakpoints_.size() != values_.size() + 1) {
    throw InputError("step potential needs n+1 breakpoints for n values (n >= 1)");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw InputError("step potential breakpoints must be strictly increasing");
    }
  }
  for (double x : breakpoints_) {
    if (!std::isfinite(x)) throw InputError("step potential breakpoints must be finite");
  }
}

bool StepPotential::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex v) { return v == Complex{}; });
}

Complex StepPotential::eval(double x) const {
  if (values_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return {};
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

StepPotential StepPotential::scaled(Complex factor) const {
  auto values = values_;
  for (auto& v : values) v *= factor;
  return {breakpoints_, std::move(values)};
}

StepPotential StepPotential::shifted(double offset) const {
  auto breakpoints = breakpoints_;
  for (auto& x : breakpoints) x += offset;
  return {std::move(breakpoints), values_};
}

StepPotential StepPotential::dilated(double factor) const {
  if (!(factor > 0.0)) throw InputError("dilation factor must be positive");
  auto breakpoints = breakpoints_;
  for (auto& x : breakpoints) x *= factor;
  return {std::move(breakpoints), values_};
}

StepPotential StepPotential::conjugated() const {
  auto values = values_;
  for (auto& v : values) v = std::conj(v);
  return {breakpoints_, std::move(values)};
}

SampledPotential::SampledPotential(double left, double right, std::vector<Complex> samples)
    : left_(left), right_(right), samples_(std::move(samples)) {
  if (samples_.size() < 2) throw InputError("sampled potential needs at least 2 samples");
  if (!(left_ < right_)) throw InputError("sampled potential needs left < right");
}

Complex SampledPotential::eval(double x) const {
  if (x < left_ || x > right_) return {};
  const double t = (x - left_) / spacing();
  const auto last = samples_.size() - 1;
  auto k = static_cast<std::size_t>(std::floor(t));
  if (k >= last) return samples_[last];
  const double frac = t - static_cast<double>(k);
  return samples_[k] * (1.0 - frac) + samples_[k + 1] * frac;
}

SampledPotential SampledPotential::scaled(Complex factor) const {
  auto samples = samples_;
  for (auto& v : samples) v *= factor;
  return {left_, right_, std::move(samples)};
}

SampledPotential SampledPotential::shifted(double offset) const {
  return {left_ + offset, right_ + offset, samples_};
}

SampledPotential SampledPotential::dilated(double factor) const {
  if (!(factor > 0.0)) throw InputError("dilation factor must be positive");
  return {left_ * factor, right_ * factor, samples_};
}

SampledPotential SampledPotential::conjugated() const {
  auto samples = samples_;
  for (auto& v : samples) v = std::conj(v);
  return {left_, right_, std::move(samples)};
}

RadialPotential::RadialPotential(int dimension_, Potential profile_, int l_max_)
    : dimension(dimension_), profile(std::move(profile_)), l_max(l_max_) {
  if (dimension < 2) throw InputError("radial potential needs dimension >= 2");
  if (l_max < 0) throw InputError("radial potential needs l_max >= 0");
  const auto [lo, hi] = ltlab::support(profile);
  (void)hi;
  if (lo < 0.0) throw InputError("radial profile must be supported in [0, R]");
}

Complex eval(const Potential& v, double x) {
  return std::visit([x](const auto& p) { return p.eval(x); }, v);
}

std::pair<double, double> support(const Potential& v) {
  if (const auto* step = std::get_if<StepPotential>(&v)) {
    if (step->pieces() == 0) return {0.0, 0.0};
    return {step->breakpoints().front(), step->breakpoints().back()};
  }
  const auto& sampled = std::get<SampledPotential>(v);
  return {sampled.left(), sampled.right()};
}

bool is_real(const Potential& v, double tolerance) {
  const auto real = [tolerance](Complex z) { return std::abs(z.imag()) <= tolerance; };
  if (const auto* step = std::get_if<StepPotential>(&v)) {
    return std::all_of(step->values().begin(), step->values().end(), real);
  }
  const auto& s = std::get<SampledPotential>(v).samples();
  return std::all_of(s.begin(), s.end(), real);
}

namespace {

constexpr double kQuadratureTolerance = 1e-10;

// Integral over [0, 1] of f(a + (b - a) t), where f is smooth except possibly
// at one interior point `kink`; the interval is split there.
template <class F>
double integrate_segment(F&& f, double kink) {
  using boost::math::quadrature::gauss_kronrod;
  const auto piece = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    return gauss_kronrod<double, 15>::integrate(f, a, b, 20, kQuadratureTolerance);
  };
  if (kink > 0.0 && kink < 1.0) return piece(0.0, kink) + piece(kink, 1.0);
  return piece(0.0, 1.0);
}

// Sum over linear segments of the sampled potential of the integral of
// g(V(x)) x^(radial_power).
template <class G>
double integrate_sampled(const SampledPotential& v, G&& g, int radial_power) {
  const auto& s = v.samples();
  const double h = v.spacing();
  CompensatedSum total;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const Complex a = s[k];
    const Complex d = s[k + 1] - s[k];
    const double x0 = v.left() + static_cast<double>(k) * h;
    // Point of the segment closest to zero; the root itself for real data.
    double kink = -1.0;
    const double dd = std::norm(d);
    if (dd > 0.0) kink = -std::real(a * std::conj(d)) / dd;
    const auto f = [&](double t) { return g(a + d * t) * std::pow(x0 + h * t, radial_power); };
    total.add(h * integrate_segment(f, kink));
  }
  return total.value();
}

// Integral of g(V(x)) x^(dimension - 1) over the support.
template <class G>
double integrate_power(const Potential& v, G&& g, int dimension) {
  if (const auto* step = std::get_if<StepPotential>(&v)) {
    CompensatedSum total;
    const auto& x = step->breakpoints();
    for (std::size_t j = 0; j < step->pieces(); ++j) {
      const double measure = dimension == 1 ? x[j + 1] - x[j]
                                            : (std::pow(x[j + 1], dimension) - std::pow(x[j], dimension)) / dimension;
      total.add(g(step->values()[j]) * measure);
    }
    return total.value();
  }
  return integrate_sampled(std::get<SampledPotential>(v), g, dimension - 1);
}

double sphere_area(int dimension) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

}  // namespace

double lp_power_integral(const Potential& v, double p) {
  if (!(p > 0.0)) throw InputError("lp_power_integral needs p > 0");
  return integrate_power(v, [p](Complex z) { return std::pow(std::abs(z), p); }, 1);
}

double negative_part_integral(const Potential& v, double p) {
  if (!(p > 0.0)) throw InputError("negative_part_integral needs p > 0");
  if (!is_real(v)) throw InputError("negative_part_integral needs a real-valued potential");
  return integrate_power(v, [p](Complex z) { return z.real() < 0.0 ? std::pow(-z.real(), p) : 0.0; }, 1);
}

bool is_real(const RadialPotential& v, double tolerance) { return is_real(v.profile, tolerance); }

double lp_power_integral(const RadialPotential& v, double p) {
  if (!(p > 0.0)) throw InputError("lp_power_integral needs p > 0");
  const auto g = [p](Complex z) { return std::pow(std::abs(z), p); };
  return sphere_area(v.dimension) * integrate_power(v.profile, g, v.dimension);
}

double negative_part_integral(const RadialPotential& v, double p) {
  if (!(p > 0.0)) throw InputError("negative_part_integral needs p > 0");
  if (!is_real(v)) throw InputError("negative_part_integral needs a real-valued potential");
  const auto g = [p](Complex z) { return z.real() < 0.0 ? std::pow(-z.real(), p) : 0.0; };
  return sphere_area(v.dimension) * integrate_power(v.profile, g, v.dimension);
}

Potential builtin(std::string_view name, std::span<const double> params) {
  const auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw InputError("builtin '" + std::string(name) + "' expects " + std::to_string(n) + " parameters, got " +
                       std::to_string(params.size()));
    }
  };
  if (name == "bogli_stampach") {
    need(2);
    if (!(params[1] > 0.0)) throw InputError("bogli_stampach width must be positive");
    return StepPotential({0.0, params[1]}, {Complex(0.0, params[0])});
  }
  if (name == "square_well") {
    need(2);
    if (!(params[1] > 0.0)) throw InputError("square_well width must be positive");
    return StepPotential({0.0, params[1]}, {Complex(-params[0], 0.0)});
  }
  if (name == "step_list") {
    if (params.size() < 4 || (params.size() - 1) % 3 != 0) {
      throw InputError("builtin 'step_list' expects x0..xn followed by n (re, im) pairs");
    }
    const std::size_t n = (params.size() - 1) / 3;
    std::vector<double> breakpoints(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(n + 1));
    std::vector<Complex> values;
    for (std::size_t j = 0; j < n; ++j) {
      values.emplace_back(params[n + 1 + 2 * j], params[n + 2 + 2 * j]);
    }
    return StepPotential(std::move(breakpoints), std::move(values));
  }
  throw InputError("unknown builtin potential '" + std::string(name) + "'");
}

}  // namespace ltlab
