#include "ltlab/functionals.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace ltlab {

std::string to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::riesz:
      return "riesz";
    case FunctionalKind::cone:
      return "cone";
    case FunctionalKind::dhk:
      return "dhk";
    case FunctionalKind::fs:
      return "fs";
    case FunctionalKind::weyl:
      return "weyl";
    case FunctionalKind::dhk_ratio:
      return "dhk_ratio";
  }
  return "unknown";
}

FunctionalKind functional_kind_from_string(const std::string& name) {
  for (auto k : {FunctionalKind::riesz, FunctionalKind::cone, FunctionalKind::dhk, FunctionalKind::fs,
                 FunctionalKind::weyl, FunctionalKind::dhk_ratio}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown functional kind '" + name + "'");
}

std::string to_string(Truncation t) {
  switch (t) {
    case Truncation::none:
      return "none";
    case Truncation::below:
      return "below";
    case Truncation::above:
      return "above";
  }
  return "unknown";
}

Truncation truncation_from_string(const std::string& name) {
  if (name == "none") return Truncation::none;
  if (name == "below") return Truncation::below;
  if (name == "above") return Truncation::above;
  throw InputError("unknown truncation '" + name + "' (expected none, below or above)");
}

std::string to_string(ThresholdForm f) { return f == ThresholdForm::power ? "power" : "modulus"; }

ThresholdForm threshold_form_from_string(const std::string& name) {
  if (name == "power") return ThresholdForm::power;
  if (name == "modulus") return ThresholdForm::modulus;
  throw InputError("unknown threshold form '" + name + "' (expected power or modulus)");
}

void FunctionalSpec::validate() const {
  if (dimension < 1) throw InputError("functional dimension must be >= 1");
  if (!(gamma >= 0.0)) throw InputError("functional gamma must be >= 0");
  switch (kind) {
    case FunctionalKind::cone:
      if (!(kappa > 0.0)) throw InputError("cone functional needs kappa > 0");
      break;
    case FunctionalKind::dhk:
    case FunctionalKind::dhk_ratio:
      if (!(sigma >= 0.0)) throw InputError("dhk functional needs sigma >= 0");
      break;
    default:
      break;
  }
}

std::string FunctionalSpec::label() const {
  if (!name.empty()) return name;
  std::ostringstream out;
  out << to_string(kind) << "_g" << gamma;
  switch (kind) {
    case FunctionalKind::cone:
      out << "_k" << kappa;
      break;
    case FunctionalKind::dhk:
    case FunctionalKind::dhk_ratio:
      out << "_s" << sigma;
      break;
    case FunctionalKind::fs:
      out << "_a" << alpha << "_b" << beta;
      if (truncation != Truncation::none) out << '_' << to_string(truncation) << '_' << to_string(threshold_form);
      break;
    default:
      break;
  }
  if (dimension != 1) out << "_d" << dimension;
  return out.str();
}

namespace {

void require_nonzero(ComplexEnergy e) {
  if (std::abs(e) == 0.0) throw InputError("eigenvalue E = 0 in a functional with negative powers of |E|");
}

}  // namespace

double riesz_mean(const EigenSet& eigs, double gamma) {
  if (!(gamma >= 0.0)) throw InputError("riesz_mean needs gamma >= 0");
  CompensatedSum sum;
  for (const auto& e : eigs.entries) {
    sum.add(e.multiplicity * (gamma == 0.0 ? 1.0 : std::pow(std::abs(e.energy), gamma)));
  }
  return sum.value();
}

double dhk_sum(const EigenSet& eigs, double gamma, double sigma) {
  CompensatedSum sum;
  for (const auto& e : eigs.entries) {
    require_nonzero(e.energy);
    const double modulus = std::abs(e.energy);
    sum.add(e.multiplicity * std::pow(modulus, -sigma) * std::pow(delta(e.energy), gamma + sigma));
  }
  return sum.value();
}

double cone_sum(const EigenSet& eigs, double gamma, double kappa) {
  if (!(kappa > 0.0)) throw InputError("cone_sum needs kappa > 0");
  CompensatedSum sum;
  for (const auto& e : eigs.entries) {
    if (std::abs(e.energy.imag()) >= kappa * e.energy.real()) {
      sum.add(e.multiplicity * std::pow(std::abs(e.energy), gamma));
    }
  }
  return sum.value();
}

double fs_sum(const EigenSet& eigs, double alpha, double beta, Truncation truncation, double threshold, double gamma,
              ThresholdForm form) {
  if (truncation != Truncation::none && !(threshold > 0.0)) throw InputError("fs_sum truncation needs T > 0");
  CompensatedSum sum;
  for (const auto& e : eigs.entries) {
    require_nonzero(e.energy);
    const double modulus = std::abs(e.energy);
    if (truncation != Truncation::none) {
      const double measure = form == ThresholdForm::power ? std::pow(modulus, gamma) : modulus;
      if (truncation == Truncation::below && !(measure <= threshold)) continue;
      if (truncation == Truncation::above && !(measure >= threshold)) continue;
    }
    sum.add(e.multiplicity * std::pow(modulus, alpha) * std::pow(delta(e.energy) / modulus, beta));
  }
  return sum.value();
}

double fs_threshold(const Potential& v, double hbar, double gamma, int dimension) {
  return std::pow(hbar, -dimension) * lp_power_integral(v, gamma + 0.5 * dimension);
}

double fs_threshold(const RadialPotential& v, double hbar, double gamma) {
  return std::pow(hbar, -v.dimension) * lp_power_integral(v, gamma + 0.5 * v.dimension);
}

namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

[[noreturn]] void out_of_range(char id, const std::string& constraint, const std::string& got) {
  throw InputError(std::string("case (") + id + ") requires " + constraint + " (got " + got + ")");
}

constexpr double kMargin = 0.1;

}  // namespace

FunctionalSpec case_table(char id, int d, double gamma, std::optional<double> alpha, std::optional<double> beta) {
  FunctionalSpec spec;
  spec.kind = FunctionalKind::fs;
  spec.dimension = d;
  spec.gamma = gamma;
  spec.threshold_form = ThresholdForm::power;
  if (d < 1) out_of_range(id, "d >= 1", "d = " + fmt(d));
  const double half_d = 0.5 * d;
  const auto fixed = [&](const char* which, std::optional<double> given, double value) {
    if (given && std::abs(*given - value) > 1e-12) {
      out_of_range(id, std::string(which) + " = " + fmt(value), std::string(which) + " = " + fmt(*given));
    }
    return value;
  };
  const auto gamma_positive_or_half = [&] {
    if (d == 1 && !(gamma >= 0.5)) out_of_range(id, "gamma >= 1/2 when d = 1", "gamma = " + fmt(gamma));
    if (d >= 2 && !(gamma > 0.0)) out_of_range(id, "gamma > 0 when d >= 2", "gamma = " + fmt(gamma));
  };

  switch (id) {
    case 'a': {
      if (d < 2) out_of_range(id, "d >= 2", "d = " + fmt(d));
      const double upper = d / (2.0 * (2 * d - 1));
      if (!(gamma > 0.0)) out_of_range(id, "gamma > 0", "gamma = " + fmt(gamma));
      if (!(gamma < upper)) out_of_range(id, "gamma < d/(2(2d-1)) = " + fmt(upper), "gamma = " + fmt(gamma));
      spec.alpha = fixed("alpha", alpha, 0.5);
      spec.beta = fixed("beta", beta, 1.0);
      spec.truncation = Truncation::none;
      break;
    }
    case 'b': {
      if (d < 2) out_of_range(id, "d >= 2", "d = " + fmt(d));
      const double lower = d / (2.0 * (2 * d - 1));
      if (!(gamma >= lower && gamma <= 0.5)) {
        out_of_range(id, "d/(2(2d-1)) = " + fmt(lower) + " <= gamma <= 1/2", "gamma = " + fmt(gamma));
      }
      const double alpha_min = (d - 1) * gamma / (half_d - gamma);
      spec.alpha = alpha.value_or(alpha_min + kMargin);
      if (!(spec.alpha > alpha_min)) {
        out_of_range(id, "alpha > (d-1)gamma/(d/2-gamma) = " + fmt(alpha_min), "alpha = " + fmt(spec.alpha));
      }
      spec.beta = fixed("beta", beta, 1.0);
      spec.truncation = Truncation::none;
      break;
    }
    case 'c': {
      if (!(gamma > 0.5)) out_of_range(id, "gamma > 1/2", "gamma = " + fmt(gamma));
      spec.alpha = alpha.value_or(beta.value_or(2.0 * gamma + kMargin));
      spec.beta = beta.value_or(spec.alpha);
      if (spec.alpha != spec.beta) out_of_range(id, "alpha = beta", "alpha = " + fmt(spec.alpha) + ", beta = " + fmt(spec.beta));
      if (!(spec.alpha > 2.0 * gamma)) out_of_range(id, "alpha = beta > 2 gamma", "alpha = " + fmt(spec.alpha));
      spec.truncation = Truncation::below;
      break;
    }
    case 'd': {
      if (!(gamma > 0.5)) out_of_range(id, "gamma > 1/2", "gamma = " + fmt(gamma));
      const double alpha_max = gamma * (gamma + half_d);
      spec.alpha = alpha.value_or(0.5 * alpha_max);
      if (!(spec.alpha > 0.0 && spec.alpha < alpha_max)) {
        out_of_range(id, "0 < alpha < gamma(gamma+d/2) = " + fmt(alpha_max), "alpha = " + fmt(spec.alpha));
      }
      spec.beta = beta.value_or(2.0 * gamma + kMargin);
      if (!(spec.beta > 2.0 * gamma)) out_of_range(id, "beta > 2 gamma", "beta = " + fmt(spec.beta));
      spec.truncation = Truncation::above;
      break;
    }
    case 'e': {
      gamma_positive_or_half();
      spec.alpha = fixed("alpha", alpha, gamma + half_d);
      spec.beta = fixed("beta", beta, gamma + half_d);
      spec.truncation = Truncation::below;
      break;
    }
    case 'f': {
      gamma_positive_or_half();
      spec.alpha = alpha.value_or(gamma + kMargin);
      if (!(spec.alpha > gamma)) out_of_range(id, "alpha > gamma", "alpha = " + fmt(spec.alpha));
      spec.beta = fixed("beta", beta, gamma + half_d);
      spec.truncation = Truncation::above;
      break;
    }
    default:
      throw InputError(std::string("unknown case '") + id + "' (expected a-f)");
  }
  spec.name = std::string("case_") + id;
  return spec;
}

double semiclassical_constant(double gamma, int d) {
  if (!(gamma >= 0.0)) throw InputError("semiclassical_constant needs gamma >= 0");
  if (d < 1) throw InputError("semiclassical_constant needs d >= 1");
  // |S^{d-1}| / (2 pi)^d * int_0^1 (1 - r^2)^gamma r^{d-1} dr
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const auto f = [gamma, d](double r) { return std::pow(1.0 - r * r, gamma) * std::pow(r, d - 1); };
  const double radial = integrator.integrate(f, 0.0, 1.0, 1e-10);
  return sphere * radial / std::pow(2.0 * std::numbers::pi, d);
}

namespace {

// Binds a potential to its dimension so the one- and radial-dimensional
// paths share the evaluation code.
struct Integrals {
  int dimension;
  std::function<double(double)> lp;
  std::function<double(double)> negative;
};

double weyl_ratio_impl(const EigenSet& eigs, const Integrals& v, double gamma, double hbar) {
  const int d = v.dimension;
  const double denominator = semiclassical_constant(gamma, d) * v.negative(gamma + 0.5 * d);
  if (!(denominator > 0.0)) throw InputError("weyl_ratio needs a potential with nonzero negative part");
  return std::pow(hbar, d) * riesz_mean(eigs, gamma) / denominator;
}

double evaluate_impl(const FunctionalSpec& spec, const EigenSet& eigs, const Integrals& v, double hbar) {
  spec.validate();
  const auto threshold = [&] { return std::pow(hbar, -v.dimension) * v.lp(spec.gamma + 0.5 * v.dimension); };
  switch (spec.kind) {
    case FunctionalKind::riesz:
      return riesz_mean(eigs, spec.gamma);
    case FunctionalKind::cone:
      return cone_sum(eigs, spec.gamma, spec.kappa);
    case FunctionalKind::dhk:
      return dhk_sum(eigs, spec.gamma, spec.sigma);
    case FunctionalKind::fs: {
      const double t = spec.truncation == Truncation::none ? 0.0 : threshold();
      return fs_sum(eigs, spec.alpha, spec.beta, spec.truncation, t, spec.gamma, spec.threshold_form);
    }
    case FunctionalKind::weyl:
      return weyl_ratio_impl(eigs, v, spec.gamma, hbar);
    case FunctionalKind::dhk_ratio: {
      const double norm = threshold();
      if (!(norm > 0.0)) throw InputError("dhk_ratio needs a nonzero potential");
      return dhk_sum(eigs, spec.gamma, spec.sigma) / norm;
    }
  }
  throw InputError("unhandled functional kind");
}

Integrals integrals_of(const Potential& v, int dimension) {
  return {dimension, [&v](double p) { return lp_power_integral(v, p); },
          [&v](double p) { return negative_part_integral(v, p); }};
}

Integrals integrals_of(const RadialPotential& v) {
  return {v.dimension, [&v](double p) { return lp_power_integral(v, p); },
          [&v](double p) { return negative_part_integral(v, p); }};
}

}  // namespace

double weyl_ratio(const EigenSet& eigs, const Potential& v, double gamma, double hbar, int d) {
  return weyl_ratio_impl(eigs, integrals_of(v, d), gamma, hbar);
}

double weyl_ratio(const EigenSet& eigs, const RadialPotential& v, double gamma, double hbar) {
  return weyl_ratio_impl(eigs, integrals_of(v), gamma, hbar);
}

double evaluate(const FunctionalSpec& spec, const EigenSet& eigs, const Potential& v, double hbar) {
  return evaluate_impl(spec, eigs, integrals_of(v, spec.dimension), hbar);
}

double evaluate(const FunctionalSpec& spec, const EigenSet& eigs, const RadialPotential& v, double hbar) {
  if (spec.dimension != v.dimension) {
    throw InputError("functional " + spec.label() + " has dimension " + std::to_string(spec.dimension) +
                     " but the potential has dimension " + std::to_string(v.dimension));
  }
  return evaluate_impl(spec, eigs, integrals_of(v), hbar);
}

}  // namespace ltlab
