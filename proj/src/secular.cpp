#include "ltlab/secular.hpp"

#include <cmath>
#include <vector>

namespace ltlab {

namespace {

// cosh(sqrt(z)), sinh(sqrt(z))/sqrt(z) and d/dz of the latter, all multiplied
// by exp(-|Re sqrt(z)|).
struct ScaledHyperbolics {
  Complex c;
  Complex s;
  Complex ds;
};

ScaledHyperbolics scaled_hyperbolics(Complex z) {
  Complex q = std::sqrt(z);
  if (q.real() < 0.0) q = -q;
  const double a = q.real();
  if (std::abs(z) < 0.5) {
    // Power series; exp(-a) is close to 1 here.
    Complex c{0.0}, s{0.0}, ds{0.0};
    Complex zk{1.0};
    double fact_even = 1.0;  // (2k)!
    double fact_odd = 1.0;   // (2k+1)!
    for (int k = 0; k < 14; ++k) {
      if (k > 0) {
        fact_even *= (2.0 * k - 1.0) * (2.0 * k);
        fact_odd *= (2.0 * k) * (2.0 * k + 1.0);
      }
      c += zk / fact_even;
      s += zk / fact_odd;
      // d/dz z^{k+1} / (2k+3)! = (k+1) z^k / (2k+3)!
      ds += static_cast<double>(k + 1) * zk / (fact_odd * (2.0 * k + 2.0) * (2.0 * k + 3.0));
      zk *= z;
    }
    const double damp = std::exp(-a);
    return {c * damp, s * damp, ds * damp};
  }
  const Complex grow = std::exp(Complex(0.0, q.imag()));                // exp(q - a)
  const Complex decay = std::exp(Complex(-2.0 * a, -q.imag()));         // exp(-q - a)
  const Complex c = 0.5 * (grow + decay);
  const Complex s = 0.5 * (grow - decay) / q;
  const Complex ds = (c - s) / (2.0 * z);
  return {c, s, ds};
}

}  // namespace

namespace {

// Solution state (psi, psi') with its E-derivative, renormalised by a positive factor.
struct State {
  Complex u0, u1, du0, du1;
};

// Per-piece transfer data at one energy.
struct Piece {
  double w;
  Complex z, dz;  // (k_j w)^2 and its E-derivative
  ScaledHyperbolics h;
};

// Carries s across p, forward (left to right) or backward. Returns the log of
// the norm lost relative to the scaled transfer matrix; rounding errors are
// amplified by about exp of that amount.
double carry(State& s, const Piece& p, bool forward) {
  const auto& [c, sh, ds] = p.h;
  const double w = p.w;
  const Complex z = p.z, dz = p.dz;
  // M = [[c, w s], [z s / w, c]]; its inverse flips the off-diagonal signs.
  const double sign = forward ? 1.0 : -1.0;
  const Complex m00 = c, m01 = sign * w * sh, m10 = sign * z * sh / w, m11 = c;
  const Complex dm00 = 0.5 * sh * dz;
  const Complex dm01 = sign * w * ds * dz;
  const Complex dm10 = sign * (sh + z * ds) * dz / w;
  const Complex dm11 = dm00;
  const Complex n0 = m00 * s.u0 + m01 * s.u1;
  const Complex n1 = m10 * s.u0 + m11 * s.u1;
  const Complex dn0 = dm00 * s.u0 + dm01 * s.u1 + m00 * s.du0 + m01 * s.du1;
  const Complex dn1 = dm10 * s.u0 + dm11 * s.u1 + m10 * s.du0 + m11 * s.du1;
  double norm = std::abs(n0) + std::abs(n1);
  if (!(norm > 0.0) || !std::isfinite(norm)) norm = 1.0;
  s = {n0 / norm, n1 / norm, dn0 / norm, dn1 / norm};
  return -std::log(norm);
}

}  // namespace

AnalyticSample matching_function(const StepPotential& v, double hbar, ComplexEnergy e) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  if (e.imag() == 0.0 && e.real() >= 0.0) throw InputError("energy on the branch cut [0, inf)");
  const double h2 = hbar * hbar;
  const Complex k0 = std::sqrt(-e) / hbar;  // principal root: Re k0 > 0 off the cut
  const Complex dk0 = -1.0 / (2.0 * h2 * k0);
  const std::size_t n = v.pieces();

  // Left-decaying solution carried right, right-decaying solution carried left.
  thread_local std::vector<Piece> pieces;
  thread_local std::vector<State> left, right;
  thread_local std::vector<double> left_loss, right_loss;
  pieces.resize(n);
  left.resize(n + 1);
  right.resize(n + 1);
  left_loss.assign(n + 1, 0.0);
  right_loss.assign(n + 1, 0.0);
  const auto& x = v.breakpoints();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = x[j + 1] - x[j];
    const Complex z = (v.values()[j] - e) * (w * w / h2);
    pieces[j] = {w, z, -w * w / h2, scaled_hyperbolics(z)};
  }
  left[0] = {1.0, k0, 0.0, dk0};
  for (std::size_t j = 0; j < n; ++j) {
    left[j + 1] = left[j];
    left_loss[j + 1] = left_loss[j] + carry(left[j + 1], pieces[j], true);
  }
  right[n] = {1.0, -k0, 0.0, -dk0};
  for (std::size_t j = n; j-- > 0;) {
    right[j] = right[j + 1];
    right_loss[j] = right_loss[j + 1] + carry(right[j], pieces[j], false);
  }
  // The Wronskian is the same at every breakpoint up to a positive factor;
  // match where the least accuracy was lost.
  std::size_t m = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (left_loss[k] + right_loss[k] < left_loss[m] + right_loss[m] - 1e-9) m = k;
  }
  const State& a = left[m];
  const State& b = right[m];
  const Complex w_val = a.u1 * b.u0 - a.u0 * b.u1;
  const Complex w_der = a.du1 * b.u0 + a.u1 * b.du0 - a.du0 * b.u1 - a.u0 * b.du1;
  return {w_val, w_der / w_val};
}

std::vector<CutFreePiece> split_around_cut(const SearchRegion& r, double eps) {
  using E = SearchRegion::Edge;
  std::vector<CutFreePiece> pieces;
  if (r.is_degenerate()) return pieces;
  if (r.re_max < -eps || r.im_min > eps || r.im_max < -eps) {
    pieces.push_back({r, 0});
    return pieces;
  }
  if (r.im_max > eps) pieces.push_back({{r.re_min, r.re_max, std::max(eps, r.im_min), r.im_max}, E::kImMin});
  if (r.im_min < -eps) pieces.push_back({{r.re_min, r.re_max, r.im_min, std::min(-eps, r.im_max)}, E::kImMax});
  if (r.re_min < -eps) {
    pieces.push_back(
        {{r.re_min, -eps, std::max(r.im_min, -eps), std::min(r.im_max, eps)}, E::kReMax | E::kImMin | E::kImMax});
  }
  std::erase_if(pieces, [](const CutFreePiece& p) { return p.region.is_degenerate(); });
  return pieces;
}

int count_zeros(const SearchRegion& region, const StepPotential& v, double hbar, const SecularOptions& options) {
  const AnalyticFunction w = [&](Complex e) { return matching_function(v, hbar, e); };
  int total = 0;
  for (const auto& piece : split_around_cut(region, options.axis_exclusion)) {
    ContourOptions contour = options.search.contour;
    contour.fixed_edges |= piece.edges_on_strip;
    total += count_zeros(piece.region, w, contour);
  }
  return total;
}

SearchRegion default_region(const StepPotential& v, double hbar, double region_constant) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  const double l1 = lp_power_integral(Potential{v}, 1.0);
  const double root = region_constant * l1 / hbar;
  const double radius = root * root;
  return {-radius, radius, -radius, radius};
}

EigenSet find_eigenvalues(const StepPotential& v, double hbar, const SearchRegion& region,
                          const SecularOptions& options) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  EigenSet result;
  result.hbar = hbar;
  result.solver = SolverTag::secular;
  if (v.is_zero()) return result;

  const AnalyticFunction w = [&](Complex e) { return matching_function(v, hbar, e); };
  for (const auto& piece : split_around_cut(region, options.axis_exclusion)) {
    // A dilated retry must not cross into the cut strip.
    ZeroSearchOptions search = options.search;
    search.contour.fixed_edges |= piece.edges_on_strip;
    for (const auto& z : find_zeros(piece.region, w, search)) {
      result.entries.push_back({z.location, z.multiplicity, z.error_estimate});
    }
  }
  result.normalize(options.axis_exclusion);
  return result;
}

}  // namespace ltlab
