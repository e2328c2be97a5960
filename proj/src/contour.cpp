#include "ltlab/contour.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace ltlab {

SearchRegion SearchRegion::dilated(double factor, unsigned fixed_edges) const {
  const auto grow = [factor](double lo, double hi, bool fix_lo, bool fix_hi) -> std::pair<double, double> {
    const double extra = (hi - lo) * (factor - 1.0);
    if (fix_lo && fix_hi) return {lo, hi};
    if (fix_lo) return {lo, hi + extra};
    if (fix_hi) return {lo - extra, hi};
    return {lo - 0.5 * extra, hi + 0.5 * extra};
  };
  const auto [r0, r1] = grow(re_min, re_max, fixed_edges & kReMin, fixed_edges & kReMax);
  const auto [i0, i1] = grow(im_min, im_max, fixed_edges & kImMin, fixed_edges & kImMax);
  return {r0, r1, i0, i1};
}

namespace {

struct Node {
  Complex z;
  AnalyticSample f;
};

bool too_close(const AnalyticSample& s, double min_distance) {
  if (s.value == Complex{} || !std::isfinite(std::abs(s.value))) return true;
  const double ld = std::abs(s.log_derivative);
  if (!std::isfinite(ld)) return true;
  return ld * min_distance > 1.0;
}

// Accumulated change of arg f along the straight segment a -> b.
std::optional<double> arg_change(const Node& a, const Node& b, const AnalyticFunction& f,
                                 const ContourOptions& opt) {
  double total = 0.0;
  std::vector<std::pair<Node, Node>> stack{{a, b}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    const Complex h = hi.z - lo.z;
    const Complex g_lo = lo.f.log_derivative * h;
    const Complex g_hi = hi.f.log_derivative * h;
    bool split = std::abs(g_lo) > opt.max_log_step || std::abs(g_hi) > opt.max_log_step;
    double step = 0.0;
    if (!split) {
      step = std::arg(hi.f.value * std::conj(lo.f.value));
      const double predicted = 0.5 * (g_lo + g_hi).imag();
      split = std::abs(step - predicted) > 0.25;
    }
    if (!split) {
      total += step;
      continue;
    }
    if (std::abs(h) < opt.min_distance) return std::nullopt;
    const Complex mid = 0.5 * (lo.z + hi.z);
    Node m{mid, f(mid)};
    if (too_close(m.f, opt.min_distance)) return std::nullopt;
    // Pushed in reverse so that the lower half is processed first.
    stack.push_back({m, hi});
    stack.push_back({lo, m});
  }
  return total;
}

}  // namespace

std::optional<int> winding_number(const SearchRegion& region, const AnalyticFunction& f,
                                  const ContourOptions& options) {
  if (region.is_degenerate()) return 0;
  const std::array<Complex, 4> corners{Complex(region.re_min, region.im_min), Complex(region.re_max, region.im_min),
                                       Complex(region.re_max, region.im_max), Complex(region.re_min, region.im_max)};
  std::array<Node, 4> nodes;
  for (std::size_t k = 0; k < 4; ++k) {
    nodes[k] = {corners[k], f(corners[k])};
    if (too_close(nodes[k].f, options.min_distance)) return std::nullopt;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto change = arg_change(nodes[k], nodes[(k + 1) % 4], f, options);
    if (!change) return std::nullopt;
    total += *change;
  }
  const double winding = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(winding);
  if (std::abs(winding - rounded) >= options.winding_tolerance) return std::nullopt;
  return static_cast<int>(rounded);
}

int count_zeros(const SearchRegion& region, const AnalyticFunction& f, const ContourOptions& options,
                SearchRegion* used) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> factor(1.01, 1.05);
  SearchRegion current = region;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (const auto n = winding_number(current, f, options)) {
      if (*n < 0) throw ComputationError("negative winding number: function is not analytic in the region");
      if (used) *used = current;
      return *n;
    }
    current = region.dilated(factor(rng), options.fixed_edges);
  }
  throw ComputationError("contour passes too close to a zero after " + std::to_string(options.max_retries) +
                         " dilations");
}

namespace {

struct NewtonResult {
  Complex z;
  double last_step = 0.0;
};

std::optional<NewtonResult> newton(const AnalyticFunction& f, Complex start, int multiplicity,
                                   const SearchRegion& box, const ZeroSearchOptions& opt) {
  const SearchRegion leash = box.dilated(3.0, opt.contour.fixed_edges);
  Complex z = start;
  for (int it = 0; it < opt.newton_max_iterations; ++it) {
    const AnalyticSample s = f(z);
    if (s.value == Complex{}) return NewtonResult{z, 0.0};
    if (!std::isfinite(std::abs(s.log_derivative)) || s.log_derivative == Complex{}) return std::nullopt;
    const Complex step = static_cast<double>(multiplicity) / s.log_derivative;
    z -= step;
    if (!std::isfinite(std::abs(z)) || !leash.contains(z)) return std::nullopt;
    if (std::abs(step) <= opt.newton_tolerance * std::max(1.0, std::abs(z))) {
      const double margin = 1e-9 * box.diameter() + 4.0 * opt.newton_tolerance * std::max(1.0, std::abs(z));
      if (!box.contains(z, margin)) return std::nullopt;
      return NewtonResult{z, std::abs(step)};
    }
  }
  return std::nullopt;
}

std::optional<ZeroEstimate> refine(const AnalyticFunction& f, const SearchRegion& r, int multiplicity,
                                   const ZeroSearchOptions& opt) {
  const Complex c = r.center();
  const Complex qw(0.25 * r.width(), 0.0);
  const Complex qh(0.0, 0.25 * r.height());
  const std::array<Complex, 5> starts{c, c - qw - qh, c + qw - qh, c + qw + qh, c - qw + qh};
  for (const Complex s : starts) {
    if (auto result = newton(f, s, multiplicity, r, opt)) {
      const double floor = 1e-16 * std::max(1.0, std::abs(result->z));
      return ZeroEstimate{result->z, multiplicity, std::max(result->last_step, floor)};
    }
  }
  return std::nullopt;
}

std::pair<SearchRegion, SearchRegion> split_at(const SearchRegion& r, double t) {
  SearchRegion a = r;
  SearchRegion b = r;
  if (r.width() >= r.height()) {
    const double x = r.re_min + t * r.width();
    a.re_max = x;
    b.re_min = x;
  } else {
    const double y = r.im_min + t * r.height();
    a.im_max = y;
    b.im_min = y;
  }
  return {a, b};
}

}  // namespace

std::vector<ZeroEstimate> find_zeros(const SearchRegion& region, const AnalyticFunction& f,
                                     const ZeroSearchOptions& options) {
  std::vector<ZeroEstimate> zeros;
  if (region.is_degenerate()) return zeros;
  SearchRegion start = region;
  const int total = count_zeros(region, f, options.contour, &start);

  // Minimal size below which a single zero is reported by its rectangle.
  const double scale = std::max(1.0, std::abs(start.center()) + start.diameter());
  const double floor_diameter = 1e-13 * scale;

  std::vector<std::pair<SearchRegion, int>> stack{{start, total}};
  while (!stack.empty()) {
    auto [r, n] = stack.back();
    stack.pop_back();
    if (n == 0) continue;

    const double cluster = options.cluster_diameter * std::max(1.0, std::abs(r.center()));
    if (n == 1 || r.diameter() < cluster) {
      if (auto z = refine(f, r, n, options)) {
        zeros.push_back(*z);
        continue;
      }
      if (r.diameter() < std::max(cluster, floor_diameter)) {
        zeros.push_back({r.center(), n, r.diameter()});
        continue;
      }
    }

    bool split_done = false;
    for (const double t : {0.5, 0.47, 0.53, 0.41, 0.59, 0.33, 0.67}) {
      const auto [a, b] = split_at(r, t);
      const auto na = winding_number(a, f, options.contour);
      if (!na) continue;
      const auto nb = winding_number(b, f, options.contour);
      if (!nb || *na < 0 || *nb < 0 || *na + *nb != n) continue;
      stack.push_back({b, *nb});
      stack.push_back({a, *na});
      split_done = true;
      break;
    }
    if (!split_done) {
      // Zeros sit too close to every candidate split line: report as one cluster.
      if (auto z = refine(f, r, n, options)) {
        z->error_estimate = std::max(z->error_estimate, r.diameter());
        zeros.push_back(*z);
      } else {
        zeros.push_back({r.center(), n, r.diameter()});
      }
    }
  }
  return zeros;
}

}  // namespace ltlab
