#include "ltlab/gridsolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ltlab {

namespace {

double padding_for(double hbar, double decay_min) { return hbar * std::max(10.0, 9.0 / decay_min); }

double max_modulus(const Potential& v) {
  double m = 0.0;
  if (const auto* step = std::get_if<StepPotential>(&v)) {
    for (const auto z : step->values()) m = std::max(m, std::abs(z));
  } else {
    for (const auto z : std::get<SampledPotential>(v).samples()) m = std::max(m, std::abs(z));
  }
  return m;
}

double target_spacing(const Potential& v, double hbar, const GridResolution& res) {
  if (!(res.h_factor > 0.0) || !(res.decay_min > 0.0)) throw InputError("grid resolution parameters must be positive");
  return res.h_factor * hbar / std::sqrt(1.0 + max_modulus(v));
}

// Cells covering [0, width]: a multiple of 8 with spacing <= target.
int cells_for(double width, double target) {
  const int blocks = std::max(1, static_cast<int>(std::ceil(width / (8.0 * target))));
  return 8 * blocks;
}

// Mean of a step potential over [lo, hi].
Complex cell_average(const StepPotential& v, double lo, double hi) {
  if (v.pieces() == 0) return {};
  const auto& x = v.breakpoints();
  if (hi <= x.front() || lo >= x.back()) return {};
  Complex total{};
  auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), lo) - x.begin());
  j = j == 0 ? 0 : j - 1;
  for (; j < v.pieces() && x[j] < hi; ++j) {
    const double a = std::max(lo, x[j]);
    const double b = std::min(hi, x[j + 1]);
    if (b > a) total += v.values()[j] * (b - a);
  }
  return total / (hi - lo);
}

Complex node_value(const Potential& v, double x, double h) {
  if (const auto* step = std::get_if<StepPotential>(&v)) return cell_average(*step, x - 0.5 * h, x + 0.5 * h);
  return std::get<SampledPotential>(v).eval(x);
}

std::vector<Complex> off_axis(std::vector<Complex> values, double eps_axis) {
  std::erase_if(values, [eps_axis](Complex e) { return !(delta(e) > eps_axis); });
  return values;
}

struct Match {
  std::size_t a;
  std::size_t b;
};

// Greedy nearest-neighbour pairing on sorted distance, capped at cap * (1 + |a|).
std::vector<Match> greedy_match(const std::vector<Complex>& a, const std::vector<Complex>& b, double cap) {
  std::vector<std::size_t> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return b[i].real() < b[j].real(); });
  std::vector<double> keys(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) keys[k] = b[order[k]].real();

  struct Candidate {
    double distance;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double radius = cap * (1.0 + std::abs(a[i]));
    auto it = std::lower_bound(keys.begin(), keys.end(), a[i].real() - radius);
    for (; it != keys.end() && *it <= a[i].real() + radius; ++it) {
      const std::size_t j = order[static_cast<std::size_t>(it - keys.begin())];
      const double dist = std::abs(a[i] - b[j]);
      if (dist <= radius) candidates.push_back({dist, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  std::vector<Match> matches;
  for (const auto& c : candidates) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = true;
    matches.push_back({c.a, c.b});
  }
  // Nearest-first pairing crosses the members of a close doublet when the
  // shift between the two spectra exceeds the splitting; swap pairs while
  // that lowers the summed squared distance.
  const auto sq = [&](std::size_t i, std::size_t j) { return std::norm(a[i] - b[j]); };
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t p = 0; p < matches.size(); ++p) {
      for (std::size_t q = p + 1; q < matches.size(); ++q) {
        auto& x = matches[p];
        auto& y = matches[q];
        const double reach = cap * (2.0 + std::abs(a[x.a]) + std::abs(a[y.a]));
        if (std::abs(a[x.a] - a[y.a]) > reach) continue;
        if (sq(x.a, y.b) + sq(y.a, x.b) < sq(x.a, x.b) + sq(y.a, y.b) &&
            std::abs(a[x.a] - b[y.b]) <= cap * (1.0 + std::abs(a[x.a])) &&
            std::abs(a[y.a] - b[x.b]) <= cap * (1.0 + std::abs(a[y.a]))) {
          std::swap(x.b, y.b);
          improved = true;
        }
      }
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match& x, const Match& y) { return x.a < y.a; });
  return matches;
}

struct FilterThresholds {
  double eps_move;
  double eps_refine;
  double eps_axis;
  double cluster_radius;
  double max_energy;
  // Candidates must decay by exp(-min_decay_exponent) across the padding
  // between the potential and the Dirichlet ends, i.e.
  // Re sqrt(-E) * padding / hbar >= min_decay_exponent.
  double min_decay_exponent;
  double padding;
  double hbar;
};

bool decays_in_padding(Complex e, const FilterThresholds& t) {
  return std::sqrt(-e).real() * t.padding / t.hbar >= t.min_decay_exponent;
}

// build(extent_points, points): discretisation of the domain holding
// extent_points interior nodes at the base spacing, resolved with `points`
// nodes. Three solves: (N, h), (2N+1, h/2) and the enlarged domain (N', h).
// h vs h/2 matching feeds Richardson extrapolation; the enlargement check
// compares raw values at equal h, so only truncation effects remain.
EigenSet filtered_spectrum(const std::function<TridiagonalComplexMatrix(int, int)>& build, int points,
                           int enlarged_points, const FilterThresholds& t) {
  EigenSet result;
  const auto coarse = off_axis(eig_all(build(points, points)), t.eps_axis);
  const auto fine = off_axis(eig_all(build(points, 2 * points + 1)), t.eps_axis);
  const auto enlarged = off_axis(eig_all(build(enlarged_points, enlarged_points)), t.eps_axis);

  const auto refined = greedy_match(coarse, fine, t.eps_refine);
  const auto stable = greedy_match(coarse, enlarged, t.eps_move);
  std::vector<std::ptrdiff_t> enlarged_of(coarse.size(), -1);
  for (const auto& m : stable) enlarged_of[m.a] = static_cast<std::ptrdiff_t>(m.b);

  std::vector<EigenEntry> kept;
  for (const auto& m : refined) {
    if (enlarged_of[m.a] < 0) continue;
    const Complex correction = (fine[m.b] - coarse[m.a]) / 3.0;
    const Complex e = fine[m.b] + correction;
    if (!(delta(e) > t.eps_axis) || std::abs(e) > t.max_energy || !decays_in_padding(e, t)) continue;
    const double moved = std::abs(enlarged[static_cast<std::size_t>(enlarged_of[m.a])] - coarse[m.a]);
    kept.push_back({e, 1, std::max(std::abs(correction), moved)});
  }
  result.discarded_candidates = static_cast<int>(coarse.size() - kept.size());
  std::sort(kept.begin(), kept.end(), [](const EigenEntry& x, const EigenEntry& y) {
    if (x.energy.real() != y.energy.real()) return x.energy.real() < y.energy.real();
    return x.energy.imag() < y.energy.imag();
  });

  // Single-linkage clustering.
  std::vector<std::size_t> parent(kept.size());
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (kept[j].energy.real() - kept[i].energy.real() > t.cluster_radius) break;
      if (std::abs(kept[j].energy - kept[i].energy) < t.cluster_radius) parent[root(j)] = root(i);
    }
  }
  std::vector<std::vector<std::size_t>> groups(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) groups[root(i)].push_back(i);
  for (const auto& g : groups) {
    if (g.empty()) continue;
    Complex mean{};
    double err = 0.0;
    for (auto i : g) {
      mean += kept[i].energy;
      err = std::max(err, kept[i].error_estimate);
    }
    mean /= static_cast<double>(g.size());
    if (g.size() > 1) {
      result.warnings.push_back("cluster of " + std::to_string(g.size()) + " grid eigenvalues near " +
                                format_complex_token(mean) + " merged; Jordan structure not resolved");
    }
    result.entries.push_back({mean, static_cast<int>(g.size()), err});
  }
  result.normalize(t.eps_axis);
  return result;
}

}  // namespace

GridParams auto_grid_params(const Potential& v, double hbar, const GridResolution& res) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  const auto [a, b] = support(v);
  const double width = b - a;
  const double target = target_spacing(v, hbar, res);
  int cells_inside = 0;
  double h = target;
  if (width > 0.0) {
    cells_inside = cells_for(width, target);
    h = width / cells_inside;
  }
  const int pad_cells = static_cast<int>(std::ceil(padding_for(hbar, res.decay_min) / h));
  GridParams p;
  p.points = cells_inside + 2 * pad_cells - 1;
  p.half_width = 0.5 * (p.points + 1) * h;
  p.center = 0.5 * (a + b);
  p.eps_move = res.eps_move;
  p.eps_refine = res.eps_refine;
  p.eps_axis = res.eps_axis;
  return p;
}

TridiagonalComplexMatrix discretize(const Potential& v, double hbar, const GridParams& params) {
  if (params.points < 1 || !(params.half_width > 0.0)) throw InputError("grid needs L > 0 and N >= 1");
  const std::size_t n = static_cast<std::size_t>(params.points);
  const double h = params.spacing();
  const double kinetic = hbar * hbar / (h * h);
  TridiagonalComplexMatrix m;
  m.diagonal.resize(n);
  m.off_diagonal.assign(n - 1, Complex(-kinetic, 0.0));
  const double left = params.center - params.half_width;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = left + static_cast<double>(i + 1) * h;
    m.diagonal[i] = 2.0 * kinetic + node_value(v, x, h);
  }
  return m;
}

EigenSet find_eigenvalues_grid(const Potential& v, double hbar, const GridParams& params) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  if (params.points < 32) throw InputError("grid needs N >= 32");
  const auto [a, b] = support(v);
  if (a < params.center - params.half_width || b > params.center + params.half_width) {
    throw InputError("grid half-width must exceed the support radius of the potential");
  }
  const double h = params.spacing();
  // Enlarged domain: same h, an even number of extra cells on each side keeps
  // breakpoints on grid nodes.
  const int extra = 2 * static_cast<int>(std::ceil(0.125 * (params.points + 1)));
  const int enlarged_points = params.points + 2 * extra;

  const auto build = [&](int extent_points, int points) {
    GridParams p = params;
    p.half_width = 0.5 * (extent_points + 1) * h;
    p.points = points;
    return discretize(v, hbar, p);
  };
  const double resolved = hbar * params.max_phase_per_cell / h;
  const double padding = std::min(a - (params.center - params.half_width), params.center + params.half_width - b);
  const FilterThresholds t{params.eps_move,
                           params.eps_refine,
                           params.eps_axis,
                           params.cluster_radius,
                           resolved * resolved + max_modulus(v),
                           params.min_decay_exponent,
                           padding,
                           hbar};
  EigenSet result = filtered_spectrum(build, params.points, enlarged_points, t);
  result.hbar = hbar;
  result.solver = SolverTag::grid;
  return result;
}

double centrifugal_coefficient(int dimension, int l) {
  return (l + 0.5 * (dimension - 1)) * (l + 0.5 * (dimension - 3));
}

int harmonic_multiplicity(int d, int l) {
  if (d < 2 || l < 0) throw InputError("harmonic_multiplicity needs d >= 2 and l >= 0");
  const auto binom = [](int n, int k) -> long long {
    if (k < 0 || n < k) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  return static_cast<int>(binom(l + d - 1, d - 1) - binom(l + d - 3, d - 1));
}

Complex RadialChannel::effective(double r) const { return ltlab::eval(profile, r) + hbar * hbar * centrifugal / (r * r); }

RadialChannel radial_effective_problem(const RadialPotential& v, int l, double hbar) {
  if (l < 0 || l > v.l_max) throw InputError("angular momentum outside 0..l_max");
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  return {v.profile, centrifugal_coefficient(v.dimension, l), hbar};
}

TridiagonalComplexMatrix discretize_radial(const RadialChannel& channel, double outer, int points) {
  const std::size_t n = static_cast<std::size_t>(points);
  const double h = outer / (points + 1);
  const double kinetic = channel.hbar * channel.hbar / (h * h);
  TridiagonalComplexMatrix m;
  m.diagonal.resize(n);
  m.off_diagonal.assign(n - 1, Complex(-kinetic, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i + 1) * h;
    m.diagonal[i] = 2.0 * kinetic + node_value(channel.profile, r, h) +
                    channel.hbar * channel.hbar * channel.centrifugal / (r * r);
  }
  return m;
}

RadialGridParams auto_radial_params(const RadialPotential& v, double hbar, const GridResolution& res) {
  const auto [a, b] = support(v.profile);
  (void)a;
  const double target = target_spacing(v.profile, hbar, res);
  int cells_inside = 0;
  double h = target;
  if (b > 0.0) {
    cells_inside = cells_for(b, target);
    h = b / cells_inside;
  }
  const int pad_cells = static_cast<int>(std::ceil(padding_for(hbar, res.decay_min) / h));
  RadialGridParams p;
  p.points = cells_inside + pad_cells - 1;
  p.outer = (p.points + 1) * h;
  p.eps_move = res.eps_move;
  p.eps_refine = res.eps_refine;
  p.eps_axis = res.eps_axis;
  return p;
}

EigenSet find_channel_eigenvalues(const RadialChannel& channel, const RadialGridParams& params) {
  if (params.points < 32) throw InputError("grid needs N >= 32");
  const double h = params.outer / (params.points + 1);
  const int enlarged_points = params.points + static_cast<int>(std::ceil(0.5 * (params.points + 1)));
  const auto build = [&](int extent_points, int points) {
    return discretize_radial(channel, (extent_points + 1) * h, points);
  };
  const double resolved = channel.hbar * params.max_phase_per_cell / h;
  const FilterThresholds t{params.eps_move,
                           params.eps_refine,
                           params.eps_axis,
                           params.cluster_radius,
                           resolved * resolved + max_modulus(channel.profile),
                           params.min_decay_exponent,
                           params.outer - support(channel.profile).second,
                           channel.hbar};
  EigenSet result = filtered_spectrum(build, params.points, enlarged_points, t);
  result.hbar = channel.hbar;
  result.solver = SolverTag::radial;
  return result;
}

EigenSet find_eigenvalues_radial(const RadialPotential& v, double hbar, const RadialGridParams& params) {
  EigenSet result;
  result.hbar = hbar;
  result.solver = SolverTag::radial;
  for (int l = 0; l <= v.l_max; ++l) {
    const EigenSet channel = find_channel_eigenvalues(radial_effective_problem(v, l, hbar), params);
    const int degeneracy = harmonic_multiplicity(v.dimension, l);
    for (auto e : channel.entries) {
      e.multiplicity *= degeneracy;
      result.entries.push_back(e);
    }
    result.discarded_candidates += channel.discarded_candidates;
    for (const auto& w : channel.warnings) result.warnings.push_back("l=" + std::to_string(l) + ": " + w);
    if (l == v.l_max && !channel.entries.empty()) {
      result.warnings.push_back("channel l_max=" + std::to_string(l) +
                                " contributed eigenvalues; higher channels may be missing");
    }
  }
  // Equal energies from different channels are kept as separate entries.
  result.normalize(params.eps_axis);
  return result;
}

}  // namespace ltlab
