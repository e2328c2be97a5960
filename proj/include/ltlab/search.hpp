#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ltlab/config.hpp"
#include "ltlab/sweeps.hpp"

namespace ltlab {

enum class FamilyKind { step_heights, step_geometry };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

using Bounds = std::vector<std::pair<double, double>>;

/// step_heights: fixed breakpoints, parameters (re1, im1, ..., ren, imn).
/// step_geometry: pieces laid out from origin, parameters
/// (w1, ..., wn, re1, im1, ..., ren, imn) with widths w > 0.
struct PotentialFamily {
  FamilyKind kind = FamilyKind::step_heights;
  std::vector<double> breakpoints;
  int pieces = 1;
  double origin = 0.0;
  Bounds bounds;
  int dimension = 1;

  std::size_t parameter_count() const;
  void validate() const;
  StepPotential potential(std::span<const double> params) const;
};

/// Question-1 regime is sigma > d/2; other sigma are exploratory.
inline bool in_question_regime(double sigma, int dimension) { return sigma > 0.5 * dimension; }

struct ObjectiveSpec {
  double gamma = 1.0;
  double sigma = 1.0;
  double hbar = 0.1;
  SolverConfig solver;
};

/// dhk_sum(gamma, sigma) / (hbar^-d int |V|^(gamma + d/2)) for d = 1.
/// Zero-norm potentials are rejected.
double objective(const StepPotential& v, double gamma, double sigma, double hbar, const SolverConfig& solver = {},
                 std::uint64_t seed = kDefaultSeed);
double objective(const PotentialFamily& family, std::span<const double> params, const ObjectiveSpec& spec,
                 std::uint64_t seed = kDefaultSeed);

struct RestartSummary {
  std::vector<double> start;
  std::vector<double> best_params;
  double best_value = 0.0;
  int evaluations = 0;
};

struct SearchReport {
  std::vector<double> best_params;
  double best_value = 0.0;
  /// Best-so-far after each evaluation, restarts concatenated in index order.
  std::vector<double> trace;
  int evaluations = 0;
  std::uint64_t seed = kDefaultSeed;
  int best_restart = 0;
  std::vector<RestartSummary> restarts;

  bool operator==(const SearchReport&) const;
};

struct OptimizeOptions {
  int budget = 200;
  int restarts = 1;
  int workers = 1;
  std::uint64_t seed = kDefaultSeed;
  /// Relative simplex size at which a restart stops early.
  double tolerance = 1e-12;
};

/// Value returned to the optimizer when an evaluation throws.
inline constexpr double kFailurePenalty = -1e30;

/// Bounded Nelder-Mead maximiser. Restarts begin at seeded uniform points in
/// the bounds and split the budget; they run in parallel and the best wins,
/// ties going to the lowest restart index.
SearchReport optimize(const std::function<double(std::span<const double>)>& f, const Bounds& bounds,
                      const OptimizeOptions& options);
SearchReport optimize(const PotentialFamily& family, const ObjectiveSpec& spec, const OptimizeOptions& options);

/// Power-model fit of the objective over an hbar grid.
RateFit sweep_objective(const PotentialFamily& family, std::span<const double> params, double gamma, double sigma,
                        const HbarGrid& grid, const SolverConfig& solver = {}, int workers = 1,
                        std::uint64_t seed = kDefaultSeed);
RateFit sweep_objective(const StepPotential& v, double gamma, double sigma, const HbarGrid& grid,
                        const SolverConfig& solver = {}, int workers = 1, std::uint64_t seed = kDefaultSeed);

struct SearchConfig {
  PotentialFamily family;
  ObjectiveSpec objective;
  OptimizeOptions optimize;
  HbarGrid hbar;
  std::string output_directory;
  std::string output_stem = "search";
  json source = json::object();
};

/// Sweep schema plus 'family', 'objective', 'budget' and 'restarts'.
SearchConfig parse_search_config(const json& j);
SearchConfig load_search_config(const std::string& path);

json to_json(const SearchReport& report);
json step_potential_to_json(const StepPotential& v);

}  // namespace ltlab
