#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltlab/config.hpp"

namespace ltlab {

enum class RateModel { power, power_log };

std::string to_string(RateModel model);
RateModel rate_model_from_string(const std::string& name);

struct FitConfig {
  RateModel model = RateModel::power;
  /// [hbar_lo, hbar_hi]; the smallest half of the grid when unset.
  std::optional<std::pair<double, double>> window;
};

struct SweepConfig {
  AnyPotential potential = Potential{};
  SolverConfig solver;
  HbarGrid hbar;
  std::vector<FunctionalSpec> functionals;
  FitConfig fit;
  std::string output_directory;
  std::string output_stem = "sweep";
  int workers = 1;
  std::uint64_t seed = kDefaultSeed;
  /// The parsed document; hashed into results.
  json source = json::object();
};

/// Reads the sweep schema (see README). Errors name the field.
SweepConfig parse_sweep_config(const json& j);
SweepConfig load_sweep_config(const std::string& path);

struct SweepRecord {
  double hbar = 0.0;
  /// False for a gap: the solver or a functional failed at this hbar.
  bool ok = true;
  std::string error;
  int n_eigs = 0;
  std::vector<double> values;
  SearchRegion region;
  int discarded = 0;
  int warnings = 0;
  std::vector<EigenEntry> eigenvalues;

  bool operator==(const SweepRecord&) const;
};

struct SweepResult {
  std::string solver;
  std::string config_hash;
  std::vector<std::string> functionals;
  /// Sorted by descending hbar.
  std::vector<SweepRecord> records;

  int gaps() const;
  double gap_fraction() const;
  bool operator==(const SweepResult&) const;
};

/// Max share of failed hbar points for a usable sweep.
inline constexpr double kMaxGapFraction = 0.2;

/// Seed of the k-th grid point; independent of scheduling.
std::uint64_t point_seed(std::uint64_t seed, std::size_t index);

/// Solves every grid point on `workers` threads. Failures become gaps; throws
/// ComputationError when every point fails.
SweepResult run_sweep(const SweepConfig& config);

struct RateFit {
  RateModel model = RateModel::power;
  double p = 0.0;  ///< value ~ c hbar^-p log(1/hbar)^q
  double q = 0.0;
  double c = 0.0;
  double r_squared = 0.0;
  double hbar_lo = 0.0;
  double hbar_hi = 0.0;
  int points = 0;
};

/// Least squares of log S against log(1/hbar) (and log log(1/hbar) for
/// power_log) over the points with hbar in the window.
RateFit fit_rate(const std::vector<double>& hbar, const std::vector<double>& values, RateModel model,
                 std::optional<std::pair<double, double>> window = std::nullopt);
/// Gaps are skipped.
RateFit fit_rate(const SweepResult& result, std::size_t functional_index, RateModel model = RateModel::power,
                 std::optional<std::pair<double, double>> window = std::nullopt);

/// Smallest half of a grid (at least three points when available).
std::pair<double, double> default_fit_window(std::vector<double> hbar);

json to_json(const RateFit& fit);

/// CSV at path plus a JSON sidecar (path with extension .json) holding the
/// eigenvalue lists.
void persist(const SweepResult& result, const std::string& csv_path);
SweepResult load(const std::string& csv_path);

std::string sidecar_path(const std::string& csv_path);
std::string to_csv(const SweepResult& result);

/// Log-log plot of value against 1/hbar with the fitted line.
std::string plot_svg(const SweepResult& result, std::size_t functional_index, const std::optional<RateFit>& fit);

}  // namespace ltlab
