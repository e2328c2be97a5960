#include "ltlab/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <thread>

namespace ltlab {

std::string to_string(FamilyKind kind) {
  return kind == FamilyKind::step_heights ? "step_heights" : "step_geometry";
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "step_heights") return FamilyKind::step_heights;
  if (name == "step_geometry") return FamilyKind::step_geometry;
  throw InputError("unknown family '" + name + "' (expected step_heights or step_geometry)");
}

std::size_t PotentialFamily::parameter_count() const {
  if (kind == FamilyKind::step_heights) return breakpoints.empty() ? 0 : 2 * (breakpoints.size() - 1);
  return 3 * static_cast<std::size_t>(std::max(pieces, 0));
}

void PotentialFamily::validate() const {
  if (dimension != 1) throw InputError("search families are one-dimensional (dimension must be 1)");
  if (kind == FamilyKind::step_heights) {
    if (breakpoints.size() < 2) throw InputError("step_heights family needs at least two breakpoints");
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
      if (!(breakpoints[k] < breakpoints[k + 1])) throw InputError("step_heights breakpoints must increase strictly");
    }
  } else if (pieces < 1) {
    throw InputError("step_geometry family needs pieces >= 1");
  }
  if (bounds.size() != parameter_count()) {
    throw InputError("family has " + std::to_string(parameter_count()) + " parameters but " +
                     std::to_string(bounds.size()) + " bounds");
  }
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (!(std::isfinite(bounds[k].first) && std::isfinite(bounds[k].second) && bounds[k].first < bounds[k].second)) {
      throw InputError("bound " + std::to_string(k) + " must be finite with lo < hi");
    }
    if (kind == FamilyKind::step_geometry && k < static_cast<std::size_t>(pieces) && !(bounds[k].first > 0.0)) {
      throw InputError("width bound " + std::to_string(k) + " must have lo > 0");
    }
  }
}

StepPotential PotentialFamily::potential(std::span<const double> params) const {
  if (params.size() != parameter_count()) {
    throw InputError("family expects " + std::to_string(parameter_count()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  std::vector<Complex> values;
  if (kind == FamilyKind::step_heights) {
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) values.emplace_back(params[2 * j], params[2 * j + 1]);
    return StepPotential(breakpoints, values);
  }
  std::vector<double> x{origin};
  for (int j = 0; j < pieces; ++j) {
    if (!(params[j] > 0.0)) throw InputError("step_geometry widths must be positive");
    x.push_back(x.back() + params[j]);
  }
  for (int j = 0; j < pieces; ++j) values.emplace_back(params[pieces + 2 * j], params[pieces + 2 * j + 1]);
  return StepPotential(x, values);
}

double objective(const StepPotential& v, double gamma, double sigma, double hbar, const SolverConfig& solver,
                 std::uint64_t seed) {
  const Potential p = v;
  if (!(lp_power_integral(p, gamma + 0.5) > 0.0)) throw InputError("objective: zero-norm potential");
  FunctionalSpec spec;
  spec.kind = FunctionalKind::dhk_ratio;
  spec.gamma = gamma;
  spec.sigma = sigma;
  const auto outcome = solve(p, hbar, solver, seed);
  return evaluate(spec, outcome.eigs, p, hbar);
}

double objective(const PotentialFamily& family, std::span<const double> params, const ObjectiveSpec& spec,
                 std::uint64_t seed) {
  return objective(family.potential(params), spec.gamma, spec.sigma, spec.hbar, spec.solver, seed);
}

bool SearchReport::operator==(const SearchReport& o) const {
  if (best_params != o.best_params || best_value != o.best_value || trace != o.trace ||
      evaluations != o.evaluations || seed != o.seed || best_restart != o.best_restart ||
      restarts.size() != o.restarts.size()) {
    return false;
  }
  for (std::size_t k = 0; k < restarts.size(); ++k) {
    const auto& a = restarts[k];
    const auto& b = o.restarts[k];
    if (a.start != b.start || a.best_params != b.best_params || a.best_value != b.best_value ||
        a.evaluations != b.evaluations) {
      return false;
    }
  }
  return true;
}

namespace {

using Objective = std::function<double(std::span<const double>)>;

struct RestartRun {
  RestartSummary summary;
  std::vector<double> trace;
};

// One Nelder-Mead run maximising f from start, within bounds.
RestartRun nelder_mead(const Objective& f, const Bounds& bounds, std::vector<double> start, int budget,
                       double tolerance) {
  const std::size_t n = bounds.size();
  RestartRun run;
  run.summary.start = start;
  run.summary.best_value = -std::numeric_limits<double>::infinity();

  const auto clamp = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], bounds[i].first, bounds[i].second);
    return x;
  };
  const auto eval = [&](const std::vector<double>& x) -> std::optional<double> {
    if (run.summary.evaluations >= budget) return std::nullopt;
    double value;
    try {
      value = f(x);
      if (std::isnan(value)) value = kFailurePenalty;
    } catch (const std::exception&) {
      value = kFailurePenalty;
    }
    ++run.summary.evaluations;
    if (value > run.summary.best_value) {
      run.summary.best_value = value;
      run.summary.best_params = x;
    }
    run.trace.push_back(run.summary.best_value);
    return value;
  };

  struct Vertex {
    std::vector<double> x;
    double value;
  };
  std::vector<Vertex> simplex;
  start = clamp(start);
  if (const auto v = eval(start)) {
    simplex.push_back({start, *v});
  } else {
    return run;
  }
  // Rebuilds the simplex around simplex[0] with steps of rel times each range.
  const auto rebuild = [&](double rel) {
    simplex.resize(1);
    const auto centre = simplex[0].x;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = centre;
      const double step = rel * (bounds[i].second - bounds[i].first);
      x[i] = x[i] + step <= bounds[i].second ? x[i] + step : x[i] - step;
      const auto v = eval(x);
      if (!v) return false;
      simplex.push_back({x, *v});
    }
    return true;
  };
  if (!rebuild(0.1)) return run;

  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.value > b.value; };
  double settled = -std::numeric_limits<double>::infinity();
  while (run.summary.evaluations < budget) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    const Vertex& best = simplex.front();
    double spread = 0.0, size = 0.0;
    bool flat = false;  // some coordinate has collapsed, usually onto a bound
    for (std::size_t i = 0; i < n; ++i) {
      const double range = bounds[i].second - bounds[i].first;
      double lo = best.x[i], hi = best.x[i];
      for (const auto& v : simplex) {
        lo = std::min(lo, v.x[i]);
        hi = std::max(hi, v.x[i]);
      }
      size = std::max(size, (hi - lo) / range);
      if (n > 1 && hi - lo <= 1e-12 * range) flat = true;
    }
    for (const auto& v : simplex) spread = std::max(spread, std::abs(v.value - best.value));
    const bool converged = spread <= tolerance * (std::abs(best.value) + 1e-300) && size <= tolerance;
    if (converged) {
      // Stop once a restart from the converged point brings nothing new.
      if (!(best.value > settled)) break;
      settled = best.value;
      if (!rebuild(std::max(10 * tolerance, 1e-6))) break;
      continue;
    }
    if (flat) {
      if (!rebuild(std::max(size, 1e-3))) break;
      continue;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i] / static_cast<double>(n);
    }
    const auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex.back().x[i] - centroid[i]);
      return clamp(x);
    };
    const auto reflected = along(-1.0);
    const auto fr = eval(reflected);
    if (!fr) break;
    if (*fr > simplex.front().value) {
      const auto expanded = along(-2.0);
      const auto fe = eval(expanded);
      if (!fe) break;
      simplex.back() = *fe > *fr ? Vertex{expanded, *fe} : Vertex{reflected, *fr};
      continue;
    }
    if (*fr > simplex[n - 1].value) {
      simplex.back() = {reflected, *fr};
      continue;
    }
    const bool outside = *fr > simplex.back().value;
    const auto contracted = along(outside ? -0.5 : 0.5);
    const auto fc = eval(contracted);
    if (!fc) break;
    if (*fc > std::max(outside ? *fr : simplex.back().value, simplex.back().value)) {
      simplex.back() = {contracted, *fc};
      continue;
    }
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = simplex[0].x[i] + 0.5 * (simplex[k].x[i] - simplex[0].x[i]);
      x = clamp(x);
      const auto v = eval(x);
      if (!v) return run;
      simplex[k] = {x, *v};
    }
  }
  return run;
}

}  // namespace

SearchReport optimize(const Objective& f, const Bounds& bounds, const OptimizeOptions& options) {
  if (options.budget < 10) throw InputError("optimize needs a budget of at least 10 evaluations");
  if (options.restarts < 1) throw InputError("optimize needs at least one restart");
  if (bounds.empty()) throw InputError("optimize needs at least one parameter");
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw InputError("optimize needs bounds with lo < hi");
  }
  const int restarts = std::min(options.restarts, options.budget);

  std::vector<std::vector<double>> starts;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x;
    for (const auto& [lo, hi] : bounds) x.push_back(lo + (hi - lo) * unit(rng));
    starts.push_back(std::move(x));
  }

  std::vector<RestartRun> runs(restarts);
  const auto run_one = [&](int r) {
    const int share = options.budget / restarts + (r < options.budget % restarts ? 1 : 0);
    runs[r] = nelder_mead(f, bounds, starts[r], share, options.tolerance);
  };
  const int workers = std::clamp(options.workers, 1, restarts);
  if (workers == 1) {
    for (int r = 0; r < restarts; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < restarts; r = next++) run_one(r);
      });
    }
  }

  SearchReport report;
  report.seed = options.seed;
  report.best_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    const auto& run = runs[r];
    if (run.summary.evaluations > 0 && run.summary.best_value > report.best_value) {
      report.best_value = run.summary.best_value;
      report.best_params = run.summary.best_params;
      report.best_restart = r;
    }
    for (const double v : run.trace) {
      report.trace.push_back(report.trace.empty() ? v : std::max(report.trace.back(), v));
    }
    report.evaluations += run.summary.evaluations;
    report.restarts.push_back(run.summary);
  }
  if (report.best_value <= kFailurePenalty) throw ComputationError("optimize: every evaluation failed");
  return report;
}

SearchReport optimize(const PotentialFamily& family, const ObjectiveSpec& spec, const OptimizeOptions& options) {
  family.validate();
  const auto f = [&](std::span<const double> x) { return objective(family, x, spec, options.seed); };
  return optimize(f, family.bounds, options);
}

RateFit sweep_objective(const StepPotential& v, double gamma, double sigma, const HbarGrid& grid,
                        const SolverConfig& solver, int workers, std::uint64_t seed) {
  if (!(lp_power_integral(Potential(v), gamma + 0.5) > 0.0)) throw InputError("objective: zero-norm potential");
  SweepConfig config;
  config.potential = Potential(v);
  config.solver = solver;
  config.hbar = grid;
  FunctionalSpec spec;
  spec.kind = FunctionalKind::dhk_ratio;
  spec.gamma = gamma;
  spec.sigma = sigma;
  config.functionals = {spec};
  config.workers = workers;
  config.seed = seed;
  const auto result = run_sweep(config);
  return fit_rate(result, 0, RateModel::power);
}

RateFit sweep_objective(const PotentialFamily& family, std::span<const double> params, double gamma, double sigma,
                        const HbarGrid& grid, const SolverConfig& solver, int workers, std::uint64_t seed) {
  return sweep_objective(family.potential(params), gamma, sigma, grid, solver, workers, seed);
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InputError("config field '" + field + "': " + what);
}

double number_at(const json& j, const std::string& key, const std::string& field) {
  if (!j.contains(key)) field_error(field + "." + key, "missing");
  if (!j[key].is_number()) field_error(field + "." + key, "expected a number");
  return j[key].get<double>();
}

}  // namespace

SearchConfig parse_search_config(const json& j) {
  check_schema_version(j, "search config");
  static const std::set<std::string> keys = {"schema_version", "family", "objective", "budget", "restarts",
                                             "hbar",           "solver", "output",    "workers", "seed"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!keys.count(key)) field_error(key, "unknown key");
  }
  SearchConfig config;
  if (!j.contains("family") || !j["family"].is_object()) field_error("family", "missing or not an object");
  const json& fam = j["family"];
  if (!fam.contains("kind") || !fam["kind"].is_string()) field_error("family.kind", "missing or not a string");
  try {
    config.family.kind = family_kind_from_string(fam["kind"].get<std::string>());
  } catch (const InputError& e) {
    field_error("family.kind", e.what());
  }
  if (config.family.kind == FamilyKind::step_heights) {
    if (!fam.contains("breakpoints") || !fam["breakpoints"].is_array()) {
      field_error("family.breakpoints", "missing or not an array");
    }
    for (const auto& x : fam["breakpoints"]) {
      if (!x.is_number()) field_error("family.breakpoints", "expected numbers");
      config.family.breakpoints.push_back(x.get<double>());
    }
  } else {
    if (!fam.contains("pieces") || !fam["pieces"].is_number_integer()) field_error("family.pieces", "expected an integer");
    config.family.pieces = fam["pieces"].get<int>();
    if (fam.contains("origin")) config.family.origin = number_at(fam, "origin", "family");
  }
  if (fam.contains("dimension")) {
    if (!fam["dimension"].is_number_integer()) field_error("family.dimension", "expected an integer");
    config.family.dimension = fam["dimension"].get<int>();
  }
  if (!fam.contains("bounds") || !fam["bounds"].is_array()) field_error("family.bounds", "missing or not an array");
  for (std::size_t k = 0; k < fam["bounds"].size(); ++k) {
    const json& b = fam["bounds"][k];
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
      field_error("family.bounds[" + std::to_string(k) + "]", "expected [lo, hi]");
    }
    config.family.bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
  }
  try {
    config.family.validate();
  } catch (const InputError& e) {
    field_error("family", e.what());
  }

  if (!j.contains("objective") || !j["objective"].is_object()) field_error("objective", "missing or not an object");
  config.objective.gamma = number_at(j["objective"], "gamma", "objective");
  config.objective.sigma = number_at(j["objective"], "sigma", "objective");
  config.objective.hbar = number_at(j["objective"], "hbar", "objective");
  if (!(config.objective.gamma >= 0.0)) field_error("objective.gamma", "must be >= 0");
  if (!(config.objective.sigma >= 0.0)) field_error("objective.sigma", "must be >= 0");
  if (!(config.objective.hbar > 0.0 && config.objective.hbar <= 1.0)) field_error("objective.hbar", "must lie in (0, 1]");
  if (j.contains("solver")) config.objective.solver = parse_solver(j["solver"]);
  if (config.objective.solver.kind != SolverTag::secular && config.objective.solver.kind != SolverTag::grid) {
    field_error("solver.kind", "search needs the secular or grid solver");
  }

  if (j.contains("budget")) {
    if (!j["budget"].is_number_integer() || j["budget"].get<int>() < 10) field_error("budget", "expected an integer >= 10");
    config.optimize.budget = j["budget"].get<int>();
  }
  config.optimize.restarts = 4;
  if (j.contains("restarts")) {
    if (!j["restarts"].is_number_integer() || j["restarts"].get<int>() < 1) {
      field_error("restarts", "expected an integer >= 1");
    }
    config.optimize.restarts = j["restarts"].get<int>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 1) field_error("workers", "expected an integer >= 1");
    config.optimize.workers = j["workers"].get<int>();
  }
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      field_error("seed", "expected a nonnegative integer");
    }
    config.optimize.seed = j["seed"].get<std::uint64_t>();
  }
  if (!j.contains("hbar")) field_error("hbar", "missing");
  config.hbar = parse_hbar_grid(j["hbar"]);
  config.output_directory = default_output_directory();
  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) field_error("output", "expected an object");
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) field_error("output.directory", "expected a string");
      config.output_directory = o["directory"].get<std::string>();
    }
    if (o.contains("stem")) {
      if (!o["stem"].is_string() || o["stem"].get<std::string>().empty()) field_error("output.stem", "expected a nonempty string");
      config.output_stem = o["stem"].get<std::string>();
    }
  }
  config.source = j;
  return config;
}

SearchConfig load_search_config(const std::string& path) { return parse_search_config(read_json_file(path)); }

json step_potential_to_json(const StepPotential& v) {
  json values = json::array();
  for (const auto& z : v.values()) values.push_back(complex_to_json(z));
  return {{"steps", {{"breakpoints", v.breakpoints()}, {"values", values}}}};
}

json to_json(const SearchReport& report) {
  json restarts = json::array();
  for (const auto& r : report.restarts) {
    restarts.push_back({{"start", r.start},
                        {"best_params", r.best_params},
                        {"best_value", r.best_value},
                        {"evaluations", r.evaluations}});
  }
  return {{"schema_version", kSchemaVersion}, {"seed", report.seed},
          {"best_params", report.best_params}, {"best_value", report.best_value},
          {"best_restart", report.best_restart}, {"evaluations", report.evaluations},
          {"trace", report.trace},             {"restarts", restarts}};
}

}  // namespace ltlab
