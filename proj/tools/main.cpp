// ltlab: eigenvalue sums of -hbar^2 Laplacian + V for complex V.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ltlab/config.hpp"
#include "ltlab/functionals.hpp"
#include "ltlab/search.hpp"
#include "ltlab/sweeps.hpp"

using namespace ltlab;

namespace {

constexpr int kUsageError = 1;
constexpr int kComputationError = 2;

// Potential flags shared by eigs and weyl.
struct PotentialFlags {
  std::string builtin_spec;
  std::string breakpoints;
  std::string values;
  std::string file;
  int radial = 0;
  int l_max = 0;

  void add(CLI::App* app) {
    app->add_option("--builtin", builtin_spec, "name:p1,p2,... e.g. bogli_stampach:1,1");
    app->add_option("--breakpoints", breakpoints, "step breakpoints x0,x1,...,xn");
    app->add_option("--values", values, "step values v1,...,vn as re+imi tokens");
    app->add_option("--potential", file, "JSON potential file (config schema)")->check(CLI::ExistingFile);
    app->add_option("--radial", radial, "treat the profile as radial in this dimension (>= 2)");
    app->add_option("--l-max", l_max, "highest angular momentum channel for --radial");
  }

  AnyPotential build() const {
    const int given = !builtin_spec.empty() + !breakpoints.empty() + !file.empty();
    if (given != 1) throw InputError("give exactly one of --builtin, --breakpoints/--values or --potential");
    json j;
    if (!file.empty()) {
      j = read_json_file(file);
      if (j.contains("potential")) j = j["potential"];
    } else if (!builtin_spec.empty()) {
      const auto colon = builtin_spec.find(':');
      j["builtin"] = builtin_spec.substr(0, colon);
      j["params"] = json::array();
      if (colon != std::string::npos) {
        std::stringstream in(builtin_spec.substr(colon + 1));
        std::string cell;
        while (std::getline(in, cell, ',')) j["params"].push_back(parse_complex_token(cell).real());
      }
    } else {
      json x = json::array(), v = json::array();
      std::stringstream xs(breakpoints), vs(values);
      std::string cell;
      while (std::getline(xs, cell, ',')) x.push_back(parse_complex_token(cell).real());
      while (std::getline(vs, cell, ',')) v.push_back(complex_to_json(parse_complex_token(cell)));
      j["steps"] = {{"breakpoints", x}, {"values", v}};
    }
    if (radial != 0) j["radial"] = {{"dimension", radial}, {"l_max", l_max}};
    return parse_potential(j, "potential");
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(parse_complex_token(cell).real());
  if (out.empty()) throw InputError("empty list '" + text + "'");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

json spec_to_json(const FunctionalSpec& s) {
  return {{"name", s.label()},
          {"kind", to_string(s.kind)},
          {"d", s.dimension},
          {"gamma", s.gamma},
          {"alpha", s.alpha},
          {"beta", s.beta},
          {"truncation", to_string(s.truncation)},
          {"threshold_form", to_string(s.threshold_form)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue sums for Schrodinger operators with complex potentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "schema_version " + std::to_string(kSchemaVersion));
  std::string out_dir = default_output_directory();

  // eigs
  auto* eigs_cmd = app.add_subcommand("eigs", "eigenvalues of -hbar^2 d^2/dx^2 + V as CSV");
  PotentialFlags eigs_potential;
  eigs_potential.add(eigs_cmd);
  double eigs_hbar = 1.0;
  std::string eigs_solver = "secular", eigs_output = "-", eigs_region;
  std::uint64_t eigs_seed = kDefaultSeed;
  eigs_cmd->add_option("--hbar", eigs_hbar, "semiclassical parameter")->required();
  eigs_cmd->add_option("--solver", eigs_solver, "secular, grid or radial");
  eigs_cmd->add_option("--region", eigs_region, "secular search box re_min,re_max,im_min,im_max");
  eigs_cmd->add_option("--seed", eigs_seed, "seed for contour retries");
  eigs_cmd->add_option("--output,-o", eigs_output, "output file, - for stdout");

  // sum
  auto* sum_cmd = app.add_subcommand("sum", "evaluate a functional on an eigenvalue table");
  std::string sum_eigs, sum_kind = "riesz", sum_truncation = "none", sum_form = "power", sum_case;
  double sum_gamma = 1.0, sum_sigma = 0.0, sum_kappa = 1.0, sum_alpha = 1.0, sum_beta = 1.0, sum_threshold = 0.0;
  int sum_d = 1;
  sum_cmd->add_option("--eigs", sum_eigs, "eigenvalue CSV from eigs, - for stdin")->required();
  sum_cmd->add_option("--kind", sum_kind, "riesz, cone, dhk or fs");
  sum_cmd->add_option("--case", sum_case, "use the parameters of case a-f (needs --d and --gamma)");
  sum_cmd->add_option("--gamma", sum_gamma);
  sum_cmd->add_option("--sigma", sum_sigma);
  sum_cmd->add_option("--kappa", sum_kappa);
  auto* alpha_opt = sum_cmd->add_option("--alpha", sum_alpha);
  auto* beta_opt = sum_cmd->add_option("--beta", sum_beta);
  sum_cmd->add_option("--d", sum_d);
  sum_cmd->add_option("--truncation", sum_truncation, "none, below or above");
  sum_cmd->add_option("--threshold-form", sum_form, "power (|E|^gamma vs T) or modulus (|E| vs T)");
  sum_cmd->add_option("--threshold", sum_threshold, "truncation threshold T");

  // constants
  auto* constants_cmd = app.add_subcommand("constants", "semiclassical constant L^cl_{gamma,d}");
  double const_gamma = 1.0;
  int const_d = 1;
  constants_cmd->add_option("--gamma", const_gamma)->required();
  constants_cmd->add_option("--d", const_d)->required();

  // weyl
  auto* weyl_cmd = app.add_subcommand("weyl", "Weyl ratio of a real potential over a list of hbar");
  PotentialFlags weyl_potential;
  weyl_potential.add(weyl_cmd);
  double weyl_gamma = 1.0;
  std::string weyl_hbar, weyl_solver = "secular", weyl_output = "-";
  std::uint64_t weyl_seed = kDefaultSeed;
  weyl_cmd->add_option("--gamma", weyl_gamma)->required();
  weyl_cmd->add_option("--hbar", weyl_hbar, "comma separated list")->required();
  weyl_cmd->add_option("--solver", weyl_solver);
  weyl_cmd->add_option("--seed", weyl_seed);
  weyl_cmd->add_option("--output,-o", weyl_output);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run an hbar sweep from a config file");
  std::string sweep_config;
  int sweep_workers = 0;
  std::uint64_t sweep_seed = 0;
  sweep_cmd->add_option("--config", sweep_config)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--workers", sweep_workers, "overrides the config");
  auto* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "overrides the config");
  sweep_cmd->add_option("--output-dir", out_dir, "overrides the config and LTLAB_OUTPUT_DIR");

  // search
  auto* search_cmd = app.add_subcommand("search", "counterexample search from a config file");
  std::string search_config;
  int search_workers = 0;
  std::uint64_t search_seed = 0;
  search_cmd->add_option("--config", search_config)->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--workers", search_workers, "overrides the config");
  auto* search_seed_opt = search_cmd->add_option("--seed", search_seed, "overrides the config");
  search_cmd->add_option("--output-dir", out_dir, "overrides the config and LTLAB_OUTPUT_DIR");

  // case
  auto* case_cmd = app.add_subcommand("case", "parameters of a known nonlocal bound");
  std::string case_id;
  int case_d = 1;
  double case_gamma = 1.0, case_alpha = 0.0, case_beta = 0.0;
  case_cmd->add_option("--id", case_id, "a-f")->required();
  case_cmd->add_option("--d", case_d)->required();
  case_cmd->add_option("--gamma", case_gamma)->required();
  auto* case_alpha_opt = case_cmd->add_option("--alpha", case_alpha);
  auto* case_beta_opt = case_cmd->add_option("--beta", case_beta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  const bool out_dir_flag = (sweep_cmd->parsed() && sweep_cmd->count("--output-dir")) ||
                            (search_cmd->parsed() && search_cmd->count("--output-dir"));
  try {
    if (eigs_cmd->parsed()) {
      const auto v = eigs_potential.build();
      SolverConfig solver;
      solver.kind = solver_tag_from_string(eigs_solver);
      if (!eigs_region.empty()) {
        const auto r = parse_list(eigs_region);
        if (r.size() != 4) throw InputError("--region expects re_min,re_max,im_min,im_max");
        solver.region = SearchRegion{r[0], r[1], r[2], r[3]};
      }
      const auto outcome = solve(v, eigs_hbar, solver, eigs_seed);
      for (const auto& w : outcome.eigs.warnings) std::cerr << "warning: " << w << '\n';
      write_text(eigs_output, to_csv(outcome.eigs));
    } else if (sum_cmd->parsed()) {
      const auto eigs = eigenset_from_csv(read_text(sum_eigs));
      FunctionalSpec spec;
      if (!sum_case.empty()) {
        if (sum_case.size() != 1) throw InputError("--case expects one of a-f");
        spec = case_table(sum_case[0], sum_d, sum_gamma, alpha_opt->count() ? std::optional(sum_alpha) : std::nullopt,
                          beta_opt->count() ? std::optional(sum_beta) : std::nullopt);
        if (sum_cmd->count("--threshold-form")) spec.threshold_form = threshold_form_from_string(sum_form);
      } else {
        spec.kind = functional_kind_from_string(sum_kind);
        spec.gamma = sum_gamma;
        spec.sigma = sum_sigma;
        spec.kappa = sum_kappa;
        spec.alpha = sum_alpha;
        spec.beta = sum_beta;
        spec.dimension = sum_d;
        spec.truncation = truncation_from_string(sum_truncation);
        spec.threshold_form = threshold_form_from_string(sum_form);
      }
      spec.validate();
      double value = 0.0;
      switch (spec.kind) {
        case FunctionalKind::riesz:
          value = riesz_mean(eigs, spec.gamma);
          break;
        case FunctionalKind::cone:
          value = cone_sum(eigs, spec.gamma, spec.kappa);
          break;
        case FunctionalKind::dhk:
          value = dhk_sum(eigs, spec.gamma, spec.sigma);
          break;
        case FunctionalKind::fs:
          value = fs_sum(eigs, spec.alpha, spec.beta, spec.truncation, sum_threshold, spec.gamma, spec.threshold_form);
          break;
        default:
          throw InputError("sum supports riesz, cone, dhk and fs; weyl and dhk_ratio need the potential");
      }
      std::cout << format_double(value) << '\n';
    } else if (constants_cmd->parsed()) {
      std::cout << format_double(semiclassical_constant(const_gamma, const_d)) << '\n';
    } else if (weyl_cmd->parsed()) {
      const auto v = weyl_potential.build();
      SolverConfig solver;
      solver.kind = solver_tag_from_string(weyl_solver);
      FunctionalSpec spec;
      spec.kind = FunctionalKind::weyl;
      spec.gamma = weyl_gamma;
      spec.dimension = dimension_of(v);
      std::ostringstream out;
      out << "hbar,n_eigs,weyl_ratio\n";
      const auto hbars = parse_list(weyl_hbar);
      for (std::size_t k = 0; k < hbars.size(); ++k) {
        const auto outcome = solve(v, hbars[k], solver, point_seed(weyl_seed, k));
        out << format_double(hbars[k]) << ',' << outcome.eigs.total_multiplicity() << ','
            << format_double(evaluate(spec, outcome.eigs, v, hbars[k])) << '\n';
      }
      write_text(weyl_output, out.str());
    } else if (sweep_cmd->parsed()) {
      auto config = load_sweep_config(sweep_config);
      if (sweep_workers > 0) config.workers = sweep_workers;
      if (sweep_seed_opt->count()) config.seed = sweep_seed, config.source["seed"] = sweep_seed;
      if (out_dir_flag) config.output_directory = out_dir;
      const auto result = run_sweep(config);
      std::filesystem::create_directories(config.output_directory);
      const auto base = std::filesystem::path(config.output_directory) / config.output_stem;
      persist(result, base.string() + ".csv");
      json fits = json::object();
      for (std::size_t k = 0; k < result.functionals.size(); ++k) {
        std::optional<RateFit> fit;
        try {
          fit = fit_rate(result, k, config.fit.model, config.fit.window);
          fits[result.functionals[k]] = to_json(*fit);
        } catch (const InputError& e) {
          fits[result.functionals[k]] = {{"error", e.what()}};
          std::cerr << "warning: no fit for " << result.functionals[k] << ": " << e.what() << '\n';
        }
        write_text(base.string() + "_" + result.functionals[k] + ".svg", plot_svg(result, k, fit));
      }
      json summary = {{"schema_version", kSchemaVersion}, {"config_hash", result.config_hash},
                      {"gaps", result.gaps()},            {"gap_fraction", result.gap_fraction()},
                      {"fits", fits}};
      write_text(base.string() + "_fits.json", summary.dump(1) + "\n");
      for (const auto& r : result.records) {
        if (!r.ok) std::cerr << "warning: gap at hbar=" << format_double(r.hbar) << ": " << r.error << '\n';
      }
      std::cout << base.string() << ".csv\n";
      if (result.gap_fraction() > kMaxGapFraction) {
        std::cerr << "error: " << result.gaps() << " of " << result.records.size() << " hbar points failed\n";
        return kComputationError;
      }
    } else if (search_cmd->parsed()) {
      auto config = load_search_config(search_config);
      if (search_workers > 0) config.optimize.workers = search_workers;
      if (search_seed_opt->count()) config.optimize.seed = search_seed;
      if (out_dir_flag) config.output_directory = out_dir;
      const auto report = optimize(config.family, config.objective, config.optimize);
      auto j = to_json(report);
      const auto best = config.family.potential(report.best_params);
      j["best_potential"] = step_potential_to_json(best);
      j["objective"] = {{"gamma", config.objective.gamma},
                        {"sigma", config.objective.sigma},
                        {"hbar", config.objective.hbar},
                        {"question_regime", in_question_regime(config.objective.sigma, config.family.dimension)}};
      try {
        const auto fit = sweep_objective(best, config.objective.gamma, config.objective.sigma, config.hbar,
                                         config.objective.solver, config.optimize.workers, config.optimize.seed);
        j["sweep_fit"] = to_json(fit);
      } catch (const std::exception& e) {
        j["sweep_fit"] = {{"error", e.what()}};
      }
      std::filesystem::create_directories(config.output_directory);
      const auto path = (std::filesystem::path(config.output_directory) / (config.output_stem + ".json")).string();
      write_text(path, j.dump(1) + "\n");
      if (!in_question_regime(config.objective.sigma, config.family.dimension)) {
        std::cerr << "note: sigma <= d/2 lies outside the Question-1 regime\n";
      }
      std::cout << path << '\n';
    } else if (case_cmd->parsed()) {
      if (case_id.size() != 1) throw InputError("--id expects one of a-f");
      const auto spec =
          case_table(case_id[0], case_d, case_gamma, case_alpha_opt->count() ? std::optional(case_alpha) : std::nullopt,
                     case_beta_opt->count() ? std::optional(case_beta) : std::nullopt);
      std::cout << spec_to_json(spec).dump(1) << '\n';
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputationError;
  }
  return 0;
}
