#include "ltlab/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

namespace ltlab {

std::string to_string(RateModel model) { return model == RateModel::power ? "power" : "power_log"; }

RateModel rate_model_from_string(const std::string& name) {
  if (name == "power") return RateModel::power;
  if (name == "power_log") return RateModel::power_log;
  throw InputError("unknown fit model '" + name + "' (expected power or power_log)");
}

namespace {

const std::set<std::string> kSweepKeys = {"schema_version", "potential", "solver", "hbar", "functionals",
                                          "fit",            "output",    "workers", "seed"};

// Keys that do not change computed values; left out of the hash.
const std::set<std::string> kUnhashedKeys = {"workers", "output"};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InputError("config field '" + field + "': " + what);
}

}  // namespace

SweepConfig parse_sweep_config(const json& j) {
  check_schema_version(j, "sweep config");
  SweepConfig config;
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kSweepKeys.count(key) && key != "family" && key != "budget" && key != "objective" && key != "restarts") {
      field_error(key, "unknown key");
    }
  }
  if (!j.contains("potential")) field_error("potential", "missing");
  config.potential = parse_potential(j["potential"]);
  if (j.contains("solver")) config.solver = parse_solver(j["solver"]);
  if (!j.contains("hbar")) field_error("hbar", "missing");
  config.hbar = parse_hbar_grid(j["hbar"]);

  const int d = dimension_of(config.potential);
  const bool real = std::visit([](const auto& v) { return is_real(v); }, config.potential);
  if (j.contains("functionals")) {
    if (!j["functionals"].is_array()) field_error("functionals", "expected an array");
    std::set<std::string> labels;
    for (std::size_t k = 0; k < j["functionals"].size(); ++k) {
      const std::string field = "functionals[" + std::to_string(k) + "]";
      auto spec = parse_functional(j["functionals"][k], d, field);
      if (spec.kind == FunctionalKind::weyl && !real) field_error(field, "weyl needs a real-valued potential");
      const std::string label = spec.label();
      if (label.find_first_of(",\"\n") != std::string::npos) field_error(field + ".name", "must not contain , or \"");
      if (!labels.insert(label).second) field_error(field, "duplicate column '" + label + "'");
      config.functionals.push_back(std::move(spec));
    }
  }
  if (j.contains("fit")) {
    const json& f = j["fit"];
    if (!f.is_object()) field_error("fit", "expected an object");
    if (f.contains("model")) {
      if (!f["model"].is_string()) field_error("fit.model", "expected a string");
      try {
        config.fit.model = rate_model_from_string(f["model"].get<std::string>());
      } catch (const InputError& e) {
        field_error("fit.model", e.what());
      }
    }
    if (f.contains("window")) {
      const json& w = f["window"];
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number() ||
          !(w[0].get<double>() < w[1].get<double>())) {
        field_error("fit.window", "expected [hbar_lo, hbar_hi] with hbar_lo < hbar_hi");
      }
      config.fit.window = std::pair{w[0].get<double>(), w[1].get<double>()};
    }
  }
  config.output_directory = default_output_directory();
  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) field_error("output", "expected an object");
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) field_error("output.directory", "expected a string");
      config.output_directory = o["directory"].get<std::string>();
    }
    if (o.contains("stem")) {
      if (!o["stem"].is_string() || o["stem"].get<std::string>().empty()) {
        field_error("output.stem", "expected a nonempty string");
      }
      config.output_stem = o["stem"].get<std::string>();
    }
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 1) field_error("workers", "expected an integer >= 1");
    config.workers = j["workers"].get<int>();
  }
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      field_error("seed", "expected a nonnegative integer");
    }
    config.seed = j["seed"].get<std::uint64_t>();
  }
  config.source = j;
  return config;
}

SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(read_json_file(path)); }

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

json hashed_part(const json& source) {
  json out = json::object();
  for (const auto& [key, value] : source.items()) {
    if (!kUnhashedKeys.count(key)) out[key] = value;
  }
  return out;
}

}  // namespace

bool SweepRecord::operator==(const SweepRecord& o) const {
  if (!same(hbar, o.hbar) || ok != o.ok || error != o.error || n_eigs != o.n_eigs || discarded != o.discarded ||
      warnings != o.warnings || values.size() != o.values.size() || eigenvalues.size() != o.eigenvalues.size()) {
    return false;
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!same(values[k], o.values[k])) return false;
  }
  if (!same(region.re_min, o.region.re_min) || !same(region.re_max, o.region.re_max) ||
      !same(region.im_min, o.region.im_min) || !same(region.im_max, o.region.im_max)) {
    return false;
  }
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    const auto& a = eigenvalues[k];
    const auto& b = o.eigenvalues[k];
    if (a.energy != b.energy || a.multiplicity != b.multiplicity || !same(a.error_estimate, b.error_estimate)) {
      return false;
    }
  }
  return true;
}

int SweepResult::gaps() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok; }));
}

double SweepResult::gap_fraction() const {
  return records.empty() ? 0.0 : static_cast<double>(gaps()) / static_cast<double>(records.size());
}

bool SweepResult::operator==(const SweepResult& o) const {
  return solver == o.solver && config_hash == o.config_hash && functionals == o.functionals && records == o.records;
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 step
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SweepResult run_sweep(const SweepConfig& config) {
  const auto grid = config.hbar.values();
  SweepResult result;
  result.solver = to_string(config.solver.kind);
  result.config_hash = config_hash(hashed_part(config.source));
  for (const auto& f : config.functionals) result.functionals.push_back(f.label());
  result.records.resize(grid.size());

  const auto run_point = [&](std::size_t k) {
    SweepRecord& record = result.records[k];
    record.hbar = grid[k];
    try {
      const auto outcome = solve(config.potential, grid[k], config.solver, point_seed(config.seed, k));
      record.n_eigs = outcome.eigs.total_multiplicity();
      record.region = outcome.region;
      record.discarded = outcome.eigs.discarded_candidates;
      record.warnings = static_cast<int>(outcome.eigs.warnings.size());
      record.eigenvalues = outcome.eigs.entries;
      for (const auto& f : config.functionals) record.values.push_back(evaluate(f, outcome.eigs, config.potential, grid[k]));
    } catch (const std::exception& e) {
      record = SweepRecord{};
      record.hbar = grid[k];
      record.ok = false;
      record.error = e.what();
      record.values.assign(config.functionals.size(), std::numeric_limits<double>::quiet_NaN());
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, grid.size());
  if (workers == 1) {
    for (std::size_t k = 0; k < grid.size(); ++k) run_point(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) run_point(k);
      });
    }
  }
  if (result.gaps() == static_cast<int>(result.records.size())) {
    throw ComputationError("every hbar point failed; first error: " + result.records.front().error);
  }
  return result;
}

std::pair<double, double> default_fit_window(std::vector<double> hbar) {
  if (hbar.empty()) throw InputError("empty hbar grid");
  std::sort(hbar.begin(), hbar.end());
  std::size_t count = (hbar.size() + 1) / 2;
  count = std::min(hbar.size(), std::max<std::size_t>(count, 3));
  return {hbar.front(), hbar[count - 1]};
}

RateFit fit_rate(const std::vector<double>& hbar, const std::vector<double>& values, RateModel model,
                 std::optional<std::pair<double, double>> window) {
  if (hbar.size() != values.size()) throw InputError("fit_rate: hbar and value lists differ in length");
  const auto [lo, hi] = window ? *window : default_fit_window(hbar);
  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 0; k < hbar.size(); ++k) {
    if (hbar[k] < lo * (1 - 1e-12) || hbar[k] > hi * (1 + 1e-12)) continue;
    if (std::isnan(values[k])) continue;
    if (!(values[k] > 0.0)) {
      throw InputError("fit_rate: nonpositive value " + format_double(values[k]) + " at hbar = " +
                       format_double(hbar[k]) + " in the fit window");
    }
    if (model == RateModel::power_log && !(hbar[k] < 1.0)) {
      throw InputError("fit_rate: the power_log model needs hbar < 1, got " + format_double(hbar[k]));
    }
    points.emplace_back(hbar[k], values[k]);
  }
  if (points.size() < 3) {
    throw InputError("fit_rate: need at least 3 points in the window [" + format_double(lo) + ", " +
                     format_double(hi) + "], got " + std::to_string(points.size()));
  }
  const int columns = model == RateModel::power ? 2 : 3;
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, columns);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = -std::log(points[k].first);
    a(k, 0) = 1.0;
    a(k, 1) = t;
    if (columns == 3) a(k, 2) = std::log(t);
    b(k) = std::log(points[k].second);
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  RateFit fit;
  fit.model = model;
  fit.c = std::exp(coef(0));
  fit.p = coef(1);
  fit.q = columns == 3 ? coef(2) : 0.0;
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (a * coef - b).squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.hbar_lo = points.front().first;
  fit.hbar_hi = points.front().first;
  for (const auto& [h, v] : points) {
    fit.hbar_lo = std::min(fit.hbar_lo, h);
    fit.hbar_hi = std::max(fit.hbar_hi, h);
  }
  fit.points = static_cast<int>(points.size());
  return fit;
}

RateFit fit_rate(const SweepResult& result, std::size_t index, RateModel model,
                 std::optional<std::pair<double, double>> window) {
  if (index >= result.functionals.size()) throw InputError("fit_rate: no functional column " + std::to_string(index));
  std::vector<double> hbar, values;
  for (const auto& r : result.records) hbar.push_back(r.hbar);
  if (!window) window = default_fit_window(hbar);
  hbar.clear();
  for (const auto& r : result.records) {
    if (!r.ok) continue;
    hbar.push_back(r.hbar);
    values.push_back(r.values[index]);
  }
  return fit_rate(hbar, values, model, window);
}

json to_json(const RateFit& fit) {
  return {{"model", to_string(fit.model)}, {"p", fit.p},           {"q", fit.q},
          {"c", fit.c},                    {"r_squared", fit.r_squared}, {"window", {fit.hbar_lo, fit.hbar_hi}},
          {"points", fit.points}};
}

namespace {

const std::vector<std::string> kTrailingColumns = {"status",        "region_re_min", "region_re_max", "region_im_min",
                                                   "region_im_max", "discarded",     "warnings"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& column, std::size_t row) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InputError("sweep table: bad value '" + s + "' in column '" + column + "' at row " + std::to_string(row));
  }
  return x;
}

int parse_int(const std::string& s, const std::string& column, std::size_t row) {
  const double x = parse_double(s, column, row);
  if (x != std::floor(x)) {
    throw InputError("sweep table: expected an integer in column '" + column + "' at row " + std::to_string(row));
  }
  return static_cast<int>(x);
}

}  // namespace

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << " solver=" << result.solver << " config_hash=" << result.config_hash
      << '\n';
  out << "hbar,n_eigs";
  for (const auto& f : result.functionals) out << ',' << f;
  for (const auto& c : kTrailingColumns) out << ',' << c;
  out << '\n';
  for (const auto& r : result.records) {
    out << format_double(r.hbar) << ',' << r.n_eigs;
    for (const double v : r.values) out << ',' << format_double(v);
    out << ',' << (r.ok ? "ok" : "gap") << ',' << format_double(r.region.re_min) << ','
        << format_double(r.region.re_max) << ',' << format_double(r.region.im_min) << ','
        << format_double(r.region.im_max) << ',' << r.discarded << ',' << r.warnings << '\n';
  }
  return out.str();
}

std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

void persist(const SweepResult& result, const std::string& csv_path) {
  const auto write = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("error writing '" + path + "'");
  };
  write(csv_path, to_csv(result));

  json records = json::array();
  for (const auto& r : result.records) {
    json eigs = json::array(), mult = json::array(), err = json::array();
    for (const auto& e : r.eigenvalues) {
      eigs.push_back(complex_to_json(e.energy));
      mult.push_back(e.multiplicity);
      err.push_back(e.error_estimate);
    }
    records.push_back({{"hbar", r.hbar},
                       {"status", r.ok ? "ok" : "gap"},
                       {"error", r.error},
                       {"eigenvalues", eigs},
                       {"multiplicities", mult},
                       {"error_estimates", err}});
  }
  const json sidecar = {{"schema_version", kSchemaVersion}, {"solver", result.solver},
                        {"config_hash", result.config_hash}, {"functionals", result.functionals},
                        {"records", records}};
  write(sidecar_path(csv_path), sidecar.dump(1) + "\n");
}

SweepResult load(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw InputError("cannot open '" + csv_path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0) throw InputError("sweep table '" + csv_path + "': missing schema_version header line");
  SweepResult result;
  std::optional<int> version;
  for (const auto& token : split(line.substr(2), ' ')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "schema_version") version = std::atoi(value.c_str());
    if (key == "solver") result.solver = value;
    if (key == "config_hash") result.config_hash = value;
  }
  if (!version) throw InputError("sweep table '" + csv_path + "': missing schema_version");
  if (*version != kSchemaVersion) {
    throw InputError("sweep table '" + csv_path + "' has schema_version " + std::to_string(*version) + ", expected " +
                     std::to_string(kSchemaVersion));
  }
  std::getline(in, line);
  const auto header = split(line, ',');
  const auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("sweep table '" + csv_path + "': missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_hbar = column_of("hbar"), c_n = column_of("n_eigs");
  std::vector<std::size_t> trailing;
  for (const auto& c : kTrailingColumns) trailing.push_back(column_of(c));
  std::vector<std::size_t> functional_columns;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k == c_hbar || k == c_n || std::find(trailing.begin(), trailing.end(), k) != trailing.end()) continue;
    functional_columns.push_back(k);
    result.functionals.push_back(header[k]);
  }
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw InputError("sweep table '" + csv_path + "': row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
    }
    SweepRecord r;
    r.hbar = parse_double(cells[c_hbar], "hbar", row);
    r.n_eigs = parse_int(cells[c_n], "n_eigs", row);
    for (const auto k : functional_columns) r.values.push_back(parse_double(cells[k], header[k], row));
    r.ok = cells[trailing[0]] == "ok";
    r.region.re_min = parse_double(cells[trailing[1]], kTrailingColumns[1], row);
    r.region.re_max = parse_double(cells[trailing[2]], kTrailingColumns[2], row);
    r.region.im_min = parse_double(cells[trailing[3]], kTrailingColumns[3], row);
    r.region.im_max = parse_double(cells[trailing[4]], kTrailingColumns[4], row);
    r.discarded = parse_int(cells[trailing[5]], kTrailingColumns[5], row);
    r.warnings = parse_int(cells[trailing[6]], kTrailingColumns[6], row);
    result.records.push_back(std::move(r));
  }

  const std::string side = sidecar_path(csv_path);
  if (!std::filesystem::exists(side)) return result;
  const json j = read_json_file(side);
  check_schema_version(j, "sweep sidecar '" + side + "'");
  if (!j.contains("records") || !j["records"].is_array() || j["records"].size() != result.records.size()) {
    throw InputError("sweep sidecar '" + side + "': field 'records' does not match the table");
  }
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const json& r = j["records"][k];
    const std::string field = "records[" + std::to_string(k) + "]";
    auto& record = result.records[k];
    record.error = r.value("error", "");
    const json& eigs = r.at("eigenvalues");
    const json& mult = r.at("multiplicities");
    const json& err = r.at("error_estimates");
    if (eigs.size() != mult.size() || eigs.size() != err.size()) {
      throw InputError("sweep sidecar '" + side + "': " + field + " has lists of different lengths");
    }
    for (std::size_t i = 0; i < eigs.size(); ++i) {
      record.eigenvalues.push_back(
          {complex_from_json(eigs[i], field + ".eigenvalues"), mult[i].get<int>(), err[i].get<double>()});
    }
  }
  return result;
}

std::string plot_svg(const SweepResult& result, std::size_t index, const std::optional<RateFit>& fit) {
  if (index >= result.functionals.size()) throw InputError("plot_svg: no functional column " + std::to_string(index));
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : result.records) {
    if (r.ok && r.values[index] > 0.0) pts.emplace_back(std::log10(1.0 / r.hbar), std::log10(r.values[index]));
  }
  constexpr double width = 640, height = 420, margin = 60;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">"
      << result.functionals[index] << "</text>\n";
  if (pts.empty()) {
    out << "</svg>\n";
    return out.str();
  }
  double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  const auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
  const auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
      << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\">log10(1/hbar)</text>\n";
  out << "<text x=\"15\" y=\"" << height / 2 << "\" transform=\"rotate(-90 15 " << height / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\">log10(value)</text>\n";
  const auto tick = [&](double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
  };
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"11\">" << tick(x0) << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
      << "\" font-size=\"11\" text-anchor=\"end\">" << tick(x1) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << height - margin << "\" font-size=\"11\" text-anchor=\"end\">"
      << tick(y0) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
      << tick(y1) << "</text>\n";
  for (const auto& [x, y] : pts) {
    out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  if (fit) {
    const auto line_y = [&](double x) {
      const double t = x * std::log(10.0);
      double v = std::log(fit->c) + fit->p * t;
      if (fit->model == RateModel::power_log) v += fit->q * std::log(t);
      return v / std::log(10.0);
    };
    const double a = std::log10(1.0 / fit->hbar_hi), b = std::log10(1.0 / fit->hbar_lo);
    out << "<line x1=\"" << sx(a) << "\" y1=\"" << sy(line_y(a)) << "\" x2=\"" << sx(b) << "\" y2=\"" << sy(line_y(b))
        << "\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << width - margin - 4 << "\" y=\"" << margin + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">p = " << tick(fit->p)
        << ", R2 = " << tick(fit->r_squared) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ltlab
