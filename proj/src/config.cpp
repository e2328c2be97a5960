#include "ltlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ltlab {

int dimension_of(const AnyPotential& v) {
  if (const auto* radial = std::get_if<RadialPotential>(&v)) return radial->dimension;
  return 1;
}

void HbarGrid::validate() const {
  if (!(hbar_min > 0.0 && hbar_min < hbar_max && hbar_max <= 1.0)) {
    throw InputError("hbar grid needs 0 < hbar_min < hbar_max <= 1");
  }
  if (points < 2) throw InputError("hbar grid needs points >= 2");
}

std::vector<double> HbarGrid::values() const {
  validate();
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) {
    out[k] = hbar_max * std::pow(hbar_min / hbar_max, static_cast<double>(k) / (points - 1));
  }
  out.front() = hbar_max;
  out.back() = hbar_min;
  return out;
}

SolveOutcome solve(const AnyPotential& v, double hbar, const SolverConfig& solver, std::uint64_t seed) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  SolveOutcome out;
  switch (solver.kind) {
    case SolverTag::secular: {
      const auto* p = std::get_if<Potential>(&v);
      const auto* step = p ? std::get_if<StepPotential>(p) : nullptr;
      if (!step) throw InputError("the secular solver needs a one-dimensional step potential");
      SecularOptions options;
      options.axis_exclusion = solver.axis_exclusion;
      options.region_constant = solver.region_constant;
      options.search.contour.seed = seed;
      out.region = solver.region ? *solver.region : default_region(*step, hbar, solver.region_constant);
      out.eigs = find_eigenvalues(*step, hbar, out.region, options);
      break;
    }
    case SolverTag::grid: {
      const auto* p = std::get_if<Potential>(&v);
      if (!p) throw InputError("the grid solver needs a one-dimensional potential; use the radial solver");
      out.eigs = find_eigenvalues_grid(*p, hbar, solver.resolution);
      break;
    }
    case SolverTag::radial: {
      const auto* radial = std::get_if<RadialPotential>(&v);
      if (!radial) throw InputError("the radial solver needs a radial potential");
      out.eigs = find_eigenvalues_radial(*radial, hbar, solver.resolution);
      break;
    }
  }
  return out;
}

double evaluate(const FunctionalSpec& spec, const EigenSet& eigs, const AnyPotential& v, double hbar) {
  return std::visit([&](const auto& p) { return evaluate(spec, eigs, p, hbar); }, v);
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InputError("config field '" + field + "': " + what);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json& require(const json& j, const std::string& field, const std::string& key) {
  if (!j.is_object()) field_error(field, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) field_error(join(field, key), "missing");
  return *it;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  return j.get<int>();
}

double number_or(const json& j, const std::string& field, const std::string& key, double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, join(field, key));
}

std::string string_of(const json& j, const std::string& field) {
  if (!j.is_string()) field_error(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<Complex> complexes(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(complex_from_json(j[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

// Wraps library InputErrors raised while building an object so that the
// message names the config field.
template <class F>
auto within(const std::string& field, F&& build) {
  try {
    return build();
  } catch (const InputError& e) {
    const std::string message = e.what();
    if (message.rfind("config field", 0) == 0) throw;
    field_error(field, message);
  }
}

}  // namespace

Complex complex_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return within(field, [&] { return parse_complex_token(j.get<std::string>()); });
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    field_error(field, "expected a complex number [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

AnyPotential parse_potential(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  Potential profile;
  int kinds = 0;
  if (j.contains("builtin")) {
    ++kinds;
    const std::string name = string_of(j["builtin"], join(field, "builtin"));
    const auto params = j.contains("params") ? numbers(j["params"], join(field, "params")) : std::vector<double>{};
    profile = within(join(field, "builtin"), [&] { return builtin(name, params); });
  }
  if (j.contains("steps")) {
    ++kinds;
    const std::string f = join(field, "steps");
    const auto x = numbers(require(j["steps"], f, "breakpoints"), join(f, "breakpoints"));
    const auto v = complexes(require(j["steps"], f, "values"), join(f, "values"));
    profile = within(f, [&] { return Potential(StepPotential(x, v)); });
  }
  if (j.contains("sampled")) {
    ++kinds;
    const std::string f = join(field, "sampled");
    const double left = number(require(j["sampled"], f, "left"), join(f, "left"));
    const double right = number(require(j["sampled"], f, "right"), join(f, "right"));
    const auto s = complexes(require(j["sampled"], f, "samples"), join(f, "samples"));
    profile = within(f, [&] { return Potential(SampledPotential(left, right, s)); });
  }
  if (kinds != 1) field_error(field, "expected exactly one of 'builtin', 'steps' or 'sampled'");
  if (j.contains("radial")) {
    const std::string f = join(field, "radial");
    const json& r = j["radial"];
    const int d = integer(require(r, f, "dimension"), join(f, "dimension"));
    const int l_max = r.contains("l_max") ? integer(r["l_max"], join(f, "l_max")) : 0;
    return within(f, [&] { return AnyPotential(RadialPotential(d, profile, l_max)); });
  }
  return profile;
}

SolverConfig parse_solver(const json& j, const std::string& field) {
  SolverConfig out;
  if (j.is_string()) {
    out.kind = within(field, [&] { return solver_tag_from_string(j.get<std::string>()); });
    return out;
  }
  const std::string kind = string_of(require(j, field, "kind"), join(field, "kind"));
  out.kind = within(join(field, "kind"), [&] { return solver_tag_from_string(kind); });
  out.region_constant = number_or(j, field, "region_constant", out.region_constant);
  out.axis_exclusion = number_or(j, field, "axis_exclusion", out.axis_exclusion);
  if (!(out.region_constant > 0.0)) field_error(join(field, "region_constant"), "must be positive");
  if (!(out.axis_exclusion > 0.0)) field_error(join(field, "axis_exclusion"), "must be positive");
  if (j.contains("region")) {
    const auto r = numbers(j["region"], join(field, "region"));
    if (r.size() != 4 || !(r[0] < r[1]) || !(r[2] < r[3])) {
      field_error(join(field, "region"), "expected [re_min, re_max, im_min, im_max] with min < max");
    }
    out.region = SearchRegion{r[0], r[1], r[2], r[3]};
  }
  auto& res = out.resolution;
  res.h_factor = number_or(j, field, "h_factor", res.h_factor);
  res.decay_min = number_or(j, field, "decay_min", res.decay_min);
  res.eps_move = number_or(j, field, "eps_move", res.eps_move);
  res.eps_refine = number_or(j, field, "eps_refine", res.eps_refine);
  res.eps_axis = number_or(j, field, "eps_axis", res.eps_axis);
  for (const auto& [key, value] : {std::pair{"h_factor", res.h_factor}, std::pair{"decay_min", res.decay_min},
                                   std::pair{"eps_move", res.eps_move}, std::pair{"eps_refine", res.eps_refine},
                                   std::pair{"eps_axis", res.eps_axis}}) {
    if (!(value > 0.0)) field_error(join(field, key), "must be positive");
  }
  return out;
}

HbarGrid parse_hbar_grid(const json& j, const std::string& field) {
  HbarGrid grid;
  grid.hbar_max = number(require(j, field, "max"), join(field, "max"));
  grid.hbar_min = number(require(j, field, "min"), join(field, "min"));
  grid.points = integer(require(j, field, "points"), join(field, "points"));
  within(field, [&] {
    grid.validate();
    return 0;
  });
  return grid;
}

FunctionalSpec parse_functional(const json& j, int dimension, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  FunctionalSpec spec;
  if (j.contains("case")) {
    const std::string id = string_of(j["case"], join(field, "case"));
    if (id.size() != 1) field_error(join(field, "case"), "expected one of a-f");
    const double gamma = number(require(j, field, "gamma"), join(field, "gamma"));
    std::optional<double> alpha, beta;
    if (j.contains("alpha")) alpha = number(j["alpha"], join(field, "alpha"));
    if (j.contains("beta")) beta = number(j["beta"], join(field, "beta"));
    spec = within(field, [&] { return case_table(id[0], dimension, gamma, alpha, beta); });
    if (j.contains("threshold_form")) {
      const std::string form = string_of(j["threshold_form"], join(field, "threshold_form"));
      spec.threshold_form = within(join(field, "threshold_form"), [&] { return threshold_form_from_string(form); });
    }
  } else {
    const std::string kind = string_of(require(j, field, "kind"), join(field, "kind"));
    spec.kind = within(join(field, "kind"), [&] { return functional_kind_from_string(kind); });
    spec.dimension = dimension;
    spec.gamma = number_or(j, field, "gamma", spec.gamma);
    spec.sigma = number_or(j, field, "sigma", spec.sigma);
    spec.kappa = number_or(j, field, "kappa", spec.kappa);
    spec.alpha = number_or(j, field, "alpha", spec.alpha);
    spec.beta = number_or(j, field, "beta", spec.beta);
    if (j.contains("truncation")) {
      const std::string t = string_of(j["truncation"], join(field, "truncation"));
      spec.truncation = within(join(field, "truncation"), [&] { return truncation_from_string(t); });
    }
    if (j.contains("threshold_form")) {
      const std::string form = string_of(j["threshold_form"], join(field, "threshold_form"));
      spec.threshold_form = within(join(field, "threshold_form"), [&] { return threshold_form_from_string(form); });
    }
  }
  if (j.contains("name")) spec.name = string_of(j["name"], join(field, "name"));
  within(field, [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void check_schema_version(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw InputError("config field 'schema_version': missing in " + what);
  }
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion) {
    throw InputError(what + " has schema_version " + j["schema_version"].dump() + ", expected " +
                     std::to_string(kSchemaVersion));
  }
}

std::string config_hash(const json& j) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::string default_output_directory() {
  const char* dir = std::getenv("LTLAB_OUTPUT_DIR");
  return dir && *dir ? dir : ".";
}

}  // namespace ltlab
