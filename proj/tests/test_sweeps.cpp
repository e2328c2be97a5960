#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ltlab/sweeps.hpp"

using namespace ltlab;

namespace {

std::string error_of(const json& j) {
  try {
    parse_sweep_config(j);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

json base_config() {
  return json::parse(R"({
    "schema_version": 1,
    "potential": {"builtin": "bogli_stampach", "params": [1, 1]},
    "solver": "secular",
    "hbar": {"max": 1, "min": 0.5, "points": 2},
    "functionals": [{"kind": "dhk", "gamma": 1, "sigma": 0, "name": "delta_sum"},
                    {"kind": "cone", "gamma": 1, "kappa": 1}]
  })");
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ltlab_test_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("sweeps") {
  TEST_CASE("hbar grid is geometric and exact at the ends") {
    HbarGrid g{0.125, 0.0078125, 5};
    const auto v = g.values();
    REQUIRE(v.size() == 5);
    CHECK(v.front() == 0.125);
    CHECK(v[1] == 0.0625);
    CHECK(v.back() == 0.0078125);
    CHECK_THROWS_AS((HbarGrid{1.5, 0.1, 3}.validate()), InputError);
    CHECK_THROWS_AS((HbarGrid{0.5, 0.5, 3}.validate()), InputError);
    CHECK_THROWS_AS((HbarGrid{0.5, 0.1, 1}.validate()), InputError);
  }

  TEST_CASE("config errors name the field") {
    auto j = base_config();
    j["hbar"]["min"] = -1;
    CHECK(error_of(j).find("hbar") != std::string::npos);

    j = base_config();
    j.erase("potential");
    CHECK(error_of(j).find("'potential'") != std::string::npos);

    j = base_config();
    j["functionals"][1]["kappa"] = 0;
    CHECK(error_of(j).find("functionals[1]") != std::string::npos);

    j = base_config();
    j["colour"] = "blue";
    CHECK(error_of(j).find("colour") != std::string::npos);

    j = base_config();
    j["schema_version"] = 7;
    CHECK(error_of(j).find("schema_version") != std::string::npos);

    j = base_config();
    j["workers"] = 0;
    CHECK(error_of(j).find("workers") != std::string::npos);

    j = base_config();
    j["functionals"].push_back({{"kind", "weyl"}, {"gamma", 1}});
    CHECK(error_of(j).find("functionals[2]") != std::string::npos);

    j = base_config();
    j["functionals"][1]["name"] = "delta_sum";
    CHECK(error_of(j).find("functionals[1]") != std::string::npos);

    j = base_config();
    j["potential"] = {{"builtin", "nope"}, {"params", {1}}};
    CHECK(error_of(j).find("potential") != std::string::npos);

    CHECK(error_of(base_config()).empty());
  }

  TEST_CASE("config hash ignores workers and output") {
    auto a = base_config();
    a["potential"] = {{"steps", {{"breakpoints", json::array()}, {"values", json::array()}}}};
    auto b = a;
    b["workers"] = 8;
    b["output"] = {{"stem", "other"}};
    const auto ha = run_sweep(parse_sweep_config(a)).config_hash;
    CHECK(ha.size() == 16);
    CHECK(run_sweep(parse_sweep_config(b)).config_hash == ha);
    b["seed"] = 3;
    CHECK(run_sweep(parse_sweep_config(b)).config_hash != ha);
    CHECK(config_hash(a) == config_hash(json::parse(a.dump())));
  }

  TEST_CASE("fit_rate on exact models") {
    std::vector<double> h, s2, slog, c;
    for (int k = 0; k < 8; ++k) {
      const double x = std::pow(0.5, k + 1);
      h.push_back(x);
      s2.push_back(std::pow(x, -2));
      slog.push_back(std::log(1 / x) / x);
      c.push_back(3.0);
    }
    const std::pair<double, double> all{0.0, 1.0};
    const auto f2 = fit_rate(h, s2, RateModel::power, all);
    CHECK(std::abs(f2.p - 2.0) < 1e-10);
    CHECK(f2.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f2.points == 8);
    const auto fl = fit_rate(h, slog, RateModel::power_log, all);
    CHECK(std::abs(fl.p - 1.0) < 1e-6);
    CHECK(std::abs(fl.q - 1.0) < 1e-6);
    const auto fc = fit_rate(h, c, RateModel::power, all);
    CHECK(std::abs(fc.p) < 1e-12);
    CHECK(fc.c == doctest::Approx(3.0));
    CHECK(fc.r_squared >= 0.0);
    CHECK(fc.r_squared <= 1.0);

    const auto fd = fit_rate(h, s2, RateModel::power);
    CHECK(fd.points == 4);
    CHECK(fd.hbar_hi == h[4]);
    CHECK(fd.hbar_lo == h[7]);

    auto bad = s2;
    bad[6] = 0.0;
    CHECK_THROWS_AS(fit_rate(h, bad, RateModel::power, all), InputError);
    CHECK_THROWS_AS(fit_rate(h, s2, RateModel::power, std::pair{0.1, 0.2}), InputError);
    std::vector<double> with_one = {1.0, 0.5, 0.25};
    CHECK_THROWS_AS(fit_rate(with_one, {1, 2, 3}, RateModel::power_log, all), InputError);
  }

  TEST_CASE("default fit window") {
    const auto w = default_fit_window({1, 0.5, 0.25, 0.125});
    CHECK(w.first == 0.125);
    CHECK(w.second == 0.5);
    const auto w5 = default_fit_window({1, 0.5, 0.25});
    CHECK(w5.second == 1);
  }

  TEST_CASE("zero potential gives zero values") {
    auto j = base_config();
    j["potential"] = {{"steps", {{"breakpoints", json::array()}, {"values", json::array()}}}};
    const auto r = run_sweep(parse_sweep_config(j));
    REQUIRE(r.records.size() == 2);
    for (const auto& rec : r.records) {
      CHECK(rec.ok);
      CHECK(rec.n_eigs == 0);
      for (double v : rec.values) CHECK(v == 0.0);
    }
  }

  TEST_CASE("bogli sweep, determinism and round trip") {
    auto config = parse_sweep_config(base_config());
    const auto serial = run_sweep(config);
    REQUIRE(serial.records.size() == 2);
    CHECK(serial.records[0].hbar == 1.0);
    CHECK(serial.records[1].hbar == 0.5);
    for (const auto& rec : serial.records) {
      CHECK(rec.ok);
      CHECK(rec.n_eigs > 0);
      for (double v : rec.values) CHECK(v >= 0.0);
    }
    CHECK(serial.records[1].n_eigs >= serial.records[0].n_eigs);
    config.workers = 4;
    const auto parallel = run_sweep(config);
    CHECK(parallel == serial);
    CHECK(to_csv(parallel) == to_csv(serial));

    const auto dir = scratch_dir("roundtrip");
    const auto path = (dir / "r.csv").string();
    persist(serial, path);
    CHECK(std::filesystem::exists(sidecar_path(path)));
    const auto back = load(path);
    CHECK(back == serial);
    persist(parallel, (dir / "p.csv").string());
    CHECK(slurp(dir / "p.csv") == slurp(dir / "r.csv"));
    CHECK(slurp(dir / "p.json") == slurp(dir / "r.json"));
    const auto svg = plot_svg(serial, 0, std::nullopt);
    CHECK(svg.find("<svg") != std::string::npos);
  }

  TEST_CASE("load rejects missing columns and foreign versions") {
    SweepResult r;
    r.solver = "secular";
    r.config_hash = "0123456789abcdef";
    r.functionals = {"f"};
    SweepRecord rec;
    rec.hbar = 0.5;
    rec.n_eigs = 1;
    rec.values = {2.0};
    rec.eigenvalues = {{Complex(-1, 0), 1, 0.0}};
    r.records = {rec};
    const auto dir = scratch_dir("schema");
    const auto good = (dir / "good.csv").string();
    persist(r, good);
    CHECK(load(good) == r);

    auto text = slurp(good);
    auto edited = text;
    edited.replace(edited.find("n_eigs"), 6, "n_eig");
    {
      std::ofstream(dir / "missing.csv") << edited;
      std::filesystem::copy_file(sidecar_path(good), dir / "missing.json",
                                 std::filesystem::copy_options::overwrite_existing);
    }
    try {
      load((dir / "missing.csv").string());
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("missing column 'n_eigs'") != std::string::npos);
    }

    edited = text;
    edited.replace(edited.find("schema_version=1"), 16, "schema_version=9");
    {
      std::ofstream(dir / "foreign.csv") << edited;
      std::filesystem::copy_file(sidecar_path(good), dir / "foreign.json",
                                 std::filesystem::copy_options::overwrite_existing);
    }
    try {
      load((dir / "foreign.csv").string());
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("schema_version 9") != std::string::npos);
    }
  }

  TEST_CASE("every point failing is a computation error") {
    auto j = base_config();
    // A nonnegative real bump has no negative part, so the weyl column fails everywhere.
    j["potential"] = {{"steps", {{"breakpoints", {0, 1}}, {"values", {1.0}}}}};
    j["functionals"] = {{{"kind", "weyl"}, {"gamma", 1}}};
    CHECK_THROWS_AS(run_sweep(parse_sweep_config(j)), ComputationError);
  }

  TEST_CASE("point seeds are distinct and stable") {
    CHECK(point_seed(1, 0) != point_seed(1, 1));
    CHECK(point_seed(1, 3) == point_seed(1, 3));
    CHECK(point_seed(1, 3) != point_seed(2, 3));
  }

  TEST_CASE("dhk exponent is non-increasing in sigma on one sweep") {
    auto j = base_config();
    j["hbar"] = {{"max", 0.25}, {"min", 0.0625}, {"points", 3}};
    j["functionals"] = json::array();
    for (double sigma : {0.0, 0.5, 1.0, 1.5}) j["functionals"].push_back({{"kind", "dhk"}, {"gamma", 1}, {"sigma", sigma}});
    auto config = parse_sweep_config(j);
    config.workers = 3;
    const auto r = run_sweep(config);
    double last = INFINITY;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto fit = fit_rate(r, k, RateModel::power, std::pair{0.0, 1.0});
      CHECK(fit.p <= last + 1e-12);
      last = fit.p;
    }
  }
}
