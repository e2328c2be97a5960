#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ltlab/functionals.hpp"
#include "ltlab/secular.hpp"
#include "oracles.hpp"

using namespace ltlab;
using namespace std::complex_literals;

namespace {

StepPotential step(std::string_view name, double a, double b) {
  const double p[] = {a, b};
  return std::get<StepPotential>(builtin(name, p));
}

// Greatest distance from an entry of a to the nearest entry of b, entry counts equal.
double set_distance(const EigenSet& a, const EigenSet& b) {
  if (a.total_multiplicity() != b.total_multiplicity()) return INFINITY;
  double worst = 0.0;
  for (const auto& x : a.entries) {
    double best = INFINITY;
    for (const auto& y : b.entries) best = std::min(best, std::abs(x.energy - y.energy));
    worst = std::max(worst, best);
  }
  return worst;
}

const std::vector<StepPotential>& corpus() {
  static const std::vector<StepPotential> c = {
      step("bogli_stampach", 1, 1),
      step("square_well", 4, 1),
      StepPotential({0, 0.5, 1.5}, {-2.0 + 1i, 1.0 - 0.5i}),
      StepPotential({-1, 0, 1}, {3i, -3i}),
      StepPotential({0, 1, 2, 2.5}, {-1.0, 2.0 + 2i, -4.0}),
  };
  return c;
}

}  // namespace

TEST_SUITE("secular") {
  TEST_CASE("zero potential has no eigenvalues") {
    const StepPotential zero;
    CHECK(find_eigenvalues(zero, 1.0).entries.empty());
    CHECK(find_eigenvalues(zero, 0.1, SearchRegion{-5, 5, -5, 5}).entries.empty());
    CHECK(default_region(zero, 1.0).is_degenerate());
  }

  TEST_CASE("matching function rejects the cut and bad hbar") {
    const auto v = step("square_well", 1, 1);
    CHECK_THROWS_AS(matching_function(v, 1.0, 2.0), InputError);
    CHECK_THROWS_AS(matching_function(v, 1.0, 0.0), InputError);
    CHECK_THROWS_AS(matching_function(v, 0.0, -1.0), InputError);
    CHECK_NOTHROW(matching_function(v, 1.0, 2.0 + 1e-3i));
  }

  TEST_CASE("square well matches the textbook roots") {
    const auto levels = oracle::square_well_levels(10, 1, 1);
    REQUIRE(levels.size() == 2);
    const auto v = step("square_well", 10, 1);
    for (const auto& eigs : {find_eigenvalues(v, 1.0), find_eigenvalues(v, 1.0, SearchRegion{-10, -1e-6, -1, 1})}) {
      REQUIRE(eigs.entries.size() == levels.size());
      for (std::size_t k = 0; k < levels.size(); ++k) {
        CHECK(std::abs(eigs.entries[k].energy - levels[k]) < 1e-10);
        CHECK(eigs.entries[k].multiplicity == 1);
      }
    }
    const auto deep = oracle::square_well_levels(1, 1, 1.0 / 16);
    const auto eigs = find_eigenvalues(step("square_well", 1, 1), 1.0 / 16);
    REQUIRE(eigs.entries.size() == deep.size());
    for (std::size_t k = 0; k < deep.size(); ++k) CHECK(std::abs(eigs.entries[k].energy - deep[k]) < 1e-10);
  }

  TEST_CASE("default region") {
    const auto r = default_region(step("bogli_stampach", 1, 1), 1.0);
    CHECK(r.re_max == doctest::Approx(0.36));
    CHECK(r.im_max == doctest::Approx(0.36));
    CHECK(r.re_min == doctest::Approx(-0.36));
    const auto half = default_region(step("bogli_stampach", 1, 1), 0.5);
    CHECK(half.re_max == doctest::Approx(4 * r.re_max));
  }

  TEST_CASE("no eigenvalue between the literature radius and the margin") {
    for (const auto& v : corpus()) {
      for (double hbar : {1.0, 0.5, 0.2, 0.1}) {
        const double norm = lp_power_integral(Potential(v), 1.0);
        const double inner = std::pow(0.5 * norm / hbar, 2);
        SecularOptions wide;
        wide.region_constant = 1.0;
        const auto a = find_eigenvalues(v, hbar);
        const auto b = find_eigenvalues(v, hbar, wide);
        CHECK(a.total_multiplicity() == b.total_multiplicity());
        for (const auto& e : b.entries) CHECK(std::abs(e.energy) <= inner * (1 + 1e-9));
      }
    }
  }

  TEST_CASE("multiplicities sum to the region count") {
    for (const auto& v : corpus()) {
      const auto region = default_region(v, 0.2);
      CHECK(find_eigenvalues(v, 0.2, region).total_multiplicity() == count_zeros(region, v, 0.2));
    }
  }

  TEST_CASE("conjugation, translation and hbar scaling") {
    for (const auto& v : corpus()) {
      for (double hbar : {0.5, 0.1}) {
        const auto base = find_eigenvalues(v, hbar);
        auto conj = find_eigenvalues(v.conjugated(), hbar);
        for (auto& e : conj.entries) e.energy = std::conj(e.energy);
        conj.normalize(1e-10);
        CHECK(set_distance(base, conj) < 1e-10);
        CHECK(set_distance(base, find_eigenvalues(v.shifted(3.7), hbar)) < 1e-10);
        // -hbar^2 d^2 + V(x) versus -d^2 + V(hbar y): breakpoints scale by 1/hbar.
        const auto scaled = find_eigenvalues(v.dilated(1.0 / hbar), 1.0, default_region(v, hbar));
        CHECK(set_distance(base, scaled) < 1e-10);
      }
    }
  }

  TEST_CASE("real potentials give negative real eigenvalues") {
    for (const auto& v : {step("square_well", 4, 1), StepPotential({0, 1, 2}, {-3.0, 1.0})}) {
      for (double hbar : {1.0, 0.25, 0.05}) {
        for (const auto& e : find_eigenvalues(v, hbar).entries) {
          CHECK(std::abs(e.energy.imag()) < 1e-10);
          CHECK(e.energy.real() < 0.0);
        }
      }
    }
  }

  TEST_CASE("eigenvalues are zeros of the matching function") {
    for (const auto& v : corpus()) {
      for (double hbar : {1.0, 0.2}) {
        for (const auto& e : find_eigenvalues(v, hbar).entries) {
          // Local scale: largest |W| on a circle of relative radius 1e-3 around E.
          const double r = 1e-3 * std::max(1.0, std::abs(e.energy));
          double scale = 0.0;
          for (int k = 0; k < 16; ++k) {
            const Complex z = e.energy + r * std::polar(1.0, 2 * M_PI * k / 16);
            scale = std::max(scale, std::abs(matching_function(v, hbar, z).value));
          }
          CHECK(std::abs(matching_function(v, hbar, e.energy).value) < 1e-9 * scale);
        }
      }
    }
  }

  TEST_CASE("eigen sets are sorted and off the cut") {
    const auto eigs = find_eigenvalues(step("bogli_stampach", 1, 1), 0.05);
    CHECK(eigs.total_multiplicity() > 10);
    for (std::size_t k = 1; k < eigs.entries.size(); ++k) {
      const auto a = eigs.entries[k - 1].energy, b = eigs.entries[k].energy;
      CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
    }
    for (const auto& e : eigs.entries) CHECK(delta(e.energy) > kDefaultAxisExclusion);
  }
}
