#include <doctest.h>

#include <algorithm>
#include <random>

#include "ltlab/contour.hpp"
#include "oracles.hpp"

using namespace ltlab;
using namespace std::complex_literals;

TEST_SUITE("contour") {
  TEST_CASE("synthetic counts") {
    CHECK(count_zeros({-2, 0, 0, 2}, oracle::polynomial({-1.0 + 1i})) == 1);
    CHECK(count_zeros({-2, 0, -1, 1}, oracle::polynomial({-1.0, -1.0})) == 2);
    CHECK(count_zeros({1, 2, 1, 2}, oracle::polynomial({-1.0, -1.0})) == 0);
    const auto exp_fn = [](Complex z) { return AnalyticSample{std::exp(z), 1.0}; };
    CHECK(count_zeros({-5, 5, -5, 5}, exp_fn) == 0);
  }

  TEST_CASE("winding number reports a zero on the boundary") {
    const auto f = oracle::polynomial({0.0 + 0.5i});
    CHECK_FALSE(winding_number({0, 1, 0, 1}, f).has_value());
    // count_zeros dilates the rectangle and succeeds.
    SearchRegion used;
    const int n = count_zeros({0, 1, 0, 1}, f, {}, &used);
    CHECK(used.re_min < 0.0);
    CHECK(n == 1);
  }

  TEST_CASE("fixed edges stay put under dilation") {
    const SearchRegion r{0, 2, 0, 2};
    const auto d = r.dilated(1.5, SearchRegion::kReMin | SearchRegion::kImMin);
    CHECK(d.re_min == 0.0);
    CHECK(d.im_min == 0.0);
    CHECK(d.re_max > 2.0);
    CHECK(d.im_max > 2.0);
  }

  TEST_CASE("zeros with multiplicity and clusters") {
    const std::vector<Complex> roots{-1.0 + 1i, -1.0 + 1i, 0.5 - 0.25i, 2.0 + 0.75i, 2.0 + 0.75i, 2.0 + 0.75i};
    const auto zeros = find_zeros({-3, 3, -2, 2}, oracle::polynomial(roots));
    int total = 0;
    for (const auto& z : zeros) total += z.multiplicity;
    CHECK(total == 6);
    REQUIRE(zeros.size() == 3);
    for (const auto& z : zeros) {
      const auto nearest = *std::min_element(roots.begin(), roots.end(), [&](auto a, auto b) {
        return std::abs(a - z.location) < std::abs(b - z.location);
      });
      CHECK(std::abs(nearest - z.location) < 1e-9);
      CHECK(z.multiplicity == std::count(roots.begin(), roots.end(), nearest));
    }
    // Two zeros closer than the resolution limit come back as one double zero.
    const auto cluster = find_zeros({-1, 1, -1, 1}, oracle::polynomial({0.1 + 0.2i, 0.1 + 0.2i + 1e-13}));
    REQUIRE(cluster.size() == 1);
    CHECK(cluster[0].multiplicity == 2);
  }

  TEST_CASE("partition additivity on random partitions") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> roots;
    for (int k = 0; k < 12; ++k) roots.emplace_back(u(rng), u(rng));
    roots.push_back(roots[0]);
    roots.push_back(roots[3] + 1e-3);
    const auto f = oracle::polynomial(roots);
    const SearchRegion whole{-1.5, 1.5, -1.5, 1.5};
    CHECK(count_zeros(whole, f) == static_cast<int>(roots.size()));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> xs{whole.re_min, whole.re_max}, ys{whole.im_min, whole.im_max};
      for (int k = 0; k < 1 + trial % 4; ++k) xs.push_back(1.4 * u(rng));
      for (int k = 0; k < 1 + trial % 3; ++k) ys.push_back(1.4 * u(rng));
      std::sort(xs.begin(), xs.end());
      std::sort(ys.begin(), ys.end());
      int sum = 0;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
          const SearchRegion cell{xs[i], xs[i + 1], ys[j], ys[j + 1]};
          const auto w = winding_number(cell, f);
          REQUIRE(w.has_value());
          sum += *w;
          int inside = 0;
          for (const auto& r : roots) inside += cell.contains(r, 0.0);
          CHECK(*w == inside);
        }
      }
      CHECK(sum == static_cast<int>(roots.size()));
    }
  }
}
