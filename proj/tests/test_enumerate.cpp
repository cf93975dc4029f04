#include <algorithm>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "lightcone/enumerate.hpp"
#include "lightcone/rng.hpp"
#include "lightcone/stats.hpp"

using namespace lightcone;

TEST_CASE("integer square root") {
  for (std::int64_t m = 0; m < 5000; ++m) {
    const std::int64_t s = isqrt(m);
    CHECK((s * s <= m && (s + 1) * (s + 1) > m));
  }
  const std::int64_t big = 3037000499LL;  // floor(sqrt(2^63 - 1))
  CHECK(isqrt(big * big) == big);
  CHECK(isqrt(big * big - 1) == big - 1);
  const __int128 huge = static_cast<__int128>(1) << 100;
  CHECK(isqrt(huge) == static_cast<__int128>(1) << 50);
  CHECK(isqrt(huge - 1) == (static_cast<__int128>(1) << 50) - 1);
  CHECK(isqrt(std::int64_t{-4}) == -1);
}

TEST_CASE("fibers match plain loops") {
  for (std::int64_t q = 1; q <= 25; ++q) {
    const auto mine = fiber_points(3, q);
    const auto ref = oracle::fiber_brute4(q);
    CHECK(mine == ref);  // same ascending order
    CHECK(fiber_count(3, q).count == static_cast<std::int64_t>(ref.size()));
  }
  for (int n : {1, 2, 4, 5}) {
    for (std::int64_t q = 1; q <= (n >= 4 ? 6 : 20); ++q) {
      const std::int64_t ref = oracle::fiber_count_brute(n + 1, q);
      CHECK(static_cast<std::int64_t>(fiber_points(n, q).size()) == ref);
      CHECK(fiber_count(n, q).count == ref);
    }
  }
}

TEST_CASE("fibers are closed under signed permutations") {
  for (std::int64_t q : {5, 13, 25, 30}) {
    const auto pts = fiber_points(3, q);
    const std::set<IntVec> all(pts.begin(), pts.end());
    for (const auto& p : pts) {
      __int128 norm = 0;
      for (auto x : p) norm += static_cast<__int128>(x) * x;
      CHECK(norm == static_cast<__int128>(q) * q);
      IntVec flipped = p;
      flipped[1] = -flipped[1];
      CHECK(all.count(flipped) == 1);
      IntVec swapped = p;
      std::swap(swapped[0], swapped[3]);
      CHECK(all.count(swapped) == 1);
    }
  }
}

TEST_CASE("fiber counts against the sum-of-divisors formula") {
  FiberCounter counter(3, 500);
  for (std::int64_t q = 1; q <= 500; ++q) {
    const std::int64_t r = counter(q);
    CHECK(r == oracle::r4_by_factorization(q * q));
    CHECK(r >= 2);
    CHECK(r % 2 == 0);
  }
  // independent of the table: values above the table bound use the fallback
  FiberCounter small(3, 10);
  CHECK(small(37) == oracle::r4_by_factorization(37 * 37));
}

TEST_CASE("box search against exhaustive filtering") {
  CounterRng rng(21, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const SpherePoint alpha = sample_sphere(rng, 3);
    const double c = 0.2 + 2.8 * rng.uniform01();
    for (std::int64_t q = 1; q <= 30; ++q) {
      BoxQuery query{3, q, {}, c};
      for (double a : alpha.coords()) query.center.push_back(a * static_cast<double>(q));
      std::vector<IntVec> expect;
      for (const auto& p : oracle::fiber_brute4(q)) {
        double d2 = 0;
        for (int i = 0; i < 4; ++i) {
          const double d = static_cast<double>(p[static_cast<std::size_t>(i)]) - query.center[static_cast<std::size_t>(i)];
          d2 += d * d;
        }
        if (d2 < c * c) expect.push_back(p);
      }
      CHECK(box_search(query) == expect);
    }
  }
}

TEST_CASE("box search at the edges") {
  SUBCASE("pole, small radius") {
    BoxQuery query{3, 7, {0, 0, 0, 7}, 0.9};
    CHECK(box_search(query) == std::vector<IntVec>{{0, 0, 0, 7}});
  }
  SUBCASE("radius wider than the fiber") {
    BoxQuery query{3, 2, {0, 0, 0, 2}, 10};
    CHECK(box_search(query).size() == fiber_points(3, 2).size());
  }
  SUBCASE("128-bit path") {
    // (2 s m, m^2 - s^2) with q = m^2 + s^2 above 3e9
    const std::int64_t m = 60000, s = 7;
    const std::int64_t q = m * m + s * s;
    const IntVec p = {2 * s * m, 0, 0, m * m - s * s};
    BoxQuery query{3, q, {}, 0.5};
    for (auto x : p) query.center.push_back(static_cast<double>(x));
    CHECK(box_search(query) == std::vector<IntVec>{p});
  }
  SUBCASE("marginal points are reported but not counted") {
    // (3,4,0,0)/5 at distance exactly 1 from the center (3,4,0,1)
    BoxQuery query{3, 5, {3, 4, 0, 1}, 1.0};
    int inside = 0, marginal = 0;
    for_each_box_point(query, [&](const BoxHit& hit) {
      inside += hit.inside;
      marginal += hit.marginal;
    });
    CHECK(inside == 0);
    CHECK(marginal >= 1);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(box_search(BoxQuery{3, 0, {0, 0, 0, 0}, 1}), ValidationError);
    CHECK_THROWS_AS(box_search(BoxQuery{3, 1, {0, 0, 1}, 1}), DimensionError);
    CHECK_THROWS_AS(box_search(BoxQuery{3, 1, {0, 0, 0, 1}, 0}), ValidationError);
    CHECK_THROWS_AS(box_search(BoxQuery{16, 1, RealVec(17, 0.0), 1}), DimensionError);
  }
}

TEST_CASE("capability limits") {
  CHECK_THROWS_AS(fiber_points(3, 1001), CapabilityError);
  CHECK_NOTHROW(fiber_points(3, 40, 40));
  CHECK_THROWS_AS(count_cone_points_below(3, 10001), CapabilityError);
  CHECK(count_cone_points_below(3, 1) == 0);
  CHECK(count_cone_points_below(3, 2) == 8);  // the 8 points +-e_i at q = 1
}

TEST_CASE("cone growth") {
  const std::int64_t grid[] = {10, 50, 100};
  const auto counts = cone_growth(3, grid);
  std::int64_t brute = 0;
  for (std::int64_t q = 1; q < 100; ++q) {
    brute += oracle::r4_by_factorization(q * q);
    if (q == 9) CHECK(counts[0] == brute);
    if (q == 49) CHECK(counts[1] == brute);
  }
  CHECK(counts[2] == brute);
  const std::int64_t bad[] = {50, 10};
  CHECK_THROWS_AS(cone_growth(3, bad), ValidationError);

  // the fit recovers an exact power law
  const double xs[] = {10, 20, 40, 80, 160};
  double ys[5];
  for (int i = 0; i < 5; ++i) ys[i] = 2.5 * std::pow(xs[i], 3.0);
  CHECK(fit_cone_growth(xs, ys) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS(fit_cone_growth(std::span<const double>(xs, 4), std::span<const double>(ys, 4)));
}
