#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "lightcone/errors.hpp"
#include "lightcone/numerics.hpp"
#include "lightcone/rng.hpp"
#include "lightcone/spectral.hpp"

using namespace lightcone;

TEST_CASE("exceptional point") {
  CHECK(s_n(3) == 2);
  CHECK(s_n(4) == 3);
  CHECK(s_n(5) == 3);
  CHECK(s_n(10) == 6);
}

TEST_CASE("P_d basics") {
  CHECK(p_d(3, 2.0, 0) == 1);
  CHECK(p_d(5, Complex(3.3, -7), 0) == Complex(1, 0));
  for (double s : {1.6, 2.2, 2.9}) CHECK(p_d(3, s, 1) == doctest::Approx((3 - s) / s));
  // telescoping: prod (i+1)/(i+2) = 1/(d+1)
  for (int d : {1, 2, 10, 64, 65, 100, 999, 10000}) {
    CHECK(std::abs(p_d(3, 2.0, d) * (d + 1) - 1) <= 1e-12);
  }
  CHECK_THROWS_AS(p_d(3, -2.0, 5), DomainError);
  CHECK_NOTHROW(p_d(3, -2.0, 2));
  CHECK_THROWS_AS(p_d(3, 0.0, 1), DomainError);
  CHECK(p_d(3, 4.0, 3) == 0);  // factor n - s + 1 = 0
}

TEST_CASE("log-space product agrees with the direct one") {
  CounterRng rng(51, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(5));
    const Complex s(n / 2.0 + rng.uniform01() * n / 2.0, (rng.uniform01() - 0.5) * 40);
    PdAccumulator acc(n, s);
    for (int d = 0; d <= 64; ++d) {
      const Complex direct = p_d(n, s, d);
      CHECK(std::abs(acc.value() - direct) <= 1e-10 * std::abs(direct));
      acc.advance();
    }
  }
}

TEST_CASE("reflection") {
  CounterRng rng(52, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));
    const double s = 0.3 + (n - 0.6) * rng.uniform01();
    const int d = static_cast<int>(rng.below(300));
    CHECK(std::abs(p_d(n, n - s, d) * p_d(n, s, d) - 1) <= 1e-10);
  }
}

TEST_CASE("real asymptotic ratio") {
  const RatioSweep exact = check_pd_real_asymptotic(3, 2.0, 10000);
  CHECK(std::abs(exact.inf_ratio - 1) <= 1e-12);
  CHECK(std::abs(exact.sup_ratio - 1) <= 1e-12);

  const RatioSweep four = check_pd_real_asymptotic(4, 3.0, 10000, true);
  CHECK(four.inf_ratio >= 1e-2);
  CHECK(four.sup_ratio <= 1e2);
  const auto r = [&](int d) { return four.points[static_cast<std::size_t>(d)].normalized_ratio; };
  CHECK(std::abs(r(10000) - r(5000)) < std::abs(r(100) - r(50)));
  CHECK(std::abs(r(100) - r(50)) < std::abs(r(10) - r(5)));

  const RatioSweep none = check_pd_real_asymptotic(5, 3.0, 0);
  CHECK(none.inf_ratio == 1);
  CHECK(none.sup_ratio == 1);
  CHECK_THROWS_AS(check_pd_real_asymptotic(3, 1.5, 10), ValidationError);
  CHECK_THROWS_AS(check_pd_real_asymptotic(3, 3.0, 10), ValidationError);
}

TEST_CASE("complex bound") {
  std::vector<double> ts;
  for (int t = 1; t <= 100; ++t) ts.push_back(t);
  const double worst = check_pd_complex_bound(3, 1.75, ts, 1000, 0.1);
  CHECK(std::isfinite(worst));
  CHECK(worst > 0);
  CHECK(check_pd_complex_bound(3, 1.75, ts, 0, 0.1) <= 1);
  const double zero[] = {0.5};
  CHECK_THROWS_AS(check_pd_complex_bound(3, 1.75, zero, 10, 0.1), ValidationError);
  CHECK_THROWS_AS(check_pd_complex_bound(3, 1.75, ts, 10, 0), ValidationError);
}

TEST_CASE("Mellin transform of an interval indicator") {
  CHECK(mellin_interval(1, std::exp(1.0), 1.0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(mellin_interval(2, 2, 1.3) == 0);
  CHECK(mellin_interval(2, 5, 0.0) == doctest::Approx(std::log(2.5)));
  CHECK_THROWS_AS(mellin_interval(0, 1, 1.0), ValidationError);

  CounterRng rng(53, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 0.1 + 2 * rng.uniform01();
    const double b = a * (1.05 + 4 * rng.uniform01());
    const double s = -3 + 6 * rng.uniform01();
    const double exact = mellin_interval(a, b, s);
    CHECK(std::abs(exact - oracle::mellin_simpson(a, b, s)) <= 1e-10 * std::max(1.0, std::abs(exact)));
    CHECK(std::abs(mellin_interval(a, b, Complex(s, 0)).real() - exact) <= 1e-12 * std::abs(exact));
    const double m = a + (b - a) * rng.uniform01();
    CHECK(std::abs(mellin_interval(a, m, s) + mellin_interval(m, b, s) - exact) <= 1e-12);
  }
}

TEST_CASE("flowed window profile") {
  const RadialDecay zero = radial_profile_decay(3, 1.5, 0);
  CHECK(zero.lo == 1.5);
  CHECK(zero.hi == doctest::Approx(1.5 * std::exp(1.0)));
  for (int t = 1; t <= 5; ++t) {
    const RadialDecay a = radial_profile_decay(3, 1.5, t - 1), b = radial_profile_decay(3, 1.5, t);
    CHECK(a.lo / b.lo == doctest::Approx(std::exp(1.0)));
    CHECK(a.hi / b.hi == doctest::Approx(std::exp(1.0)));
    CHECK(b.mass_bound < a.mass_bound);
  }
  CHECK(zero.sigma == doctest::Approx(0.5 + 0.25 - 2.0 / 3));
  CHECK_THROWS_AS(radial_profile_decay(3, 1, -1), ValidationError);
}

TEST_CASE("truncated pairing decays along the flow") {
  std::vector<double> ts, ms;
  double previous = INFINITY;
  for (int t = 1; t <= 6; ++t) {
    const double m = std::abs(m_proxy(3, 1.0, t, 50));
    CHECK(m < previous);
    previous = m;
    ts.push_back(t);
    ms.push_back(std::log(m));
  }
  CHECK(least_squares_slope(ts, ms, 6) < 0);
}

TEST_CASE("harmonic dimensions") {
  for (int d = 0; d < 10; ++d) {
    CHECK(harmonic_dimension(2, d) == 2 * d + 1);
    CHECK(harmonic_dimension(3, d) == (d + 1) * (d + 1));
  }
}

TEST_CASE("sweep CSV") {
  const RatioSweep s = check_pd_real_asymptotic(3, 2.0, 2, true);
  CHECK(ratio_sweep_csv(s) == "d,value,normalized_ratio\r\n0,1,1\r\n1,0.5,1\r\n2,0.33333333333333331,1\r\n");
}
