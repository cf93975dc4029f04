#include <cmath>
#include <numbers>

#include "doctest.h"

#include "lightcone/cone.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/rng.hpp"
#include "lightcone/verify.hpp"

using namespace lightcone;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("quadratic form") {
  const std::int64_t pyth[] = {3, 4, 0, 0, 5};
  const std::int64_t pole[] = {0, 0, 0, 1, 1};
  const std::int64_t neg[] = {1, 1, 1, 0, 2};
  CHECK(evaluate_q(3, pyth) == 0);
  CHECK(evaluate_q(3, pole) == 0);
  CHECK(evaluate_q(3, neg) == -1);
  const std::int64_t short_vec[] = {1, 2, 3};
  CHECK_THROWS_AS(evaluate_q(3, short_vec), DimensionError);
  const double real[] = {0.6, 0.8, 0, 0, 1};
  CHECK(std::abs(evaluate_q(3, real)) < 1e-15);
}

TEST_CASE("cone points and rational points") {
  CHECK_THROWS_AS(ConePoint(3, {1, 0, 0, 0, 2}), ValidationError);
  CHECK_THROWS_AS(ConePoint(3, {0, 0, 0, -1, -1}), ValidationError);
  CHECK_THROWS(ConePoint(2, {0, 0, 1, 1}));

  auto check = [](IntVec x, RealVec expect) {
    const SpherePoint a = rational_point_of(ConePoint(3, std::move(x)));
    CHECK(max_abs_diff(a.coords(), expect) < 1e-15);
  };
  check({0, 0, 0, 2, 2}, {0, 0, 0, 1});
  check({3, 4, 0, 0, 5}, {0.6, 0.8, 0, 0});
  check({1, 2, 2, 4, 5}, {0.2, 0.4, 0.4, 0.8});
}

TEST_CASE("rotation to the pole") {
  SUBCASE("pole gives the identity") {
    const Rotation k = rotation_to_pole(SpherePoint::pole(3));
    CHECK((k.matrix() - Eigen::MatrixXd::Identity(4, 4)).norm() == 0);
  }
  SUBCASE("antipode gives the pi rotation in the last two coordinates") {
    const Rotation k = rotation_to_pole(SpherePoint({0, 0, 0, -1}));
    Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(4, 4);
    expect(2, 2) = -1;
    expect(3, 3) = -1;
    CHECK((k.matrix() - expect).norm() < 1e-15);
  }
  SUBCASE("random alpha") {
    CounterRng rng(11, 0);
    for (int n : {3, 4, 7}) {
      for (int trial = 0; trial < 200; ++trial) {
        RealVec g(static_cast<std::size_t>(n) + 1);
        for (auto& x : g) x = rng.normal();
        if (trial == 0) g.assign(g.size(), 0.0), g.back() = -1, g[0] = 1e-9;  // near antipode
        const SpherePoint alpha = SpherePoint::normalized(g);
        const Rotation k = rotation_to_pole(alpha);
        const auto& m = k.matrix();
        Eigen::VectorXd a(n + 1);
        for (int i = 0; i <= n; ++i) a(i) = alpha[static_cast<std::size_t>(i)];
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
        e(n) = 1;
        CHECK((m * a - e).norm() <= 1e-10);
        CHECK((m.transpose() * m - Eigen::MatrixXd::Identity(n + 1, n + 1)).norm() <= 1e-10);
        CHECK(std::abs(m.determinant() - 1) <= 1e-10);
        const SpherePoint back = sphere_point_of_rotation(k);
        CHECK(max_abs_diff(back.coords(), alpha.coords()) <= 1e-10);
      }
    }
  }
}

TEST_CASE("sphere point of a rotation") {
  CHECK(max_abs_diff(sphere_point_of_rotation(Rotation::identity(3)).coords(),
                     SpherePoint::pole(3).coords()) == 0);
  // rotating e_{n+1} towards e_1 by theta: alpha = (-sin, 0, 0, cos)
  const double theta = 0.37;
  const Rotation k = Rotation::plane(3, 3, 0, theta);
  const RealVec expect = {-std::sin(theta), 0, 0, std::cos(theta)};
  CHECK(max_abs_diff(sphere_point_of_rotation(k).coords(), expect) < 1e-15);
}

TEST_CASE("rotations preserve the cone and the height") {
  CounterRng rng(12, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const Rotation k = random_rotation(rng, 3);
    const IntVec z = random_cone_point(rng, 3, 100000);
    const RealVec x = k.apply(std::span<const std::int64_t>(z));
    const double q = static_cast<double>(z.back());
    CHECK(std::abs(evaluate_q(3, x)) <= 1e-9 * q * q);
    CHECK(x.back() == q);
  }
  CHECK_THROWS_AS(Rotation(Eigen::MatrixXd::Identity(3, 3) * 2.0), ValidationError);
  Eigen::MatrixXd reflection = Eigen::MatrixXd::Identity(3, 3);
  reflection(0, 0) = -1;
  CHECK_THROWS_AS(Rotation{reflection}, ValidationError);
}

TEST_CASE("domain membership examples") {
  const RealVec pole = {0, 0, 0, 1, 1};
  CHECK(in_E(pole, DomainSpec(1, 1)));
  CHECK(in_F(pole, DomainSpec(1, 1)));
  CHECK_FALSE(in_E(RealVec{1, 0, 0, 0, 1}, DomainSpec(0.5, 2)));
  CHECK_THROWS_AS(in_E(RealVec{1, 0, 0, 0, 2}, DomainSpec(1, 1)), ValidationError);
  CHECK_THROWS_AS(DomainSpec(0, 1), ValidationError);
  CHECK_THROWS_AS(DomainSpec(1, 1, 0), ValidationError);

  // C_0 is a height cap, C_l a cone around the axis
  const DomainSpec spec(1, 5, 4);
  CHECK(in_C0(RealVec{0, 0, 0, 2, 2}, spec));     // h = 2 <= 2
  CHECK_FALSE(in_C0(RealVec{0, 0, 0, 3, 3}, spec));
  CHECK(in_Cl(RealVec{3, 0, 0, 0, 3}, spec));     // |x_{n+1}|/h = 0
  CHECK_FALSE(in_Cl(RealVec{0, 0, 0, 3, 3}, spec));
  CHECK(spec.c_l() == doctest::Approx(std::sqrt(0.8)));
}

TEST_CASE("flow") {
  const RealVec pole = {0, 0, 0, 1, 1};
  for (double t : {0.0, 0.5, -2.0, 7.0}) {
    const RealVec y = apply_flow({t}, pole);
    CHECK(y[3] == doctest::Approx(std::exp(-t)).epsilon(1e-14));
    CHECK(y[4] == doctest::Approx(std::exp(-t)).epsilon(1e-14));
  }
  CounterRng rng(13, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const IntVec z = random_cone_point(rng, 3, 1000);
    const RealVec x(z.begin(), z.end());
    const double s = rng.uniform01() * 4 - 2, t = rng.uniform01() * 4 - 2;
    const RealVec once = apply_flow({s + t}, x);
    const RealVec twice = apply_flow({s}, apply_flow({t}, x));
    const double scale = x.back() * std::exp(4.0);
    CHECK(max_abs_diff(once, twice) <= 1e-9 * scale);
    CHECK(std::abs(evaluate_q(3, once)) <= 1e-9 * scale * scale);
    CHECK(max_abs_diff(apply_flow({0}, x), x) == 0);
    // u scales by e^{-t}, v by e^{t}
    const ConeCoords before = cone_coords(x), after = cone_coords(apply_flow({t}, x));
    CHECK(after.u == doctest::Approx(before.u * std::exp(-t)).epsilon(1e-12));
    CHECK(after.w2 == doctest::Approx(before.w2).epsilon(1e-12));
  }
}

TEST_CASE("window of a flowed unit domain") {
  // x in F_{1,c} iff a_{-j} x has u in [c e^j, c e^{j+1}) and uv < c^2
  CounterRng rng(14, 0);
  const double c = 1;
  for (int trial = 0; trial < 1000; ++trial) {
    const IntVec z = random_cone_point(rng, 3, 200);
    const RealVec x(z.begin(), z.end());
    const int j = static_cast<int>(rng.below(6));
    const ConeCoords y = cone_coords(apply_flow({static_cast<double>(-j)}, x));
    const bool in_window = y.w2 < c * c && c * std::exp(j) <= y.u && y.u < c * std::exp(j + 1);
    const Verdict v = classify(Domain::F, cone_coords(x), DomainSpec(c, 1));
    if (v.marginal) continue;
    CHECK(v.inside == in_window);
  }
}

TEST_CASE("cone coordinates avoid cancellation") {
  // nearly on the positive axis: v is tiny but relatively accurate
  const double h = 1e8, w2 = 1e-3;
  const double axial = std::sqrt(h * h - w2);
  const ConeCoords x = cone_coords(w2, axial, h);
  CHECK(x.v == doctest::Approx(w2 / (h + axial)).epsilon(1e-15));
  const ConeCoords y = cone_coords(w2, -axial, h);
  CHECK(y.u == doctest::Approx(w2 / (h + axial)).epsilon(1e-15));
}

TEST_CASE("default sandwich constants") {
  CHECK(DomainSpec::default_r0(1.0) == doctest::Approx(2.0));
  CHECK(DomainSpec::default_r0(0.1) == doctest::Approx(std::log(20.0) + 1));
  // large c: the inclusions need r0 >= log c as well
  CHECK(DomainSpec::default_r0(10.0) == doctest::Approx(std::log(10.0) + 1));
  CHECK(DomainSpec::default_T0(1.0) == doctest::Approx(2 * std::log(3.0)));
  const DomainSpec spec = DomainSpec(1, 5).with_constants(1.5, 3.0);
  CHECK(spec.r0() == 1.5);
  CHECK(spec.T0() == 3.0);
}
