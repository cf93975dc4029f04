#include "lightcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lightcone/errors.hpp"

namespace lightcone {

namespace {

void require_length(int n, std::size_t size) {
  if (n < 1 || size != static_cast<std::size_t>(n) + 2) {
    throw DimensionError("expected a vector of length n+2 = " +
                         std::to_string(n + 2) + ", got " +
                         std::to_string(size));
  }
}

// One strict or weak inequality lhs < rhs (lhs <= rhs).
struct Constraint {
  bool satisfied;
  bool near;
};

Constraint less(double lhs, double rhs) {
  return {lhs < rhs, std::abs(lhs - rhs) <= kMarginTol * std::max(1.0, std::abs(rhs))};
}

Constraint less_equal(double lhs, double rhs) {
  return {lhs <= rhs, std::abs(lhs - rhs) <= kMarginTol * std::max(1.0, std::abs(rhs))};
}

// x_{n+2} comparisons: heights of lattice points are exact integers (rotations
// fix the last coordinate), so these never contribute float uncertainty.
Constraint exact(bool satisfied) { return {satisfied, false}; }

// The verdict is marginal when flipping the near constraints could change it.
Verdict combine(std::initializer_list<Constraint> cs) {
  bool inside = true;
  bool any_near = false;
  bool all_far_ok = true;
  for (const auto& c : cs) {
    inside = inside && c.satisfied;
    any_near = any_near || c.near;
    if (!c.near && !c.satisfied) all_far_ok = false;
  }
  return {inside, any_near && all_far_ok};
}

}  // namespace

__int128 evaluate_q(int n, std::span<const std::int64_t> x) {
  require_length(n, x.size());
  __int128 s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    s += static_cast<__int128>(x[i]) * x[i];
  }
  s -= static_cast<__int128>(x.back()) * x.back();
  return s;
}

double evaluate_q(int n, std::span<const double> x) {
  require_length(n, x.size());
  double s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += x[i] * x[i];
  return s - x.back() * x.back();
}

// ---------------------------------------------------------------------------

ConePoint::ConePoint(int n, IntVec coords) : n_(n), coords_(std::move(coords)) {
  if (n < 3) throw ValidationError("ConePoint requires n >= 3");
  if (evaluate_q(n, coords_) != 0) throw ValidationError("ConePoint: Q(x) != 0");
  if (coords_.back() < 1) throw ValidationError("ConePoint: x_{n+2} must be >= 1");
}

SpherePoint::SpherePoint(RealVec coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw DimensionError("SpherePoint needs at least 2 coordinates");
  double s = 0;
  for (double c : coords_) s += c * c;
  if (std::abs(std::sqrt(s) - 1.0) > 1e-12) {
    throw ValidationError("SpherePoint: |alpha| differs from 1 by more than 1e-12");
  }
}

SpherePoint SpherePoint::normalized(RealVec v) {
  double s = 0;
  for (double c : v) s += c * c;
  const double norm = std::sqrt(s);
  if (!(norm > 0) || !std::isfinite(norm)) {
    throw ValidationError("SpherePoint::normalized: zero or non-finite vector");
  }
  for (double& c : v) c /= norm;
  return SpherePoint(std::move(v));
}

SpherePoint SpherePoint::pole(int n) {
  RealVec e(static_cast<std::size_t>(n) + 1, 0.0);
  e.back() = 1.0;
  return SpherePoint(std::move(e));
}

SpherePoint rational_point_of(const ConePoint& x) {
  const auto p = x.numerator();
  const double q = static_cast<double>(x.denominator());
  RealVec a(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) a[i] = static_cast<double>(p[i]) / q;
  return SpherePoint(std::move(a));
}

// ---------------------------------------------------------------------------

Rotation::Rotation(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) {
    throw DimensionError("Rotation: matrix must be square of size n+1 >= 2");
  }
  const auto id = Eigen::MatrixXd::Identity(m_.rows(), m_.cols());
  const double ortho = (m_.transpose() * m_ - id).cwiseAbs().maxCoeff();
  if (!(ortho <= 1e-10)) throw ValidationError("Rotation: M^T M differs from I");
  if (std::abs(m_.determinant() - 1.0) > 1e-10) {
    throw ValidationError("Rotation: det(M) != +1");
  }
}

Rotation Rotation::identity(int n) {
  return Rotation(Eigen::MatrixXd::Identity(n + 1, n + 1));
}

Rotation Rotation::plane(int n, int from, int to, double angle) {
  if (from < 0 || to < 0 || from > n || to > n || from == to) {
    throw DimensionError("Rotation::plane: bad axis indices");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m(from, from) = c;
  m(to, to) = c;
  m(to, from) = s;
  m(from, to) = -s;
  return Rotation(std::move(m));
}

RealVec Rotation::apply(std::span<const double> x) const {
  const auto dim = static_cast<std::size_t>(m_.rows());
  if (x.size() != dim + 1) throw DimensionError("Rotation::apply: expected length n+2");
  RealVec y(x.size());
  for (std::size_t i = 0; i < dim; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < dim; ++j) s += m_(i, j) * x[j];
    y[i] = s;
  }
  y.back() = x.back();
  return y;
}

RealVec Rotation::apply(std::span<const std::int64_t> x) const {
  RealVec xr(x.begin(), x.end());
  return apply(xr);
}

Rotation Rotation::operator*(const Rotation& rhs) const {
  if (rhs.m_.rows() != m_.rows()) throw DimensionError("Rotation product: size mismatch");
  return Rotation(m_ * rhs.m_);
}

Rotation rotation_to_pole(const SpherePoint& alpha) {
  const int n = alpha.dimension();
  const auto dim = static_cast<Eigen::Index>(n) + 1;
  Eigen::VectorXd a(dim);
  for (Eigen::Index i = 0; i < dim; ++i) a(i) = alpha[static_cast<std::size_t>(i)];

  double lateral = 0;  // |alpha_1..alpha_n|^2
  for (Eigen::Index i = 0; i + 1 < dim; ++i) lateral += a(i) * a(i);
  if (lateral == 0 && a(dim - 1) > 0) return Rotation::identity(n);

  // Householder reflection H = I - 2 w w^T / |w|^2, w = alpha - e_{n+1},
  // takes alpha to e_{n+1}. The last entry alpha_{n+1} - 1 is formed as
  // -lateral / (1 + alpha_{n+1}) when alpha_{n+1} > 0.
  Eigen::VectorXd w = a;
  w(dim - 1) = a(dim - 1) > 0 ? -lateral / (1.0 + a(dim - 1)) : a(dim - 1) - 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim) - (2.0 / w.squaredNorm()) * (w * w.transpose());

  // det H = -1; flipping e_n (fixes e_{n+1}) restores det = +1. At the
  // antipode this yields the pi-rotation in the (e_n, e_{n+1}) plane.
  h.row(dim - 2) *= -1.0;
  return Rotation(std::move(h));
}

SpherePoint sphere_point_of_rotation(const Rotation& k) {
  const auto& m = k.matrix();
  const auto last = m.rows() - 1;
  RealVec a(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) a[static_cast<std::size_t>(j)] = m(last, j);
  return SpherePoint::normalized(std::move(a));
}

// ---------------------------------------------------------------------------

ConeCoords cone_coords(double w2, double axial, double height) {
  ConeCoords c;
  c.w2 = w2;
  c.axial = axial;
  c.height = height;
  if (axial >= 0) {
    c.u = height + axial;
    c.v = c.u > 0 ? w2 / c.u : 0.0;
  } else {
    c.v = height - axial;
    c.u = c.v > 0 ? w2 / c.v : 0.0;
  }
  return c;
}

ConeCoords cone_coords(std::span<const double> x) {
  if (x.size() < 3) throw DimensionError("cone_coords: vector too short");
  double w2 = 0;
  for (std::size_t i = 0; i + 2 < x.size(); ++i) w2 += x[i] * x[i];
  return cone_coords(w2, x[x.size() - 2], x.back());
}

RealVec FlowElement::apply(std::span<const double> x) const {
  if (x.size() < 3) throw DimensionError("apply_flow: vector too short");
  RealVec y(x.begin(), x.end());
  const std::size_t ax = x.size() - 2;
  const double u = x[ax + 1] + x[ax];
  const double v = x[ax + 1] - x[ax];
  const double u2 = std::exp(-t) * u;
  const double v2 = std::exp(t) * v;
  y[ax] = 0.5 * (u2 - v2);
  y[ax + 1] = 0.5 * (u2 + v2);
  return y;
}

RealVec apply_flow(FlowElement a, std::span<const double> x) { return a.apply(x); }

// ---------------------------------------------------------------------------

double DomainSpec::default_r0(double c) {
  return std::max({1.0, std::log(2.0 / c), std::log(c)}) + 1.0;
}

double DomainSpec::default_T0(double c) {
  return std::max(2.0, 2.0 * std::log((c * c + c) / 2.0 + 2.0));
}

DomainSpec::DomainSpec(double c, double T, std::optional<int> l)
    : c_(c), T_(T), l_(l), r0_(0), T0_(0) {
  if (!(c > 0) || !std::isfinite(c)) throw ValidationError("DomainSpec: c must be > 0");
  if (!std::isfinite(T)) throw ValidationError("DomainSpec: T must be finite");
  if (l_ && *l_ < 1) throw ValidationError("DomainSpec: l must be >= 1");
  r0_ = default_r0(c);
  T0_ = default_T0(c);
}

double DomainSpec::c_l() const {
  if (!l_) throw PreconditionError("DomainSpec: c_l requested without l");
  const double l = *l_;
  return c_ * std::sqrt(l / (l + 1.0));
}

DomainSpec DomainSpec::with_T(double T) const {
  DomainSpec s = *this;
  if (!std::isfinite(T)) throw ValidationError("DomainSpec: T must be finite");
  s.T_ = T;
  return s;
}

DomainSpec DomainSpec::with_l(int l) const {
  if (l < 1) throw ValidationError("DomainSpec: l must be >= 1");
  DomainSpec s = *this;
  s.l_ = l;
  return s;
}

DomainSpec DomainSpec::with_constants(double r0, double T0) const {
  if (!(r0 > 0) || !(T0 > 0)) throw ValidationError("DomainSpec: r0, T0 must be > 0");
  DomainSpec s = *this;
  s.r0_ = r0;
  s.T0_ = T0;
  return s;
}

Verdict classify(Domain which, const ConeCoords& x, const DomainSpec& spec) {
  const double c = spec.c();
  switch (which) {
    case Domain::E:
      return combine({less(2.0 * x.height * x.v, c * c),
                      exact(1.0 <= x.height),
                      exact(x.height < std::cosh(spec.T()))});
    case Domain::F:
      return combine({less(x.w2, c * c),
                      less_equal(c, x.u),
                      less(x.u, c * std::exp(spec.T()))});
    case Domain::F_l: {
      const double cl = spec.c_l();
      return combine({less(x.w2, cl * cl),
                      less_equal(c, x.u),
                      less(x.u, c * std::exp(spec.T()))});
    }
  }
  return {};
}

Verdict classify_C0(const ConeCoords& x, const DomainSpec& spec) {
  const double c = spec.c();
  return combine({exact(x.height <= (c * c + c) / 2.0 + 1.0)});
}

Verdict classify_Cl(const ConeCoords& x, const DomainSpec& spec) {
  if (!spec.l()) throw PreconditionError("classify_Cl: DomainSpec has no l");
  const double l = *spec.l();
  const Verdict c0 = classify_C0(x, spec);
  if (c0.inside) return c0;
  const Constraint ratio = less_equal(std::abs(x.axial) / x.height, l / (l + 1.0));
  return combine({ratio});
}

void require_on_cone(std::span<const double> x) {
  if (x.size() < 3) throw DimensionError("expected a vector of length n+2 >= 3");
  const int n = static_cast<int>(x.size()) - 2;
  double norm2 = 0;
  for (double xi : x) norm2 += xi * xi;
  if (std::abs(evaluate_q(n, x)) > kConeTol * norm2 || !(x.back() > 0)) {
    throw ValidationError("point is not on the positive light cone");
  }
}

bool in_E(std::span<const double> x, const DomainSpec& spec) {
  require_on_cone(x);
  return classify(Domain::E, cone_coords(x), spec).inside;
}

bool in_F(std::span<const double> x, const DomainSpec& spec) {
  require_on_cone(x);
  return classify(Domain::F, cone_coords(x), spec).inside;
}

bool in_F_l(std::span<const double> x, const DomainSpec& spec) {
  require_on_cone(x);
  return classify(Domain::F_l, cone_coords(x), spec).inside;
}

bool in_C0(std::span<const double> x, const DomainSpec& spec) {
  require_on_cone(x);
  return classify_C0(cone_coords(x), spec).inside;
}

bool in_Cl(std::span<const double> x, const DomainSpec& spec) {
  require_on_cone(x);
  return classify_Cl(cone_coords(x), spec).inside;
}

}  // namespace lightcone
