// cone.hpp
//
// Geometry of the quadratic form
//
//     Q(x) = x_1^2 + ... + x_{n+1}^2 - x_{n+2}^2,      x in R^{n+2},
//
// its positive light cone C = {Q = 0, x_{n+2} > 0}, the rotations
// K = SO(n+1) acting on the first n+1 coordinates, and the diagonal flow
// a_t acting on (x_{n+1}, x_{n+2}).
//
// A rational point p/q on S^n is the integer cone point (p, q). For a
// rotation k the target direction is alpha_k = k^T e_{n+1}, and
//
//     ||alpha_k - p/q|| < c/q   <=>   2 x_{n+2} (x_{n+2} - x_{n+1}) < c^2
//
// with x = k(p, q). All domain logic is done in light-cone coordinates
//
//     u = x_{n+2} + x_{n+1},   v = x_{n+2} - x_{n+1},   u v = x_1^2+...+x_n^2
//
// where a_t is diagonal: (u, v) -> (e^{-t} u, e^{t} v).

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lightcone {

using IntVec = std::vector<std::int64_t>;
using RealVec = std::vector<double>;

/// Relative distance to a strict/weak boundary below which a point is
/// reported as marginal.
inline constexpr double kMarginTol = 1e-8;

/// Relative tolerance |Q(x)| <= kConeTol * |x|^2 for real inputs.
inline constexpr double kConeTol = 1e-9;

/// Exact Q for an integer vector of length n+2.
__int128 evaluate_q(int n, std::span<const std::int64_t> x);
double evaluate_q(int n, std::span<const double> x);

/// Integer point on the positive light cone: Q(x) = 0 and x_{n+2} >= 1.
class ConePoint {
 public:
  ConePoint(int n, IntVec coords);

  int dimension() const { return n_; }
  std::span<const std::int64_t> coords() const { return coords_; }
  std::span<const std::int64_t> numerator() const {
    return std::span<const std::int64_t>(coords_).first(coords_.size() - 1);
  }
  std::int64_t denominator() const { return coords_.back(); }

 private:
  int n_;
  IntVec coords_;
};

/// Unit vector alpha in R^{n+1}.
class SpherePoint {
 public:
  explicit SpherePoint(RealVec coords);
  static SpherePoint normalized(RealVec v);
  static SpherePoint pole(int n);

  int dimension() const { return static_cast<int>(coords_.size()) - 1; }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  RealVec coords_;
};

SpherePoint rational_point_of(const ConePoint& x);

/// Element of SO(n+1), extended to R^{n+2} by fixing the last coordinate.
class Rotation {
 public:
  explicit Rotation(Eigen::MatrixXd m);

  static Rotation identity(int n);
  /// Rotation by `angle` in the (e_from, e_to) plane taking e_from towards
  /// e_to; indices are 0-based into R^{n+1}.
  static Rotation plane(int n, int from, int to, double angle);

  int dimension() const { return static_cast<int>(m_.rows()) - 1; }
  const Eigen::MatrixXd& matrix() const { return m_; }

  RealVec apply(std::span<const double> x) const;
  RealVec apply(std::span<const std::int64_t> x) const;
  Rotation operator*(const Rotation& rhs) const;

 private:
  Eigen::MatrixXd m_;
};

/// k in SO(n+1) with k alpha = e_{n+1}.
Rotation rotation_to_pole(const SpherePoint& alpha);
/// alpha_k = k^T e_{n+1}.
SpherePoint sphere_point_of_rotation(const Rotation& k);

/// Light-cone coordinates of x in R^{n+2}. `w2` is the squared norm of the
/// first n coordinates; on the cone u*v == w2 and the smaller of u, v is
/// recovered as w2 / (larger) to avoid cancellation.
struct ConeCoords {
  double u = 0;
  double v = 0;
  double w2 = 0;
  double height = 0;  // x_{n+2}
  double axial = 0;   // x_{n+1}
};

ConeCoords cone_coords(std::span<const double> x);
/// Same, from an already-split representation (w2, x_{n+1}, x_{n+2}).
ConeCoords cone_coords(double w2, double axial, double height);

struct FlowElement {
  double t = 0;
  RealVec apply(std::span<const double> x) const;
};

RealVec apply_flow(FlowElement a, std::span<const double> x);

/// Parameters of the approximation domains E_{T,c}, F_{T,c}, F_{T,c,l} and
/// the exclusion sets C_0, C_l.
class DomainSpec {
 public:
  DomainSpec(double c, double T, std::optional<int> l = std::nullopt);

  double c() const { return c_; }
  double T() const { return T_; }
  std::optional<int> l() const { return l_; }
  /// c * sqrt(l / (l+1)); requires l.
  double c_l() const;
  double r0() const { return r0_; }
  double T0() const { return T0_; }

  DomainSpec with_T(double T) const;
  DomainSpec with_l(int l) const;
  DomainSpec with_constants(double r0, double T0) const;

  static double default_r0(double c);
  static double default_T0(double c);

 private:
  double c_;
  double T_;
  std::optional<int> l_;
  double r0_;
  double T0_;
};

enum class Domain { E, F, F_l };

struct Verdict {
  bool inside = false;
  bool marginal = false;
};

Verdict classify(Domain which, const ConeCoords& x, const DomainSpec& spec);
Verdict classify_C0(const ConeCoords& x, const DomainSpec& spec);
Verdict classify_Cl(const ConeCoords& x, const DomainSpec& spec);

// Membership tests on raw vectors; x must lie on the cone within kConeTol.
bool in_E(std::span<const double> x, const DomainSpec& spec);
bool in_F(std::span<const double> x, const DomainSpec& spec);
bool in_F_l(std::span<const double> x, const DomainSpec& spec);
bool in_C0(std::span<const double> x, const DomainSpec& spec);
bool in_Cl(std::span<const double> x, const DomainSpec& spec);

/// Throws ValidationError when x is off the cone (or has x_{n+2} <= 0).
void require_on_cone(std::span<const double> x);

}  // namespace lightcone
