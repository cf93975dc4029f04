// enumerate.hpp
//
// Exact enumeration of integer points on the light cone:
//
//   fiber_points(n, q)   all p in Z^{n+1} with |p|^2 = q^2
//   box_search(query)    those p with |p - center| < radius
//   fiber_count(n, q)    r_{n+1}(q^2) by descent onto a memoized r_2 table
//
// Norm identities are always checked in exact integer arithmetic; only the
// distance to the (irrational) center is a floating point comparison.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lightcone/cone.hpp"
#include "lightcone/errors.hpp"

namespace lightcone {

/// Largest supported ambient dimension n (vectors of length n+2).
inline constexpr int kMaxDimension = 15;

/// Default brute-force bound for materialized fibers.
inline constexpr std::int64_t kFiberBruteForceMax = 1000;

/// Largest Q_cap accepted by count_cone_points_below.
inline constexpr std::int64_t kConeCountCap = 10000;

struct BoxQuery {
  int n = 3;
  std::int64_t q = 1;
  RealVec center;  // length n+1, typically q * alpha
  double radius = 0;

  /// Throws on bad dimension, q < 1 or radius <= 0.
  void validate() const;
};

struct BoxHit {
  std::span<const std::int64_t> p;
  double dist2;   // |p - center|^2
  bool inside;    // |p - center| < radius
  bool marginal;  // within kMarginTol of the sphere |p - center| = radius
};

struct FiberCount {
  std::int64_t q = 0;
  std::int64_t count = 0;
};

std::int64_t isqrt(std::int64_t m);
__int128 isqrt(__int128 m);

std::vector<IntVec> fiber_points(int n, std::int64_t q,
                                 std::int64_t max_q = kFiberBruteForceMax);

/// All fiber points inside the open ball; ascending lexicographic order.
std::vector<IntVec> box_search(const BoxQuery& query);

/// r_{n+1}(q^2) for q <= 10^4 (larger q fall back to a slower direct loop).
FiberCount fiber_count(int n, std::int64_t q);

/// sum_{q=1}^{Q_cap-1} r_{n+1}(q^2).
std::int64_t count_cone_points_below(int n, std::int64_t q_cap);

/// count_cone_points_below at every Q in `grid` (one sweep).
std::vector<std::int64_t> cone_growth(int n, std::span<const std::int64_t> grid);

/// Least-squares slope of log(count) against log(Q); >= 5 points.
double fit_cone_growth(std::span<const double> q_values, std::span<const double> counts);

/// Memoized r_2(m) = #{(a, b) in Z^2 : a^2 + b^2 = m}, built by enumeration.
class SumOfTwoSquares {
 public:
  explicit SumOfTwoSquares(std::int64_t max_m);

  std::int64_t max_m() const { return max_m_; }
  std::int64_t operator()(std::int64_t m) const;

 private:
  std::int64_t max_m_;
  std::vector<std::uint16_t> table_;
};

/// r_{n+1}(q^2) for all q up to a fixed bound, sharing one r_2 table.
class FiberCounter {
 public:
  FiberCounter(int n, std::int64_t q_max);

  std::int64_t operator()(std::int64_t q) const;
  int dimension() const { return n_; }

 private:
  int n_;
  std::int64_t q_max_;
  SumOfTwoSquares r2_;
};

// ---------------------------------------------------------------------------
// Box search kernel. The first n coordinates are walked over the integer box
// around the center (pruned by partial distance and partial norm); the last
// coordinate is solved by an exact integer square root.

namespace detail {

template <class Wide, class Visit>
class BoxWalker {
 public:
  BoxWalker(const BoxQuery& query, Visit& visit)
      : dims_(query.n + 1),
        center_(query.center.data()),
        radius_(query.radius),
        r2_(query.radius * query.radius),
        q_(query.q),
        q2_(static_cast<Wide>(query.q) * query.q),
        visit_(visit) {
    // Walk a slightly larger ball so that near-boundary misses are seen and
    // can be flagged.
    const double ext = query.radius * (1.0 + kMarginTol) + kMarginTol;
    walk_r2_ = ext * ext;
  }

  void run() { descend(0, 0, 0.0); }

 private:
  void descend(int i, Wide norm2, double dist2) {
    if (i == dims_ - 1) {
      finish(norm2, dist2);
      return;
    }
    const double slack = walk_r2_ - dist2;
    if (slack <= 0) return;
    const double h = std::sqrt(slack);
    const double ci = center_[i];
    auto lo = static_cast<std::int64_t>(std::ceil(ci - h));
    auto hi = static_cast<std::int64_t>(std::floor(ci + h));
    lo = std::max(lo, -q_);
    hi = std::min(hi, q_);
    for (std::int64_t x = lo; x <= hi; ++x) {
      const double d = static_cast<double>(x) - ci;
      const double nd = dist2 + d * d;
      if (nd >= walk_r2_) continue;
      const Wide nn = norm2 + static_cast<Wide>(x) * x;
      if (nn > q2_) continue;
      p_[static_cast<std::size_t>(i)] = x;
      descend(i + 1, nn, nd);
    }
  }

  void finish(Wide norm2, double dist2) {
    const Wide rem = q2_ - norm2;
    const Wide s = isqrt(rem);
    if (s * s != rem) return;
    const auto root = static_cast<std::int64_t>(s);
    const double cl = center_[dims_ - 1];
    emit(-root, cl, dist2);
    if (root != 0) emit(root, cl, dist2);
  }

  void emit(std::int64_t x, double cl, double dist2) {
    const double d = static_cast<double>(x) - cl;
    const double nd = dist2 + d * d;
    if (nd >= walk_r2_) return;
    p_[static_cast<std::size_t>(dims_ - 1)] = x;
    const bool inside = nd < r2_;
    const bool marginal =
        std::abs(std::sqrt(nd) - radius_) <= kMarginTol * std::max(1.0, radius_);
    if (!inside && !marginal) return;
    visit_(BoxHit{std::span<const std::int64_t>(p_.data(), static_cast<std::size_t>(dims_)),
                  nd, inside, marginal});
  }

  int dims_;
  const double* center_;
  double radius_;
  double r2_;
  double walk_r2_ = 0;
  std::int64_t q_;
  Wide q2_;
  Visit& visit_;
  std::array<std::int64_t, kMaxDimension + 1> p_{};
};

// q^2 fits in int64 up to this bound.
inline constexpr std::int64_t kNarrowQMax = 3'000'000'000LL;

}  // namespace detail

/// Calls visit(BoxHit) for every fiber point inside the ball, and for
/// near-boundary points just outside it (inside == false, marginal == true).
template <class Visit>
void for_each_box_point(const BoxQuery& query, Visit&& visit) {
  query.validate();
  if (query.q <= detail::kNarrowQMax) {
    detail::BoxWalker<std::int64_t, Visit> walker(query, visit);
    walker.run();
  } else {
    detail::BoxWalker<__int128, Visit> walker(query, visit);
    walker.run();
  }
}

}  // namespace lightcone
