#include "lightcone/enumerate.hpp"

#include <cmath>
#include <string>

#include "lightcone/numerics.hpp"

namespace lightcone {

void BoxQuery::validate() const {
  if (n < 1 || n > kMaxDimension) throw DimensionError("BoxQuery: unsupported n");
  if (center.size() != static_cast<std::size_t>(n) + 1) {
    throw DimensionError("BoxQuery: center must have length n+1");
  }
  if (q < 1) throw ValidationError("BoxQuery: q must be >= 1");
  if (!(radius > 0) || !std::isfinite(radius)) {
    throw ValidationError("BoxQuery: radius must be positive and finite");
  }
}

std::int64_t isqrt(std::int64_t m) {
  if (m < 0) return -1;
  // the double estimate can be off by one near 2^63; square in 128 bits
  using W = __int128;
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(m)));
  while (s > 0 && static_cast<W>(s) * s > m) --s;
  while (static_cast<W>(s + 1) * (s + 1) <= m) ++s;
  return s;
}

__int128 isqrt(__int128 m) {
  if (m < 0) return -1;
  auto s = static_cast<__int128>(std::sqrt(static_cast<long double>(m)));
  while (s > 0 && s * s > m) --s;
  while ((s + 1) * (s + 1) <= m) ++s;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void check_dimension(int n) {
  if (n < 1 || n > kMaxDimension) {
    throw DimensionError("unsupported dimension n = " + std::to_string(n));
  }
}

class FiberWalker {
 public:
  FiberWalker(int n, std::int64_t q, std::vector<IntVec>& out)
      : dims_(n + 1), q2_(q * q), p_(static_cast<std::size_t>(n) + 1), out_(out) {}

  void descend(int i, std::int64_t norm2) {
    const std::int64_t rem = q2_ - norm2;
    if (i == dims_ - 1) {
      const std::int64_t s = isqrt(rem);
      if (s * s != rem) return;
      p_.back() = -s;
      out_.push_back(p_);
      if (s != 0) {
        p_.back() = s;
        out_.push_back(p_);
      }
      return;
    }
    const std::int64_t bound = isqrt(rem);
    for (std::int64_t x = -bound; x <= bound; ++x) {
      p_[static_cast<std::size_t>(i)] = x;
      descend(i + 1, norm2 + x * x);
    }
  }

 private:
  int dims_;
  std::int64_t q2_;
  IntVec p_;
  std::vector<IntVec>& out_;
};

}  // namespace

std::vector<IntVec> fiber_points(int n, std::int64_t q, std::int64_t max_q) {
  check_dimension(n);
  if (q < 1) throw ValidationError("fiber_points: q must be >= 1");
  if (q > max_q) {
    throw CapabilityError("fiber_points: q = " + std::to_string(q) +
                          " exceeds the brute-force bound " + std::to_string(max_q) +
                          "; use box_search near a target direction instead");
  }
  std::vector<IntVec> out;
  FiberWalker walker(n, q, out);
  walker.descend(0, 0);
  return out;
}

std::vector<IntVec> box_search(const BoxQuery& query) {
  std::vector<IntVec> out;
  for_each_box_point(query, [&](const BoxHit& hit) {
    if (hit.inside) out.emplace_back(hit.p.begin(), hit.p.end());
  });
  return out;
}

// ---------------------------------------------------------------------------

SumOfTwoSquares::SumOfTwoSquares(std::int64_t max_m)
    : max_m_(max_m), table_(static_cast<std::size_t>(max_m) + 1, 0) {
  if (max_m < 0) throw ValidationError("SumOfTwoSquares: negative bound");
  for (std::int64_t a = 0; a * a <= max_m; ++a) {
    const std::int64_t wa = a == 0 ? 1 : 2;
    for (std::int64_t b = 0; a * a + b * b <= max_m; ++b) {
      const std::int64_t wb = b == 0 ? 1 : 2;
      table_[static_cast<std::size_t>(a * a + b * b)] +=
          static_cast<std::uint16_t>(wa * wb);
    }
  }
}

std::int64_t SumOfTwoSquares::operator()(std::int64_t m) const {
  if (m < 0) return 0;
  if (m <= max_m_) return table_[static_cast<std::size_t>(m)];
  std::int64_t count = 0;
  for (std::int64_t a = 0; a * a <= m; ++a) {
    const std::int64_t rest = m - a * a;
    const std::int64_t b = isqrt(rest);
    if (b * b != rest) continue;
    count += (a == 0 ? 1 : 2) * (b == 0 ? 1 : 2);
  }
  return count;
}

namespace {

// Walks x_1 >= x_2 >= ... >= x_m >= 0 over the first m = n-1 coordinates;
// each leaf stands for all its signed permutations.
class OrbitCounter {
 public:
  OrbitCounter(int free_dims, std::int64_t q2, const SumOfTwoSquares& r2)
      : m_(free_dims), q2_(q2), r2_(r2), x_(static_cast<std::size_t>(free_dims)) {
    factorial_[0] = 1;
    for (int i = 1; i <= kMaxDimension; ++i) factorial_[i] = factorial_[i - 1] * i;
  }

  std::int64_t run() {
    total_ = 0;
    descend(0, q2_, isqrt(q2_));
    return total_;
  }

 private:
  void descend(int i, std::int64_t rem, std::int64_t cap) {
    if (i == m_) {
      const std::int64_t tail = r2_(rem);
      if (tail != 0) total_ += tail * orbit_size();
      return;
    }
    const std::int64_t bound = std::min(cap, isqrt(rem));
    for (std::int64_t x = 0; x <= bound; ++x) {
      x_[static_cast<std::size_t>(i)] = x;
      descend(i + 1, rem - x * x, x);
    }
  }

  // (number of distinct orderings) * 2^(number of nonzero entries)
  std::int64_t orbit_size() const {
    std::int64_t size = factorial_[m_];
    int run = 1;
    for (int i = 1; i <= m_; ++i) {
      if (i < m_ && x_[static_cast<std::size_t>(i)] == x_[static_cast<std::size_t>(i - 1)]) {
        ++run;
      } else {
        size /= factorial_[run];
        run = 1;
      }
    }
    for (std::int64_t x : x_) {
      if (x != 0) size *= 2;
    }
    return size;
  }

  int m_;
  std::int64_t q2_;
  const SumOfTwoSquares& r2_;
  IntVec x_;
  std::int64_t total_ = 0;
  std::array<std::int64_t, kMaxDimension + 1> factorial_{};
};

}  // namespace

namespace {

std::int64_t table_bound(int n, std::int64_t q_max) {
  check_dimension(n);
  if (q_max < 0 || q_max > 4 * kConeCountCap) {
    throw CapabilityError("FiberCounter: q_max out of range");
  }
  return q_max * q_max;
}

}  // namespace

FiberCounter::FiberCounter(int n, std::int64_t q_max)
    : n_(n), q_max_(q_max), r2_(table_bound(n, q_max)) {}

std::int64_t FiberCounter::operator()(std::int64_t q) const {
  if (q < 1) throw ValidationError("fiber_count: q must be >= 1");
  if (q > detail::kNarrowQMax) throw CapabilityError("fiber_count: q too large");
  OrbitCounter counter(n_ - 1, q * q, r2_);
  return counter.run();
}

FiberCount fiber_count(int n, std::int64_t q) {
  check_dimension(n);
  if (q < 1) throw ValidationError("fiber_count: q must be >= 1");
  const std::int64_t table_q = std::min<std::int64_t>(q, kConeCountCap);
  FiberCounter counter(n, table_q);
  return {q, counter(q)};
}

std::vector<std::int64_t> cone_growth(int n, std::span<const std::int64_t> grid) {
  check_dimension(n);
  if (grid.empty()) return {};
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw ValidationError("cone_growth: grid must be ascending");
  }
  if (grid.back() > kConeCountCap) {
    throw CapabilityError("cone_growth: Q_cap above " + std::to_string(kConeCountCap));
  }
  FiberCounter counter(n, std::max<std::int64_t>(grid.back() - 1, 0));
  std::vector<std::int64_t> out;
  out.reserve(grid.size());
  std::int64_t total = 0;
  std::int64_t q = 1;
  for (std::int64_t cap : grid) {
    for (; q < cap; ++q) total += counter(q);
    out.push_back(total);
  }
  return out;
}

std::int64_t count_cone_points_below(int n, std::int64_t q_cap) {
  if (q_cap > kConeCountCap) {
    throw CapabilityError("count_cone_points_below: Q_cap = " + std::to_string(q_cap) +
                          " exceeds " + std::to_string(kConeCountCap));
  }
  if (q_cap <= 1) {
    check_dimension(n);
    return 0;
  }
  const std::int64_t grid[] = {q_cap};
  return cone_growth(n, grid).front();
}

double fit_cone_growth(std::span<const double> q_values, std::span<const double> counts) {
  return log_log_slope(q_values, counts, 5);
}

}  // namespace lightcone
