// count.hpp
//
// Counting functions for intrinsic approximation on S^n.
//
//   N_{T,c}(alpha) = #{ (p, q) : |p| = q, 1 <= q < cosh T, |alpha - p/q| < c/q }
//
// computed two ways: directly (box search around q*alpha on every fiber) and
// as the lattice count |E_{T,c} cap k Lambda_0| in rotated coordinates. The
// unit windows
//
//   chi^_{1,c}(a_t k Lambda_0) = #{ z : u(kz) in [c e^t, c e^{t+1}), u v < c^2 }
//
// tessellate F_{N,c}, and bracket N_{T,c} through the sandwich domains.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lightcone/cone.hpp"

namespace lightcone {

/// Largest cosh T (equivalently largest denominator) we enumerate up to.
inline constexpr double kMaxCoshT = 1099511627776.0;  // 2^40

struct GridCount {
  double T = 0;
  std::int64_t N = 0;
};

/// One alpha's counts over a T grid.
struct CountRecord {
  SpherePoint alpha;
  double c = 0;
  std::vector<GridCount> grid;
  std::int64_t marginal_hits = 0;
  double wall_time = 0;  // seconds; 0 unless timing was requested
};

struct ApproximantCount {
  std::int64_t N = 0;
  std::int64_t marginal_hits = 0;
};

/// N_{T,c}(alpha): all (p, q) with q < cosh T.
ApproximantCount count_approximants(const SpherePoint& alpha, double c, double T);
/// Same with the denominator cutoff given directly as cosh T.
ApproximantCount count_approximants_cosh(const SpherePoint& alpha, double c, double cosh_T);

/// N_{T,c}(alpha) for every T of an increasing grid, in a single sweep.
CountRecord count_series(const SpherePoint& alpha, double c, std::span<const double> T_grid,
                         bool timing = false);

struct DomainCount {
  std::int64_t count = 0;
  std::int64_t marginal_hits = 0;
};

/// |{ z in Lambda_0 : kz in domain }| for E_{T,c}, F_{T,c} or F_{T,c,l}.
DomainCount count_in_domain(const Rotation& k, const DomainSpec& spec, Domain which);

/// chi^_{1,c}(a_t k Lambda_0), or chi^_{1,c,l} when l is given.
std::int64_t siegel_window_count(const Rotation& k, int t, double c,
                                 std::optional<int> l = std::nullopt);

/// Window counts for t = 0..N-1 from one scan of F_{N,c}.
std::vector<std::int64_t> window_counts(const Rotation& k, double c, int N,
                                        std::optional<int> l = std::nullopt);

struct ResandwichReport {
  double c = 0;
  double T = 0;
  int l = 1;
  double r0 = 0;
  double T0 = 0;
  std::int64_t lower_sum = 0;  // sum_{t < floor(T - r0)} chi^_{1,c,l}(a_t k Lambda_0)
  std::int64_t N = 0;          // N_{T,c}(alpha_k)
  std::int64_t upper_sum = 0;  // sum_{t <= floor(T + r0)} chi^_{1,c}(a_t k Lambda_0)
  std::int64_t cl_count = 0;   // |F_{T-r0,c,l} cap C_l cap k Lambda_0|
  std::int64_t c0_count = 0;   // |E_{T,c} cap C_0 cap k Lambda_0|
  double C1 = 0;               // cl_count / sqrt(l)
  double C2 = 0;               // -c0_count
  double gap_lower = 0;        // (N + C2) - (lower_sum - C1 sqrt(l))
  double gap_upper = 0;        // upper_sum - (N + C2)

  bool ok() const { return gap_lower >= 0 && gap_upper >= 0; }
  std::string to_json() const;
};

/// Evaluates both sides of the re-sandwich bracket. Throws PreconditionError
/// for T < T_0 and PropertyViolation (with a JSON dump) if a gap is negative.
ResandwichReport verify_resandwich(const Rotation& k, double c, double T, int l);

struct EnsembleEstimate {
  double mean = 0;
  double stderr_mean = 0;
  std::size_t size = 0;
};

/// Mean over k of (1/N) sum_{t<N} chi^_{1,c}(a_t k Lambda_0); >= 100 rotations.
EnsembleEstimate ergodic_average_check(std::span<const Rotation> ensemble, double c, int N);

/// CSV (header + one row per grid point) for a set of records.
std::string records_to_csv(std::span<const CountRecord> records);

}  // namespace lightcone
