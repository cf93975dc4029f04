// verify.hpp
//
// Property suites behind `lcone verify`. Each suite draws its own random
// inputs from a seeded stream and reports how many cases it checked, how
// many disagreed, and how many sat too close to a boundary to be decided.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lightcone/cone.hpp"
#include "lightcone/rng.hpp"

namespace lightcone {

struct SuiteResult {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  std::int64_t marginal_skipped = 0;
  std::int64_t positives = 0;  // checked cases where the premise held (not vacuous)
  double seconds = 0;
  std::string detail;  // first counterexample, if any

  bool passed() const { return violations == 0 && checked > 0; }
};

struct VerifyOptions {
  int n = 3;
  std::uint64_t seed = 20240601;
  bool quick = false;
  /// Test-harness mutation: added to the box radius in the correspondence
  /// suite. Any nonzero value should make that suite fail.
  double radius_offset = 0;
};

/// Haar-random rotation in SO(n+1) (QR of a Gaussian matrix).
Rotation random_rotation(CounterRng& rng, int n);
/// Rotation k with alpha_k = alpha, randomized in the stabilizer of the pole.
Rotation random_rotation_with_alpha(CounterRng& rng, const SpherePoint& alpha);
/// A cone point with q <= q_max from (2 s m, |m|^2 - s^2, |m|^2 + s^2),
/// followed by a random signed permutation.
IntVec random_cone_point(CounterRng& rng, int n, std::int64_t q_max);

/// Jacobi: r_4(m) = 8 sum_{d | m, 4 does not divide d} d.
std::int64_t jacobi_r4(std::int64_t m);

SuiteResult check_correspondence(const VerifyOptions& options, int samples = 10000);
SuiteResult check_sandwich(const VerifyOptions& options, int samples = 100000);
SuiteResult check_tessellation(const VerifyOptions& options, int rotations = 20, int N_max = 10);
SuiteResult check_two_path(const VerifyOptions& options, int alphas = 50);
SuiteResult check_fiber_oracle(const VerifyOptions& options, std::int64_t q_box = 200,
                               int balls = 100, std::int64_t q_jacobi = 500);

/// All five suites at full or quick size.
std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options);

}  // namespace lightcone
