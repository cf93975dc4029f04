// rng.hpp
//
// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so a sample's randomness does not depend on which
// thread produced it or in what order. Distributions are implemented here
// rather than with <random> so that streams are identical across standard
// libraries.

#pragma once

#include <cstdint>

namespace lightcone {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on (0, 1].
  double uniform_open01();
  /// Standard normal (Box-Muller, both variates used).
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0;
};

}  // namespace lightcone
