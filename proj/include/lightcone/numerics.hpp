// numerics.hpp
//
// Small shared numeric helpers: ordinary least squares and summary moments.

#pragma once

#include <span>

namespace lightcone {

/// OLS slope of y on x. Throws FitError if fewer than `min_points` pairs or
/// all x are equal.
double least_squares_slope(std::span<const double> x, std::span<const double> y,
                           std::size_t min_points = 2);

/// Slope of log(y) against log(x); every x and y must be positive.
double log_log_slope(std::span<const double> x, std::span<const double> y,
                     std::size_t min_points = 2);

struct Moments {
  std::size_t count = 0;
  double mean = 0;
  double variance = 0;  // unbiased (m - 1 denominator)
  double stderr_mean = 0;
};

Moments moments(std::span<const double> x);

}  // namespace lightcone
