#include "lightcone/numerics.hpp"

#include <cmath>
#include <vector>

#include "lightcone/errors.hpp"

namespace lightcone {

double least_squares_slope(std::span<const double> x, std::span<const double> y,
                           std::size_t min_points) {
  if (x.size() != y.size()) throw FitError("least squares: x and y differ in length");
  if (x.size() < min_points) {
    throw FitError("least squares: need at least " + std::to_string(min_points) + " points");
  }
  const auto m = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw FitError("least squares: degenerate grid (all x equal)");
  return sxy / sxx;
}

double log_log_slope(std::span<const double> x, std::span<const double> y,
                     std::size_t min_points) {
  if (x.size() != y.size()) throw FitError("log-log fit: x and y differ in length");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw FitError("log-log fit: non-positive value");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return least_squares_slope(lx, ly, min_points);
}

Moments moments(std::span<const double> x) {
  Moments out;
  out.count = x.size();
  if (x.empty()) return out;
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  out.mean = mean;
  if (x.size() < 2) return out;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  out.variance = ss / static_cast<double>(x.size() - 1);
  out.stderr_mean = std::sqrt(out.variance / static_cast<double>(x.size()));
  return out;
}

}  // namespace lightcone
