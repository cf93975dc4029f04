// spectral.hpp
//
// Elementary spectral quantities for the light cone in R^{n+1,1}:
//
//   P_0(s) = 1,  P_d(s) = prod_{i<d} (n - s + i) / (s + i)
//   s_n    = floor((n + 2) / 2)
//   M(a, b; s) = int_a^b y^{-(s+1)} dy = (a^{-s} - b^{-s}) / s
//
// plus sweeps that measure the growth of P_d against (d+1)^{n-2s}, and a
// degree-truncated proxy for the spectral pairing of a flowed window profile
// with the unflowed one.

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace lightcone {

using Complex = std::complex<double>;

int s_n(int n);

/// Direct product for d <= 64, log-space with argument tracking above.
/// Throws DomainError if some s + i vanishes.
Complex p_d(int n, Complex s, int d);
double p_d(int n, double s, int d);

/// log P_d(s) accumulated term by term (compensated), for sweeps.
class PdAccumulator {
 public:
  PdAccumulator(int n, Complex s);

  /// Current degree d and value P_d(s).
  int degree() const { return d_; }
  Complex value() const;
  bool is_zero() const { return zero_; }
  void advance();

 private:
  int n_;
  Complex s_;
  int d_ = 0;
  bool zero_ = false;
  Complex log_sum_{0.0, 0.0};
  Complex compensation_{0.0, 0.0};
};

struct RatioPoint {
  int d = 0;
  double value = 0;             // P_d(s)
  double normalized_ratio = 0;  // P_d(s) (d+1)^{2s-n}
};

struct RatioSweep {
  double inf_ratio = 1;
  double sup_ratio = 1;
  std::vector<RatioPoint> points;
};

/// Extremes of P_d(s) (d+1)^{2s-n} over 0 <= d <= d_max, for real s in (n/2, n).
RatioSweep check_pd_real_asymptotic(int n, double s, int d_max, bool keep_points = false);

/// max |P_d(r + it)| / (|t|^{1/2} (d+1)^{n-2r+delta}) over the t grid and d <= d_max.
/// Requires r in (n/2, n), delta > 0 and |t| >= 1 on the grid.
double check_pd_complex_bound(int n, double r, std::span<const double> t_grid, int d_max,
                              double delta);

/// int_a^b y^{-(s+1)} dy; log(b/a) at s = 0.
Complex mellin_interval(double a, double b, Complex s);
double mellin_interval(double a, double b, double s);

struct RadialDecay {
  double lo = 0;  // support of the flowed u-profile: [c e^{-t}, c e^{1-t})
  double hi = 0;
  double sigma = 0;
  double mass_bound = 0;  // Mellin mass of the support at -n sigma
};

/// Support and decay envelope of the unit window profile flowed by a_t.
RadialDecay radial_profile_decay(int n, double c, double t);

/// Truncated pairing sum_{d <= degree_max} P_d(s_n) dim_d A_d(0) A_d(t), where
/// A_d(t) is the Mellin transform at s_n of the degree-d zonal coefficient of
/// the window {u in [c e^{-t}, c e^{1-t}), uv < c^2}.
double m_proxy(int n, double c, double t, int degree_max = 50);

/// Dimension of degree-d spherical harmonics on S^n.
double harmonic_dimension(int n, int d);

std::string ratio_sweep_csv(const RatioSweep& sweep);

}  // namespace lightcone
