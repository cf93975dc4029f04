#include "lightcone/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"

namespace lightcone {

namespace {

constexpr int kDirectProductMax = 64;

void check_n(int n) {
  if (n < 1) throw DimensionError("spectral: n must be >= 1");
}

void check_pole(Complex s, int d) {
  const double re = s.real();
  if (s.imag() == 0 && re <= 0 && re == std::floor(re) && -re < d) {
    throw DomainError("P_d(s): factor s + i vanishes at i = " + std::to_string(-re));
  }
}

// log(1 + z) without cancellation for small z.
Complex log1p_complex(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  return {0.5 * std::log1p(2 * x + x * x + y * y), std::atan2(y, 1 + x)};
}

}  // namespace

int s_n(int n) {
  check_n(n);
  return (n + 2) / 2;
}

PdAccumulator::PdAccumulator(int n, Complex s) : n_(n), s_(s) { check_n(n); }

Complex PdAccumulator::value() const {
  if (zero_) return {0.0, 0.0};
  return std::exp(log_sum_);
}

void PdAccumulator::advance() {
  const Complex denom = s_ + static_cast<double>(d_);
  if (denom == Complex(0.0, 0.0)) {
    throw DomainError("P_d(s): factor s + i vanishes at i = " + std::to_string(d_));
  }
  const Complex numer = static_cast<double>(n_) - s_ + static_cast<double>(d_);
  ++d_;
  if (numer == Complex(0.0, 0.0)) zero_ = true;
  if (zero_) return;
  // (n - s + i)/(s + i) = 1 + (n - 2s)/(s + i)
  const Complex term = log1p_complex((static_cast<double>(n_) - 2.0 * s_) / denom);
  const Complex y = term - compensation_;
  const Complex t = log_sum_ + y;
  compensation_ = (t - log_sum_) - y;
  log_sum_ = t;
}

Complex p_d(int n, Complex s, int d) {
  check_n(n);
  if (d < 0) throw ValidationError("P_d: d must be >= 0");
  check_pole(s, d);
  if (d <= kDirectProductMax) {
    Complex prod(1.0, 0.0);
    for (int i = 0; i < d; ++i) prod *= (static_cast<double>(n + i) - s) / (s + static_cast<double>(i));
    return prod;
  }
  PdAccumulator acc(n, s);
  for (int i = 0; i < d; ++i) acc.advance();
  return acc.value();
}

double p_d(int n, double s, int d) { return p_d(n, Complex(s, 0.0), d).real(); }

RatioSweep check_pd_real_asymptotic(int n, double s, int d_max, bool keep_points) {
  check_n(n);
  if (d_max < 0) throw ValidationError("check_pd_real_asymptotic: d_max must be >= 0");
  if (!(s > n / 2.0 && s < n)) {
    throw ValidationError("check_pd_real_asymptotic: s must lie in (n/2, n)");
  }
  RatioSweep sweep;
  sweep.inf_ratio = std::numeric_limits<double>::infinity();
  sweep.sup_ratio = 0;
  PdAccumulator acc(n, Complex(s, 0.0));
  for (int d = 0; d <= d_max; ++d) {
    if (d > 0) acc.advance();
    const double value = d <= kDirectProductMax ? p_d(n, s, d) : acc.value().real();
    const double ratio = value * std::pow(d + 1.0, 2 * s - n);
    sweep.inf_ratio = std::min(sweep.inf_ratio, ratio);
    sweep.sup_ratio = std::max(sweep.sup_ratio, ratio);
    if (keep_points) sweep.points.push_back({d, value, ratio});
  }
  return sweep;
}

double check_pd_complex_bound(int n, double r, std::span<const double> t_grid, int d_max,
                              double delta) {
  check_n(n);
  if (!(r > n / 2.0 && r < n)) throw ValidationError("check_pd_complex_bound: r outside (n/2, n)");
  if (!(delta > 0)) throw ValidationError("check_pd_complex_bound: delta must be > 0");
  if (d_max < 0) throw ValidationError("check_pd_complex_bound: d_max must be >= 0");
  double worst = 0;
  for (double t : t_grid) {
    if (!(std::abs(t) >= 1)) throw ValidationError("check_pd_complex_bound: |t| must be >= 1");
    PdAccumulator acc(n, Complex(r, t));
    const double t_factor = std::sqrt(std::abs(t));
    for (int d = 0; d <= d_max; ++d) {
      if (d > 0) acc.advance();
      const double bound = t_factor * std::pow(d + 1.0, n - 2 * r + delta);
      worst = std::max(worst, std::abs(acc.value()) / bound);
    }
  }
  return worst;
}

Complex mellin_interval(double a, double b, Complex s) {
  if (!(a > 0) || !(b >= a)) throw ValidationError("mellin_interval: need 0 < a <= b");
  if (a == b) return {0.0, 0.0};
  if (s == Complex(0.0, 0.0)) return {std::log(b / a), 0.0};
  return (std::pow(Complex(a, 0.0), -s) - std::pow(Complex(b, 0.0), -s)) / s;
}

double mellin_interval(double a, double b, double s) {
  if (!(a > 0) || !(b >= a)) throw ValidationError("mellin_interval: need 0 < a <= b");
  if (a == b) return 0.0;
  if (s == 0) return std::log(b / a);
  // a^{-s} - b^{-s} = a^{-s} (1 - (b/a)^{-s}), via expm1 for small s
  return -std::pow(a, -s) * std::expm1(-s * std::log(b / a)) / s;
}

RadialDecay radial_profile_decay(int n, double c, double t) {
  check_n(n);
  if (!(c > 0)) throw ValidationError("radial_profile_decay: c must be > 0");
  if (!(t >= 0)) throw ValidationError("radial_profile_decay: t must be >= 0");
  RadialDecay out;
  out.lo = c * std::exp(-t);
  out.hi = c * std::exp(1.0 - t);
  const double s = s_n(n);
  out.sigma = 0.5 + (2 * s - n) / (n + 1.0) - s / n;
  out.mass_bound = mellin_interval(out.lo, out.hi, -n * out.sigma);
  return out;
}

double harmonic_dimension(int n, int d) {
  check_n(n);
  if (d < 0) return 0;
  auto binom = [](int top, int k) {
    if (k < 0 || top < k) return 0.0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (top - k + i) / i;
    return r;
  };
  return binom(d + n, n) - binom(d + n - 2, n);
}

// ---------------------------------------------------------------------------

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

// Normalized zonal coefficients C_d^{nu}(cos theta) / C_d^{nu}(1) for d <= D.
void zonal_values(double x, double nu, int D, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(D) + 1, 1.0);
  if (D == 0) return;
  double c_prev = 1, c_cur = 2 * nu * x;
  double one_prev = 1, one_cur = 2 * nu;
  out[1] = c_cur / one_cur;
  for (int k = 2; k <= D; ++k) {
    const double c_next = (2 * x * (k + nu - 1) * c_cur - (k + 2 * nu - 2) * c_prev) / k;
    const double one_next = (2 * (k + nu - 1) * one_cur - (k + 2 * nu - 2) * one_prev) / k;
    c_prev = c_cur;
    c_cur = c_next;
    one_prev = one_cur;
    one_cur = one_next;
    out[static_cast<std::size_t>(k)] = c_cur / one_cur;
  }
}

// theta-intervals on which the window holds at height lambda.
std::vector<std::pair<double, double>> window_bands(double lambda, double u_lo, double u_hi,
                                                    double c) {
  // x = cos theta; u = lambda (1 + x), u v = lambda^2 (1 - x^2)
  const double x_lo = std::max(-1.0, u_lo / lambda - 1);
  const double x_hi = std::min(1.0, u_hi / lambda - 1);
  std::vector<std::pair<double, double>> bands;
  if (!(x_lo < x_hi)) return bands;
  auto add = [&](double a, double b) {
    a = std::max(a, x_lo);
    b = std::min(b, x_hi);
    if (a < b) bands.emplace_back(std::acos(b), std::acos(a));
  };
  if (lambda <= c) {
    add(-1, 1);
  } else {
    const double s = std::sqrt(1 - (c / lambda) * (c / lambda));
    add(-1, -s);
    add(s, 1);
  }
  return bands;
}

// A_d for d <= D: int g_lambda(d) lambda^{s-1} d lambda, with g_lambda(d) the
// degree-d zonal coefficient of the window's trace on the sphere of height lambda.
std::vector<double> window_coefficients(int n, double c, double u_lo, double u_hi, double s,
                                        int D) {
  const double nu = (n - 1) / 2.0;
  std::vector<double> A(static_cast<std::size_t>(D) + 1, 0.0);
  std::vector<double> g(A.size());
  std::vector<double> z;

  const double lam_lo = u_lo / 2;
  const double lam_hi = (u_hi + c * c / u_lo) / 2;
  const int panels = 160;
  const double log_lo = std::log(lam_lo);
  const double step = (std::log(lam_hi) - log_lo) / panels;

  for (int p = 0; p < panels; ++p) {
    const double a = log_lo + p * step;
    for (std::size_t k = 0; k < Gauss::abscissa().size(); ++k) {
      for (int sign : {-1, 1}) {
        const double node = Gauss::abscissa()[k];
        if (node == 0 && sign < 0) continue;
        const double w = Gauss::weights()[k] * step / 2;
        const double log_lam = a + step / 2 + sign * node * step / 2;
        const double lambda = std::exp(log_lam);
        // integrate over theta with weight sin^{n-1}
        std::fill(g.begin(), g.end(), 0.0);
        for (auto [th0, th1] : window_bands(lambda, u_lo, u_hi, c)) {
          const int pieces = std::max(1, static_cast<int>(std::ceil((th1 - th0) / 0.2)));
          const double h = (th1 - th0) / pieces;
          for (int q = 0; q < pieces; ++q) {
            for (std::size_t j = 0; j < Gauss::abscissa().size(); ++j) {
              for (int sj : {-1, 1}) {
                const double xj = Gauss::abscissa()[j];
                if (xj == 0 && sj < 0) continue;
                const double theta = th0 + (q + 0.5) * h + sj * xj * h / 2;
                const double wt = Gauss::weights()[j] * h / 2 * std::pow(std::sin(theta), n - 1);
                zonal_values(std::cos(theta), nu, D, z);
                for (int d = 0; d <= D; ++d) g[static_cast<std::size_t>(d)] += wt * z[static_cast<std::size_t>(d)];
              }
            }
          }
        }
        // d lambda = lambda d(log lambda)
        const double jac = w * std::pow(lambda, s);
        for (int d = 0; d <= D; ++d) A[static_cast<std::size_t>(d)] += jac * g[static_cast<std::size_t>(d)];
      }
    }
  }
  return A;
}

}  // namespace

double m_proxy(int n, double c, double t, int degree_max) {
  check_n(n);
  if (!(c > 0)) throw ValidationError("m_proxy: c must be > 0");
  if (!(t >= 0)) throw ValidationError("m_proxy: t must be >= 0");
  if (degree_max < 0) throw ValidationError("m_proxy: degree_max must be >= 0");
  const double s = s_n(n);
  const RadialDecay base = radial_profile_decay(n, c, 0);
  const RadialDecay flowed = radial_profile_decay(n, c, t);
  const auto A0 = window_coefficients(n, c, base.lo, base.hi, s, degree_max);
  const auto At = window_coefficients(n, c, flowed.lo, flowed.hi, s, degree_max);
  double total = 0;
  for (int d = 0; d <= degree_max; ++d) {
    const auto i = static_cast<std::size_t>(d);
    total += p_d(n, s, d) * harmonic_dimension(n, d) * A0[i] * At[i];
  }
  return total;
}

std::string ratio_sweep_csv(const RatioSweep& sweep) {
  CsvWriter csv({"d", "value", "normalized_ratio"});
  for (const auto& p : sweep.points) {
    csv.row({std::to_string(p.d), format_double(p.value), format_double(p.normalized_ratio)});
  }
  return csv.str();
}

}  // namespace lightcone
