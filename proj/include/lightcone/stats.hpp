// stats.hpp
//
// Ensemble experiments over random alpha in S^n: slope of N_{T,c} in T, the
// normalized deviations
//
//   D_T(alpha) = (N_{T,c}(alpha) - C T) / sqrt(T),
//
// their distance to a fitted normal, variance per T, and per-alpha error
// exponents. C is estimated from the ensemble itself.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lightcone/count.hpp"
#include "lightcone/io.hpp"
#include "lightcone/rng.hpp"

namespace lightcone {

struct ExperimentConfig {
  int n = 3;
  double c = 1.0;
  std::vector<double> T_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  int samples = 100;
  std::uint64_t rng_seed = 1;
  int threads = 1;
  std::string output_path;  // CSV of records; empty for none
  bool record_timing = false;

  void validate() const;
  KeyValues to_key_values() const;
  /// Overrides fields of `base` with the keys present in `kv`.
  static ExperimentConfig from_key_values(const KeyValues& kv, ExperimentConfig base);
  static ExperimentConfig from_key_values(const KeyValues& kv);
};

/// Uniform point on S^n: normalized Gaussian vector.
SpherePoint sample_sphere(CounterRng& rng, int n);
/// The alpha used for sample `index` of an ensemble with this seed.
SpherePoint ensemble_alpha(std::uint64_t seed, std::uint64_t index, int n);

/// One CountRecord per sample, in sample order regardless of thread count.
/// Writes the CSV to config.output_path when set; on failure the completed
/// records are flushed there before the error propagates.
std::vector<CountRecord> run_ensemble(const ExperimentConfig& config);

struct SlopeEstimate {
  double C_hat = 0;
  double stderr_mean = 0;
  std::size_t size = 0;
};

/// Ensemble mean and standard error of N_{T_ref,c} / T_ref; >= 100 records.
SlopeEstimate estimate_slope(std::span<const CountRecord> records, double T_ref);

struct DeviationSample {
  std::size_t alpha_id = 0;
  double T = 0;
  double D = 0;
};

std::vector<DeviationSample> deviations(std::span<const CountRecord> records, double C_hat);
std::vector<double> deviations_at(std::span<const DeviationSample> samples, double T);

struct KsReport {
  std::size_t size = 0;
  double mean = 0;
  double sigma = 0;
  double ks = 0;
  bool degenerate = false;
  std::string note;
};

/// KS distance to Norm(sample mean, sample sd); >= 500 samples. When the
/// sample sd is 0 or below `min_sigma` the report is marked degenerate and
/// the KS distance is not computed.
KsReport ks_normal(std::span<const double> samples, double min_sigma = 0.0);

struct VariancePoint {
  double T = 0;
  double variance = 0;
  double jackknife_se = 0;
  std::size_t size = 0;
};

/// Sample variance of D per T with delete-one jackknife errors; >= 2 T values.
std::vector<VariancePoint> variance_curve(std::span<const DeviationSample> samples);

struct ExponentFit {
  double slope = 0;  // -inf when N = C T on the whole range
  std::size_t points = 0;
  bool exact = false;
};

/// Slope of log|N - C T| against log T over grid points with T in
/// [T_min, T_max] and nonzero error; needs >= 5 such points.
ExponentFit fit_error_exponent(const CountRecord& record, double C_hat, double T_min = 0,
                               double T_max = std::numeric_limits<double>::infinity());

struct HistogramBin {
  double lo = 0;
  double hi = 0;
  std::size_t count = 0;
};

std::vector<HistogramBin> histogram(std::span<const double> samples, int bins);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double p);

}  // namespace lightcone
