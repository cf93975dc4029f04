#include "lightcone/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "lightcone/enumerate.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/numerics.hpp"

namespace lightcone {

namespace {

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: " + key + " = '" + value + "' is not a number");
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: " + key + " = '" + value + "' is not an integer");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(value, &used);
    if (used == value.size() && value.find('-') == std::string::npos) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: " + key + " = '" + value + "' is not an unsigned integer");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ValidationError("config: " + key + " = '" + value + "' is not a boolean");
}

std::vector<double> parse_grid(const std::string& value) {
  std::vector<double> grid;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    // "a:b" expands to the unit steps a, a+1, ..., b
    if (auto colon = item.find(':'); colon != std::string::npos) {
      const double lo = parse_real("T_grid", item.substr(0, colon));
      const double hi = parse_real("T_grid", item.substr(colon + 1));
      for (double t = lo; t <= hi + 1e-9; t += 1.0) grid.push_back(t);
    } else {
      grid.push_back(parse_real("T_grid", item));
    }
  }
  return grid;
}

std::string join_grid(const std::vector<double>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out += ',';
    out += format_double(grid[i]);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 3) throw ValidationError("ExperimentConfig: n must be >= 3 (the method fails for n = 2)");
  if (n > kMaxDimension) throw DimensionError("ExperimentConfig: n too large");
  if (!(c > 0) || !std::isfinite(c)) throw ValidationError("ExperimentConfig: c must be > 0");
  if (T_grid.empty()) throw ValidationError("ExperimentConfig: empty T grid");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (!(T_grid[i] >= 0) || (i > 0 && !(T_grid[i] > T_grid[i - 1]))) {
      throw ValidationError("ExperimentConfig: T grid must be increasing and >= 0");
    }
  }
  if (!(std::cosh(T_grid.back()) <= kMaxCoshT)) {
    throw CapabilityError("ExperimentConfig: cosh(max T) exceeds 2^40");
  }
  if (samples < 1) throw ValidationError("ExperimentConfig: samples must be >= 1");
  if (threads < 1) throw ValidationError("ExperimentConfig: threads must be >= 1");
}

KeyValues ExperimentConfig::to_key_values() const {
  return {{"n", std::to_string(n)},
          {"c", format_double(c)},
          {"T_grid", join_grid(T_grid)},
          {"samples", std::to_string(samples)},
          {"rng_seed", std::to_string(rng_seed)},
          {"threads", std::to_string(threads)},
          {"output_path", output_path},
          {"record_timing", record_timing ? "true" : "false"}};
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv, ExperimentConfig base) {
  for (const auto& [key, value] : kv) {
    if (key == "n") {
      base.n = static_cast<int>(parse_integer(key, value));
    } else if (key == "c") {
      base.c = parse_real(key, value);
    } else if (key == "T_grid") {
      base.T_grid = parse_grid(value);
    } else if (key == "samples") {
      base.samples = static_cast<int>(parse_integer(key, value));
    } else if (key == "rng_seed" || key == "seed") {
      base.rng_seed = parse_unsigned(key, value);
    } else if (key == "threads") {
      base.threads = static_cast<int>(parse_integer(key, value));
    } else if (key == "output_path" || key == "out") {
      base.output_path = value;
    } else if (key == "record_timing") {
      base.record_timing = parse_bool(key, value);
    }
    // unknown keys belong to other subcommands
  }
  return base;
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv) {
  return from_key_values(kv, ExperimentConfig{});
}

// ---------------------------------------------------------------------------

SpherePoint sample_sphere(CounterRng& rng, int n) {
  if (n < 1) throw DimensionError("sample_sphere: n must be >= 1");
  RealVec v(static_cast<std::size_t>(n) + 1);
  for (;;) {
    double norm2 = 0;
    for (double& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    if (norm2 > 0) return SpherePoint::normalized(v);
  }
}

SpherePoint ensemble_alpha(std::uint64_t seed, std::uint64_t index, int n) {
  CounterRng rng(seed, index);
  return sample_sphere(rng, n);
}

std::vector<CountRecord> run_ensemble(const ExperimentConfig& config) {
  config.validate();
  const auto total = static_cast<std::size_t>(config.samples);
  std::vector<std::optional<CountRecord>> slots(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      try {
        const SpherePoint alpha = ensemble_alpha(config.rng_seed, i, config.n);
        slots[i] = count_series(alpha, config.c, config.T_grid, config.record_timing);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::min<int>(config.threads, config.samples));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<CountRecord> records;
  records.reserve(total);
  for (auto& slot : slots) {
    if (slot) records.push_back(std::move(*slot));
  }
  if (!config.output_path.empty()) write_text(config.output_path, records_to_csv(records));
  if (error) std::rethrow_exception(error);
  return records;
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t count_at(const CountRecord& r, double T) {
  for (const auto& g : r.grid) {
    if (g.T == T) return g.N;
  }
  throw ValidationError("record has no grid point at T = " + format_double(T));
}

}  // namespace

SlopeEstimate estimate_slope(std::span<const CountRecord> records, double T_ref) {
  if (records.size() < 100) {
    throw PreconditionError("estimate_slope: need >= 100 records, got " +
                            std::to_string(records.size()));
  }
  if (!(T_ref > 0)) throw ValidationError("estimate_slope: T_ref must be > 0");
  std::vector<double> ratios;
  ratios.reserve(records.size());
  for (const auto& r : records) ratios.push_back(static_cast<double>(count_at(r, T_ref)) / T_ref);
  const Moments m = moments(ratios);
  return {m.mean, m.stderr_mean, m.count};
}

std::vector<DeviationSample> deviations(std::span<const CountRecord> records, double C_hat) {
  std::vector<DeviationSample> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& g : records[i].grid) {
      if (!(g.T > 0)) continue;
      out.push_back({i, g.T, (static_cast<double>(g.N) - C_hat * g.T) / std::sqrt(g.T)});
    }
  }
  return out;
}

std::vector<double> deviations_at(std::span<const DeviationSample> samples, double T) {
  std::vector<double> out;
  for (const auto& s : samples) {
    if (s.T == T) out.push_back(s.D);
  }
  return out;
}

KsReport ks_normal(std::span<const double> samples, double min_sigma) {
  if (samples.size() < 500) {
    throw PreconditionError("ks_normal: need >= 500 samples, got " +
                            std::to_string(samples.size()));
  }
  const Moments m = moments(samples);
  KsReport report;
  report.size = m.count;
  report.mean = m.mean;
  report.sigma = std::sqrt(m.variance);
  if (report.sigma == 0 || report.sigma < min_sigma) {
    report.degenerate = true;
    report.note = "degenerate variance: sigma_hat = " + format_double(report.sigma) +
                  " below threshold " + format_double(min_sigma) + "; KS not computed";
    return report;
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double size = static_cast<double>(sorted.size());
  double ks = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double z = (sorted[i] - report.mean) / report.sigma;
    const double phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
    ks = std::max({ks, static_cast<double>(i + 1) / size - phi, phi - static_cast<double>(i) / size});
  }
  report.ks = ks;
  return report;
}

std::vector<VariancePoint> variance_curve(std::span<const DeviationSample> samples) {
  std::vector<double> Ts;
  for (const auto& s : samples) Ts.push_back(s.T);
  std::sort(Ts.begin(), Ts.end());
  Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());
  if (Ts.size() < 2) throw PreconditionError("variance_curve: need >= 2 T groups");

  std::vector<VariancePoint> curve;
  for (double T : Ts) {
    const std::vector<double> d = deviations_at(samples, T);
    const auto m = static_cast<double>(d.size());
    if (d.size() < 3) throw PreconditionError("variance_curve: need >= 3 samples per T");
    const Moments all = moments(d);
    // delete-one variances from running sums about the full mean (stable)
    double s1 = 0, s2 = 0;
    for (double x : d) {
      s1 += x - all.mean;
      s2 += (x - all.mean) * (x - all.mean);
    }
    std::vector<double> loo;
    loo.reserve(d.size());
    for (double x : d) {
      const double y = x - all.mean;
      const double a = s1 - y;
      const double b = s2 - y * y;
      loo.push_back((b - a * a / (m - 1)) / (m - 2));
    }
    const Moments jk = moments(loo);
    const double se = std::sqrt((m - 1) * jk.variance * (m - 1) / m);
    curve.push_back({T, all.variance, se, d.size()});
  }
  return curve;
}

ExponentFit fit_error_exponent(const CountRecord& record, double C_hat, double T_min,
                               double T_max) {
  std::vector<double> x, y;
  std::size_t in_range = 0;
  for (const auto& g : record.grid) {
    if (g.T < T_min || g.T > T_max || !(g.T > 0)) continue;
    ++in_range;
    const double err = std::abs(static_cast<double>(g.N) - C_hat * g.T);
    if (err == 0) continue;
    x.push_back(g.T);
    y.push_back(err);
  }
  ExponentFit fit;
  if (in_range > 0 && x.empty()) {
    fit.slope = -std::numeric_limits<double>::infinity();
    fit.exact = true;
    return fit;
  }
  fit.slope = log_log_slope(x, y, 5);
  fit.points = x.size();
  return fit;
}

std::vector<HistogramBin> histogram(std::span<const double> samples, int bins) {
  if (bins < 1) throw ValidationError("histogram: bins must be >= 1");
  if (samples.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) hi = lo + 1;
  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lo = lo + b * width;
    out[static_cast<std::size_t>(b)].hi = lo + (b + 1) * width;
  }
  for (double x : samples) {
    auto b = static_cast<int>((x - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= values.size()) return values.back();
  return values[i] + frac * (values[i + 1] - values[i]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

}  // namespace lightcone
