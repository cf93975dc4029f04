// lcone: experiment driver for light-cone approximant counting.
//
//   lcone count     --c C (--T T | --coshT X) [--alpha a,b,... | --seed S]
//   lcone verify    [--quick]
//   lcone ensemble  --out DIR [--config FILE] ...
//   lcone clt       --out DIR ...
//   lcone exponent  --out DIR ...
//   lcone spectral  [--out DIR] ...
//
// Exit codes: 0 ok, 1 property violation, 2 capability exceeded, 64 usage.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lightcone/count.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"
#include "lightcone/spectral.hpp"
#include "lightcone/stats.hpp"
#include "lightcone/verify.hpp"

namespace fs = std::filesystem;
using namespace lightcone;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitCapability = 2;
constexpr int kExitUsage = 64;

// Flags shared by every subcommand. Values stay as strings until the
// defaults < config file < flags merge.
struct Flags {
  std::string config;
  std::string out;
  std::string format = "text";
  bool quick = false;
  KeyValues given;  // flags explicitly set on the command line
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key=value config file");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "stdout format")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cmd->add_flag("--quick", f.quick, "reduced sample sizes");
}

// Registers a flag that lands in f.given under `key` when present.
CLI::Option* add_value(CLI::App* cmd, Flags& f, const std::string& name, const std::string& key,
                       const std::string& help) {
  return cmd->add_option_function<std::string>(
      name, [&f, key](const std::string& v) { f.given[key] = v; }, help);
}

KeyValues merged(const Flags& f, KeyValues defaults) {
  if (!f.config.empty()) {
    for (const auto& [k, v] : read_key_values(f.config)) defaults[k] = v;
  }
  for (const auto& [k, v] : f.given) defaults[k] = v;
  return defaults;
}

RealVec parse_vector(const std::string& text) {
  RealVec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("--alpha: '" + item + "' is not a number");
    }
  }
  return v;
}

double get_real(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ValidationError("missing required value: " + key);
  try {
    std::size_t used = 0;
    const double x = std::stod(it->second, &used);
    if (used == it->second.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(key + " = '" + it->second + "' is not a number");
}

// Runs `body` with a manifest that is written even when body throws.
template <class Body>
int with_manifest(const std::string& subcommand, const Flags& f, const KeyValues& config,
                  Body&& body) {
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.config = config;
  const bool write = !f.out.empty();
  try {
    const int code = body(manifest);
    manifest.status = code == kExitOk ? "ok" : "violation";
    manifest.end = utc_now();
    if (write) manifest.write(f.out);
    return code;
  } catch (const std::exception& e) {
    manifest.status = std::string("failed: ") + e.what();
    manifest.end = utc_now();
    if (write) {
      try {
        manifest.write(f.out);
      } catch (const std::exception&) {
      }
    }
    throw;
  }
}

void emit(const Flags& f, RunManifest& m, const std::string& name, const std::string& text) {
  if (f.out.empty()) return;
  write_text(fs::path(f.out) / name, text);
  m.outputs.push_back(name);
}

// ---------------------------------------------------------------------------

int cmd_count(const Flags& f) {
  KeyValues kv = merged(f, {{"n", "3"}});
  const int n = static_cast<int>(get_real(kv, "n"));
  const double c = get_real(kv, "c");
  double cosh_T = 0;
  if (kv.count("coshT") && kv.count("T")) {
    throw ValidationError("give either --coshT or --T, not both");
  }
  if (kv.count("coshT")) {
    cosh_T = get_real(kv, "coshT");
  } else if (kv.count("T")) {
    cosh_T = std::cosh(get_real(kv, "T"));
  } else {
    throw ValidationError("missing required value: --T or --coshT");
  }

  std::optional<SpherePoint> alpha;
  if (kv.count("alpha")) {
    alpha = SpherePoint::normalized(parse_vector(kv.at("alpha")));
  } else {
    const auto seed = static_cast<std::uint64_t>(get_real(kv, "seed"));
    alpha = ensemble_alpha(seed, 0, n);
    kv["alpha"] = "";  // filled below for the snapshot
  }
  if (alpha->dimension() != n) {
    throw DimensionError("--alpha has " + std::to_string(alpha->dimension() + 1) +
                         " coordinates, expected n+1 = " + std::to_string(n + 1));
  }
  std::string alpha_text;
  for (std::size_t i = 0; i < alpha->coords().size(); ++i) {
    alpha_text += (i ? ";" : "") + format_double((*alpha)[i]);
  }
  kv["alpha"] = alpha_text;

  return with_manifest("count", f, kv, [&](RunManifest& m) {
    const ApproximantCount result = count_approximants_cosh(*alpha, c, cosh_T);
    CsvWriter csv({"alpha_coords", "c", "coshT", "N", "marginal_hits"});
    csv.row({alpha_text, format_double(c), format_double(cosh_T), std::to_string(result.N),
             std::to_string(result.marginal_hits)});
    if (f.format == "json") {
      json j = {{"n", n},        {"alpha", alpha->coords()},
                {"c", c},        {"coshT", cosh_T},
                {"N", result.N}, {"marginal_hits", result.marginal_hits}};
      std::cout << j.dump() << "\n";
    } else if (f.format == "csv") {
      std::cout << csv.str();
    } else {
      std::cout << "alpha=" << alpha_text << " c=" << c << " coshT=" << cosh_T << "\n"
                << "N=" << result.N << "\n"
                << "marginal_hits=" << result.marginal_hits << "\n";
    }
    emit(f, m, "count.csv", csv.str());
    return kExitOk;
  });
}

int cmd_verify(const Flags& f, double mutation) {
  KeyValues kv = merged(f, {{"n", "3"}, {"seed", "20240601"}});
  VerifyOptions options;
  options.n = static_cast<int>(get_real(kv, "n"));
  options.seed = static_cast<std::uint64_t>(get_real(kv, "seed"));
  options.quick = f.quick;
  options.radius_offset = mutation;
  kv["quick"] = f.quick ? "true" : "false";
  if (mutation != 0) kv["radius_offset"] = format_double(mutation);

  return with_manifest("verify", f, kv, [&](RunManifest& m) {
    const auto results = run_verify_suites(options);
    CsvWriter csv(
        {"suite", "checked", "violations", "marginal_skipped", "positives", "seconds", "detail"});
    json report = json::array();
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.passed();
      csv.row({r.name, std::to_string(r.checked), std::to_string(r.violations),
               std::to_string(r.marginal_skipped), std::to_string(r.positives),
               format_double(r.seconds), r.detail});
      report.push_back({{"suite", r.name},
                        {"checked", r.checked},
                        {"violations", r.violations},
                        {"marginal_skipped", r.marginal_skipped},
                        {"positives", r.positives},
                        {"seconds", r.seconds},
                        {"detail", r.detail}});
      if (f.format == "text") {
        std::printf("%-15s %s  checked=%lld violations=%lld marginal=%lld positives=%lld  %.2fs\n",
                    r.name.c_str(), r.passed() ? "PASS" : "FAIL",
                    static_cast<long long>(r.checked), static_cast<long long>(r.violations),
                    static_cast<long long>(r.marginal_skipped),
                    static_cast<long long>(r.positives), r.seconds);
        if (!r.detail.empty()) std::printf("    first violation: %s\n", r.detail.c_str());
      }
    }
    if (f.format == "json") std::cout << report.dump(2) << "\n";
    if (f.format == "csv") std::cout << csv.str();
    emit(f, m, "verify.csv", csv.str());
    return ok ? kExitOk : kExitViolation;
  });
}

// ---------------------------------------------------------------------------

ExperimentConfig experiment_config(const Flags& f, KeyValues& kv) {
  ExperimentConfig defaults;
  if (f.quick) {
    defaults.samples = 500;
    defaults.T_grid = {1, 2, 3, 4, 5, 6, 7, 8};
  }
  kv = merged(f, defaults.to_key_values());
  ExperimentConfig config = ExperimentConfig::from_key_values(kv);
  config.output_path.clear();  // records go to <out>/records.csv
  config.validate();
  kv = config.to_key_values();
  kv.erase("output_path");
  return config;
}

std::vector<CountRecord> ensemble_step(const Flags& f, RunManifest& m,
                                       const ExperimentConfig& config) {
  ExperimentConfig run = config;
  if (!f.out.empty()) {
    run.output_path = (fs::path(f.out) / "records.csv").string();
    m.outputs.push_back("records.csv");
  }
  return run_ensemble(run);
}

int cmd_ensemble(const Flags& f) {
  KeyValues kv;
  const ExperimentConfig config = experiment_config(f, kv);
  return with_manifest("ensemble", f, kv, [&](RunManifest& m) {
    const auto records = ensemble_step(f, m, config);
    if (f.out.empty() || f.format == "csv") std::cout << records_to_csv(records);
    if (f.format == "text" && !f.out.empty()) {
      std::cout << records.size() << " records written to " << f.out << "/records.csv\n";
    }
    return kExitOk;
  });
}

json slope_json(const SlopeEstimate& s) {
  return {{"C_hat", s.C_hat}, {"C_stderr", s.stderr_mean}, {"size", s.size}};
}

int cmd_clt(const Flags& f) {
  KeyValues kv;
  const ExperimentConfig config = experiment_config(f, kv);
  return with_manifest("clt", f, kv, [&](RunManifest& m) {
    const auto records = ensemble_step(f, m, config);
    const double T_ref = config.T_grid.back();
    const SlopeEstimate slope = estimate_slope(records, T_ref);
    const auto devs = deviations(records, slope.C_hat);

    CsvWriter dev_csv({"alpha_id", "T", "D"});
    for (const auto& d : devs) {
      dev_csv.row({std::to_string(d.alpha_id), format_double(d.T), format_double(d.D)});
    }
    emit(f, m, "deviations.csv", dev_csv.str());

    CsvWriter ks_csv({"T", "size", "mean", "sigma_hat", "ks", "degenerate"});
    json ks_by_T = json::object();
    KsReport at_ref;
    for (double T : config.T_grid) {
      const auto sample = deviations_at(devs, T);
      if (sample.size() < 500 || !(T > 0)) continue;
      const KsReport ks = ks_normal(sample, 0.02 * slope.C_hat);
      if (T == T_ref) at_ref = ks;
      ks_csv.row({format_double(T), std::to_string(ks.size), format_double(ks.mean),
                  format_double(ks.sigma), ks.degenerate ? "" : format_double(ks.ks),
                  ks.degenerate ? "true" : "false"});
      ks_by_T[format_double(T)] = ks.degenerate ? json(nullptr) : json(ks.ks);
    }
    emit(f, m, "ks.csv", ks_csv.str());

    CsvWriter var_csv({"T", "variance", "jackknife_se", "size"});
    for (const auto& v : variance_curve(devs)) {
      var_csv.row({format_double(v.T), format_double(v.variance), format_double(v.jackknife_se),
                   std::to_string(v.size)});
    }
    emit(f, m, "variance.csv", var_csv.str());

    CsvWriter hist_csv({"lo", "hi", "count"});
    for (const auto& b : histogram(deviations_at(devs, T_ref), 30)) {
      hist_csv.row({format_double(b.lo), format_double(b.hi), std::to_string(b.count)});
    }
    emit(f, m, "histogram.csv", hist_csv.str());

    std::vector<double> exponents;
    for (const auto& r : records) {
      try {
        exponents.push_back(fit_error_exponent(r, slope.C_hat, 6.0).slope);
      } catch (const FitError&) {
      }
    }
    json summary = {{"c", config.c},
                    {"n", config.n},
                    {"C_hat", slope.C_hat},
                    {"C_stderr", slope.stderr_mean},
                    {"sigma_hat", at_ref.sigma},
                    {"ks_by_T", ks_by_T},
                    {"exponent_median", exponents.empty() ? json(nullptr) : json(median(exponents))}};
    if (at_ref.degenerate) summary["degenerate_variance"] = at_ref.note;
    emit(f, m, "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_exponent(const Flags& f, double T_min) {
  KeyValues kv;
  const ExperimentConfig config = experiment_config(f, kv);
  kv["T_min"] = format_double(T_min);
  return with_manifest("exponent", f, kv, [&](RunManifest& m) {
    const auto records = ensemble_step(f, m, config);
    const SlopeEstimate slope = estimate_slope(records, config.T_grid.back());
    CsvWriter csv({"alpha_id", "slope", "points", "exact"});
    std::vector<double> slopes;
    for (std::size_t i = 0; i < records.size(); ++i) {
      try {
        const ExponentFit fit = fit_error_exponent(records[i], slope.C_hat, T_min);
        slopes.push_back(fit.slope);
        csv.row({std::to_string(i), format_double(fit.slope), std::to_string(fit.points),
                 fit.exact ? "true" : "false"});
      } catch (const FitError& e) {
        csv.row({std::to_string(i), "", "0", "false"});
      }
    }
    emit(f, m, "exponents.csv", csv.str());
    json summary = slope_json(slope);
    summary["fitted"] = slopes.size();
    if (!slopes.empty()) {
      summary["exponent_q1"] = quantile(slopes, 0.25);
      summary["exponent_median"] = median(slopes);
      summary["exponent_q3"] = quantile(slopes, 0.75);
    }
    emit(f, m, "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_spectral(const Flags& f) {
  KeyValues kv = merged(f, {{"n", "3"}, {"d_max", "10000"}});
  const int n = static_cast<int>(get_real(kv, "n"));
  if (!kv.count("s")) kv["s"] = std::to_string(s_n(n));
  const double s = get_real(kv, "s");
  const int d_max = f.quick ? 1000 : static_cast<int>(get_real(kv, "d_max"));
  kv["d_max"] = std::to_string(d_max);

  return with_manifest("spectral", f, kv, [&](RunManifest& m) {
    const RatioSweep sweep = check_pd_real_asymptotic(n, s, d_max, true);
    emit(f, m, "pd_ratio.csv", ratio_sweep_csv(sweep));

    // complex bound on the line r = s, |t| in 1..100
    std::vector<double> t_grid;
    for (int t = 1; t <= 100; ++t) t_grid.push_back(t);
    const double worst = check_pd_complex_bound(n, s, t_grid, std::min(d_max, 1000), 0.1);

    CsvWriter decay({"t", "support_lo", "support_hi", "mass_bound", "m_proxy"});
    for (int t = 0; t <= 6; ++t) {
      const RadialDecay r = radial_profile_decay(n, 1.0, t);
      decay.row({std::to_string(t), format_double(r.lo), format_double(r.hi),
                 format_double(r.mass_bound), format_double(m_proxy(n, 1.0, t, 50))});
    }
    emit(f, m, "decay.csv", decay.str());

    json summary = {{"n", n},
                    {"s", s},
                    {"s_n", s_n(n)},
                    {"d_max", d_max},
                    {"inf_ratio", sweep.inf_ratio},
                    {"sup_ratio", sweep.sup_ratio},
                    {"complex_bound_worst", worst}};
    emit(f, m, "summary.json", summary.dump(2) + "\n");
    if (f.format == "csv") {
      std::cout << ratio_sweep_csv(sweep);
    } else {
      std::cout << summary.dump(2) << "\n";
    }
    return kExitOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting intrinsic Diophantine approximants on S^n through the light cone"};
  app.require_subcommand(1);
  Flags f;

  auto* count = app.add_subcommand("count", "N_{T,c}(alpha) for one alpha");
  add_common(count, f);
  add_value(count, f, "--n", "n", "sphere dimension (default 3)");
  add_value(count, f, "--c", "c", "approximation constant c > 0");
  add_value(count, f, "--coshT", "coshT", "denominator bound: 1 <= q < coshT");
  add_value(count, f, "--T", "T", "flow time, q < cosh T");
  add_value(count, f, "--alpha", "alpha", "comma-separated point of S^n");
  add_value(count, f, "--seed", "seed", "draw alpha from this seed instead");

  auto* verify = app.add_subcommand("verify", "property suites");
  add_common(verify, f);
  add_value(verify, f, "--n", "n", "sphere dimension (default 3)");
  add_value(verify, f, "--seed", "seed", "random seed");
  double mutation = 0;
  verify->add_option("--mutate-radius", mutation)->group("");  // test harness only

  std::vector<CLI::App*> experiments;
  for (const char* name : {"ensemble", "clt", "exponent"}) {
    auto* cmd = app.add_subcommand(name);
    add_common(cmd, f);
    add_value(cmd, f, "--n", "n", "sphere dimension");
    add_value(cmd, f, "--c", "c", "approximation constant");
    add_value(cmd, f, "--T", "T_grid", "T grid, e.g. 1:12 or 4,8,12");
    add_value(cmd, f, "--samples", "samples", "number of random alpha");
    add_value(cmd, f, "--seed", "rng_seed", "64-bit seed");
    add_value(cmd, f, "--threads", "threads", "worker threads");
    experiments.push_back(cmd);
  }
  experiments[0]->description("count series for random alpha");
  experiments[1]->description("normalized deviations, KS distance, variance curve");
  experiments[2]->description("per-alpha error exponents");
  double T_min = 6;
  experiments[2]->add_option("--T-min", T_min, "smallest T used in the fits");

  auto* spectral = app.add_subcommand("spectral", "P_d sweeps, Mellin checks, decay proxy");
  add_common(spectral, f);
  add_value(spectral, f, "--n", "n", "sphere dimension");
  add_value(spectral, f, "--s", "s", "real spectral parameter (default s_n)");
  add_value(spectral, f, "--dmax", "d_max", "largest degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*count) return cmd_count(f);
    if (*verify) return cmd_verify(f, mutation);
    if (*experiments[0]) return cmd_ensemble(f);
    if (*experiments[1]) return cmd_clt(f);
    if (*experiments[2]) return cmd_exponent(f, T_min);
    if (*spectral) return cmd_spectral(f);
  } catch (const CapabilityError& e) {
    std::cerr << "capability: " << e.what() << "\n";
    return kExitCapability;
  } catch (const PropertyViolation& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const ValidationError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitUsage;
}
