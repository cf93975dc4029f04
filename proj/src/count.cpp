#include "lightcone/count.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "lightcone/enumerate.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"
#include "lightcone/numerics.hpp"

namespace lightcone {

namespace {

// Enlargement of candidate balls; the domain predicate decides membership.
constexpr double kCandidateSlack = 1e-6;

std::int64_t last_q_below(double bound) {
  // largest integer q with q < bound
  if (!(bound > 1)) return 0;
  return static_cast<std::int64_t>(std::ceil(bound)) - 1;
}

void check_window(double q_hi) {
  if (!(q_hi <= kMaxCoshT)) {
    throw CapabilityError("q-window exceeds the enumeration cap of 2^40 denominators");
  }
}

// Enumerates lattice points z = (p, q) near the direction alpha_k and hands
// the light-cone coordinates of kz to a visitor.
class RotatedScanner {
 public:
  explicit RotatedScanner(const Rotation& k)
      : n_(k.dimension()), dims_(static_cast<std::size_t>(n_) + 1), rows_(dims_ * dims_) {
    const auto& m = k.matrix();
    for (std::size_t i = 0; i < dims_; ++i) {
      for (std::size_t j = 0; j < dims_; ++j) {
        rows_[i * dims_ + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    query_.n = n_;
    query_.center.assign(dims_, 0.0);
  }

  template <class Radius, class Visit>
  void scan(std::int64_t q_lo, std::int64_t q_hi, Radius&& radius_of_q, Visit&& visit) {
    q_lo = std::max<std::int64_t>(q_lo, 1);
    const double* alpha = &rows_[(dims_ - 1) * dims_];
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
      const double radius = radius_of_q(q);
      if (!(radius > 0)) continue;
      const auto qd = static_cast<double>(q);
      for (std::size_t j = 0; j < dims_; ++j) query_.center[j] = qd * alpha[j];
      query_.q = q;
      query_.radius = radius;
      for_each_box_point(query_, [&](const BoxHit& hit) {
        if (hit.inside) visit(rotate(hit.p, qd));
      });
    }
  }

  ConeCoords rotate(std::span<const std::int64_t> p, double q) const {
    double w2 = 0;
    double axial = 0;
    for (std::size_t i = 0; i < dims_; ++i) {
      const double* row = &rows_[i * dims_];
      double s = 0;
      for (std::size_t j = 0; j < dims_; ++j) s += row[j] * static_cast<double>(p[j]);
      if (i + 1 < dims_) {
        w2 += s * s;
      } else {
        axial = s;
      }
    }
    return cone_coords(w2, axial, q);
  }

 private:
  int n_;
  std::size_t dims_;
  std::vector<double> rows_;
  BoxQuery query_;
};

// Candidate radius for {u >= u_lo, u v < c_eff^2} on the fiber at q: there
// |q alpha_k - p|^2 = 2 q v = 2 q (uv) / u with u >= max(u_lo, 2q - c^2/u_lo).
double window_radius(std::int64_t q, double u_lo, double c_eff) {
  const double qd = static_cast<double>(q);
  const double u_min = std::max(u_lo, 2.0 * qd - c_eff * c_eff / u_lo);
  return std::sqrt(2.0 * qd * c_eff * c_eff / u_min) * (1.0 + kCandidateSlack);
}

struct QRange {
  std::int64_t lo;
  std::int64_t hi;
};

// Integer q carrying points with u in [u_lo, u_hi) and u v < c^2.
QRange window_q_range(double u_lo, double u_hi, double c) {
  const double lo = u_lo / 2.0;
  const double hi = u_hi / 2.0 + c * c / (2.0 * u_lo);
  check_window(hi);
  return {std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(lo * (1 - 1e-12)))),
          static_cast<std::int64_t>(std::ceil(hi * (1 + 1e-12)))};
}

double window_edge(double c, double j) { return c * std::exp(j); }

}  // namespace

// ---------------------------------------------------------------------------

ApproximantCount count_approximants_cosh(const SpherePoint& alpha, double c, double cosh_T) {
  if (!(c > 0)) throw ValidationError("count_approximants: c must be > 0");
  if (!(cosh_T <= kMaxCoshT)) {
    throw CapabilityError("count_approximants: cosh T above 2^40");
  }
  const int n = alpha.dimension();
  ApproximantCount out;
  BoxQuery query;
  query.n = n;
  query.radius = c;
  query.center.assign(static_cast<std::size_t>(n) + 1, 0.0);
  const std::int64_t q_max = last_q_below(cosh_T);
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const auto qd = static_cast<double>(q);
    for (std::size_t j = 0; j < query.center.size(); ++j) query.center[j] = qd * alpha[j];
    query.q = q;
    for_each_box_point(query, [&](const BoxHit& hit) {
      if (hit.inside) ++out.N;
      if (hit.marginal) ++out.marginal_hits;
    });
  }
  return out;
}

ApproximantCount count_approximants(const SpherePoint& alpha, double c, double T) {
  if (!(T >= 0)) throw ValidationError("count_approximants: T must be >= 0");
  return count_approximants_cosh(alpha, c, std::cosh(T));
}

CountRecord count_series(const SpherePoint& alpha, double c, std::span<const double> T_grid,
                         bool timing) {
  if (!(c > 0)) throw ValidationError("count_series: c must be > 0");
  if (T_grid.empty()) throw ValidationError("count_series: empty T grid");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (!(T_grid[i] >= 0) || (i > 0 && !(T_grid[i] > T_grid[i - 1]))) {
      throw ValidationError("count_series: T grid must be increasing and >= 0");
    }
  }
  if (!(std::cosh(T_grid.back()) <= kMaxCoshT)) {
    throw CapabilityError("count_series: cosh T above 2^40");
  }
  const auto start = std::chrono::steady_clock::now();

  const int n = alpha.dimension();
  CountRecord record{alpha, c, {}, 0, 0.0};
  std::vector<std::int64_t> q_limits;
  for (double T : T_grid) q_limits.push_back(last_q_below(std::cosh(T)));

  BoxQuery query;
  query.n = n;
  query.radius = c;
  query.center.assign(static_cast<std::size_t>(n) + 1, 0.0);

  std::int64_t running = 0;
  std::int64_t q = 1;
  for (std::size_t g = 0; g < T_grid.size(); ++g) {
    for (; q <= q_limits[g]; ++q) {
      const auto qd = static_cast<double>(q);
      for (std::size_t j = 0; j < query.center.size(); ++j) query.center[j] = qd * alpha[j];
      query.q = q;
      for_each_box_point(query, [&](const BoxHit& hit) {
        if (hit.inside) ++running;
        if (hit.marginal) ++record.marginal_hits;
      });
    }
    record.grid.push_back({T_grid[g], running});
  }
  if (timing) {
    record.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return record;
}

// ---------------------------------------------------------------------------

DomainCount count_in_domain(const Rotation& k, const DomainSpec& spec, Domain which) {
  DomainCount out;
  RotatedScanner scanner(k);
  const double c = spec.c();
  auto visit = [&](const ConeCoords& x) {
    const Verdict v = classify(which, x, spec);
    if (v.inside) ++out.count;
    if (v.marginal) ++out.marginal_hits;
  };

  if (which == Domain::E) {
    const double cosh_T = std::cosh(spec.T());
    check_window(cosh_T);
    const double radius = c * (1.0 + kCandidateSlack);
    scanner.scan(1, last_q_below(cosh_T), [&](std::int64_t) { return radius; }, visit);
    return out;
  }

  if (!(spec.T() > 0)) return out;  // empty u-window
  const double c_eff = which == Domain::F_l ? spec.c_l() : c;
  const double u_lo = window_edge(c, 0.0);
  const double u_hi = window_edge(c, spec.T());
  const QRange range = window_q_range(u_lo, u_hi, c);
  scanner.scan(range.lo, range.hi,
               [&](std::int64_t q) { return window_radius(q, u_lo, c_eff); }, visit);
  return out;
}

std::vector<std::int64_t> window_counts(const Rotation& k, double c, int N,
                                        std::optional<int> l) {
  if (N < 0) throw ValidationError("window_counts: N must be >= 0");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(N), 0);
  if (N == 0) return counts;
  const DomainSpec spec(c, static_cast<double>(N), l);
  const Domain which = l ? Domain::F_l : Domain::F;
  const double c_eff = l ? spec.c_l() : c;

  std::vector<double> edges(static_cast<std::size_t>(N) + 1);
  for (int j = 0; j <= N; ++j) edges[static_cast<std::size_t>(j)] = window_edge(c, j);

  RotatedScanner scanner(k);
  const QRange range = window_q_range(edges.front(), edges.back(), c);
  scanner.scan(range.lo, range.hi,
               [&](std::int64_t q) { return window_radius(q, edges.front(), c_eff); },
               [&](const ConeCoords& x) {
                 if (!classify(which, x, spec).inside) return;
                 // window j: edges[j] <= u < edges[j+1]
                 const auto it = std::upper_bound(edges.begin(), edges.end(), x.u);
                 const auto j = static_cast<std::size_t>(it - edges.begin()) - 1;
                 ++counts[j];
               });
  return counts;
}

std::int64_t siegel_window_count(const Rotation& k, int t, double c, std::optional<int> l) {
  if (t < 0) throw ValidationError("siegel_window_count: t must be >= 0");
  if (!(c > 0)) throw ValidationError("siegel_window_count: c must be > 0");
  const double lo = window_edge(c, t);
  const double hi = window_edge(c, t + 1);
  const double c_eff = l ? DomainSpec(c, 1.0, l).c_l() : c;
  std::int64_t count = 0;
  RotatedScanner scanner(k);
  const QRange range = window_q_range(lo, hi, c);
  scanner.scan(range.lo, range.hi,
               [&](std::int64_t q) { return window_radius(q, lo, c_eff); },
               [&](const ConeCoords& x) {
                 if (x.w2 < c_eff * c_eff && lo <= x.u && x.u < hi) ++count;
               });
  return count;
}

// ---------------------------------------------------------------------------

std::string ResandwichReport::to_json() const {
  nlohmann::json j = {{"c", c},
                      {"T", T},
                      {"l", l},
                      {"r0", r0},
                      {"T0", T0},
                      {"lower_sum", lower_sum},
                      {"N", N},
                      {"upper_sum", upper_sum},
                      {"cl_count", cl_count},
                      {"c0_count", c0_count},
                      {"C1", C1},
                      {"C2", C2},
                      {"gap_lower", gap_lower},
                      {"gap_upper", gap_upper}};
  return j.dump();
}

ResandwichReport verify_resandwich(const Rotation& k, double c, double T, int l) {
  const DomainSpec spec(c, T, l);
  if (T < spec.T0()) {
    throw PreconditionError("verify_resandwich: T = " + std::to_string(T) +
                            " is below T_0 = " + std::to_string(spec.T0()));
  }
  ResandwichReport r;
  r.c = c;
  r.T = T;
  r.l = l;
  r.r0 = spec.r0();
  r.T0 = spec.T0();
  r.N = count_in_domain(k, spec, Domain::E).count;

  const int lower_windows = std::max(0, static_cast<int>(std::floor(T - r.r0)));
  for (auto w : window_counts(k, c, lower_windows, l)) r.lower_sum += w;
  const int upper_windows = static_cast<int>(std::floor(T + r.r0)) + 1;
  for (auto w : window_counts(k, c, upper_windows)) r.upper_sum += w;

  RotatedScanner scanner(k);
  // E cap C_0: heights up to (c^2 + c)/2 + 1.
  const double c0_height = (c * c + c) / 2.0 + 1.0;
  const auto c0_q = std::min(last_q_below(std::cosh(T)),
                             static_cast<std::int64_t>(std::floor(c0_height)));
  const double e_radius = c * (1.0 + kCandidateSlack);
  scanner.scan(1, c0_q, [&](std::int64_t) { return e_radius; }, [&](const ConeCoords& x) {
    if (classify(Domain::E, x, spec).inside && classify_C0(x, spec).inside) ++r.c0_count;
  });

  // F_{T-r0,c,l} cap C_l.
  const DomainSpec inner = spec.with_T(T - r.r0);
  if (inner.T() > 0) {
    const double u_lo = window_edge(c, 0.0);
    const QRange range = window_q_range(u_lo, window_edge(c, inner.T()), c);
    const double cl = spec.c_l();
    scanner.scan(range.lo, range.hi, [&](std::int64_t q) { return window_radius(q, u_lo, cl); },
                 [&](const ConeCoords& x) {
                   if (classify(Domain::F_l, x, inner).inside && classify_Cl(x, inner).inside) {
                     ++r.cl_count;
                   }
                 });
  }

  const double sqrt_l = std::sqrt(static_cast<double>(l));
  r.C1 = static_cast<double>(r.cl_count) / sqrt_l;
  r.C2 = -static_cast<double>(r.c0_count);
  r.gap_lower = (static_cast<double>(r.N) + r.C2) -
                (static_cast<double>(r.lower_sum) - r.C1 * sqrt_l);
  r.gap_upper = static_cast<double>(r.upper_sum) - (static_cast<double>(r.N) + r.C2);
  if (!r.ok()) throw PropertyViolation(r.to_json());
  return r;
}

EnsembleEstimate ergodic_average_check(std::span<const Rotation> ensemble, double c, int N) {
  if (ensemble.size() < 100) {
    throw PreconditionError("ergodic_average_check: ensemble must have >= 100 rotations");
  }
  if (N < 1) throw ValidationError("ergodic_average_check: N must be >= 1");
  std::vector<double> averages;
  averages.reserve(ensemble.size());
  for (const auto& k : ensemble) {
    std::int64_t total = 0;
    for (auto w : window_counts(k, c, N)) total += w;
    averages.push_back(static_cast<double>(total) / N);
  }
  const Moments m = moments(averages);
  return {m.mean, m.stderr_mean, m.count};
}

std::string records_to_csv(std::span<const CountRecord> records) {
  CsvWriter csv({"alpha_coords", "c", "T", "N", "marginal_hits", "wall_time_s"});
  for (const auto& r : records) {
    std::string alpha;
    for (std::size_t i = 0; i < r.alpha.coords().size(); ++i) {
      if (i) alpha += ';';
      alpha += format_double(r.alpha[i]);
    }
    for (const auto& g : r.grid) {
      csv.row({alpha, format_double(r.c), format_double(g.T), std::to_string(g.N),
               std::to_string(r.marginal_hits), format_double(r.wall_time)});
    }
  }
  return csv.str();
}

}  // namespace lightcone
