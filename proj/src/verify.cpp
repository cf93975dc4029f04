#include "lightcone/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

#include "lightcone/count.hpp"
#include "lightcone/enumerate.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"

namespace lightcone {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string join(std::span<const std::int64_t> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

std::string join(std::span<const double> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out + ")";
}

void note_violation(SuiteResult& r, const std::string& what) {
  if (r.violations++ == 0) r.detail = what;
}

double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

}  // namespace

// ---------------------------------------------------------------------------

Rotation random_rotation(CounterRng& rng, int n) {
  if (n < 1) throw DimensionError("random_rotation: n must be >= 1");
  const Eigen::Index dim = n + 1;
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  // sign-fix the columns so the distribution is Haar, then land in SO(n+1)
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return Rotation(std::move(q));
}

Rotation random_rotation_with_alpha(CounterRng& rng, const SpherePoint& alpha) {
  const int n = alpha.dimension();
  const Rotation base = rotation_to_pole(alpha);
  if (n < 2) return base;
  Eigen::MatrixXd block = Eigen::MatrixXd::Identity(n + 1, n + 1);
  block.topLeftCorner(n, n) = random_rotation(rng, n - 1).matrix();
  return Rotation(std::move(block)) * base;
}

IntVec random_cone_point(CounterRng& rng, int n, std::int64_t q_max) {
  if (n < 1) throw DimensionError("random_cone_point: n must be >= 1");
  if (q_max < 1) throw ValidationError("random_cone_point: q_max must be >= 1");
  const auto root = isqrt(q_max);
  IntVec p(static_cast<std::size_t>(n) + 1);
  std::int64_t q = 0;
  for (;;) {
    const auto s = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(root) + 1));
    IntVec m(static_cast<std::size_t>(n));
    std::int64_t m2 = 0;
    for (auto& x : m) {
      x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * root + 1))) - root;
      m2 += x * x;
    }
    q = m2 + s * s;
    if (q < 1 || q > q_max) continue;
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = 2 * s * m[i];
    p.back() = m2 - s * s;
    break;
  }
  // random signed permutation (Fisher-Yates)
  for (std::size_t i = p.size(); i > 1; --i) {
    std::swap(p[i - 1], p[rng.below(i)]);
  }
  for (auto& x : p) {
    if (rng.next() & 1) x = -x;
  }
  p.push_back(q);
  return p;
}

std::int64_t jacobi_r4(std::int64_t m) {
  if (m < 0) return 0;
  if (m == 0) return 1;
  std::int64_t sum = 0;
  for (std::int64_t d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    const std::int64_t e = m / d;
    if (d % 4) sum += d;
    if (e != d && e % 4) sum += e;
  }
  return 8 * sum;
}

// ---------------------------------------------------------------------------

SuiteResult check_correspondence(const VerifyOptions& options, int samples) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "correspondence";
  CounterRng rng(options.seed, 1);
  const int n = options.n;
  constexpr std::array<double, 3> kCs = {0.3, 1.0, 2.0};

  for (int i = 0; i < samples; ++i) {
    const double c = kCs[static_cast<std::size_t>(i) % kCs.size()];
    const IntVec z = random_cone_point(rng, n, 1000);
    const std::int64_t q = z.back();
    const auto qd = static_cast<double>(q);

    // alpha at distance ~ U(0, 2) c/q from p/q so both outcomes are common
    RealVec base(z.begin(), z.end() - 1), dir(base.size());
    for (auto& x : base) x /= qd;
    double dot = 0, norm2 = 0;
    for (auto& x : dir) x = rng.normal();
    for (std::size_t j = 0; j < dir.size(); ++j) dot += dir[j] * base[j];
    for (std::size_t j = 0; j < dir.size(); ++j) {
      dir[j] -= dot * base[j];
      norm2 += dir[j] * dir[j];
    }
    const double eps = uniform(rng, 0.0, 2.0) * c / qd / std::sqrt(norm2);
    RealVec a(base.size());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = base[j] + eps * dir[j];
    const Rotation k = random_rotation_with_alpha(rng, SpherePoint::normalized(a));
    const SpherePoint alpha = sphere_point_of_rotation(k);

    // geometric side: |q alpha - p| < c
    double dist2 = 0;
    for (std::size_t j = 0; j < base.size(); ++j) {
      const double d = qd * alpha[j] - static_cast<double>(z[j]);
      dist2 += d * d;
    }
    const double dist = std::sqrt(dist2);
    if (std::abs(dist - c) <= kMarginTol * std::max(1.0, c)) {
      ++r.marginal_skipped;
      continue;
    }

    // box side: is p among the fiber points near q alpha?
    BoxQuery query{n, q, RealVec(alpha.coords().begin(), alpha.coords().end()),
                   c + options.radius_offset};
    for (auto& x : query.center) x *= qd;
    const auto hits = box_search(query);
    const IntVec p(z.begin(), z.end() - 1);
    const bool box_in = std::find(hits.begin(), hits.end(), p) != hits.end();

    // domain side: 2 x_{n+2} (x_{n+2} - x_{n+1}) < c^2 for x = kz
    const ConeCoords x = cone_coords(k.apply(std::span<const std::int64_t>(z)));
    const double lhs = 2 * x.height * x.v;
    if (std::abs(lhs - c * c) <= kMarginTol * std::max(1.0, c * c)) {
      ++r.marginal_skipped;
      continue;
    }
    const bool domain_in = lhs < c * c;
    const bool geometric_in = dist < c;
    ++r.checked;
    r.positives += domain_in;
    if (box_in != domain_in || geometric_in != domain_in) {
      std::ostringstream os;
      os << "z=" << join(std::span<const std::int64_t>(z)) << " c=" << c
         << " alpha=" << join(alpha.coords()) << " |q alpha - p|=" << format_double(dist)
         << " 2h(h-x)=" << format_double(lhs) << " box=" << box_in << " domain=" << domain_in;
      note_violation(r, os.str());
    }
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult check_sandwich(const VerifyOptions& options, int samples) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "sandwich";
  CounterRng rng(options.seed, 2);
  const int n = options.n;
  constexpr std::array<int, 3> kLs = {1, 8, 64};
  constexpr std::array<double, 3> kCs = {0.5, 1.0, 2.0};

  RealVec x(static_cast<std::size_t>(n) + 2);
  for (int i = 0; i < samples; ++i) {
    const int l = kLs[static_cast<std::size_t>(i) % kLs.size()];
    const double c = kCs[static_cast<std::size_t>(i / 3) % kCs.size()];
    const DomainSpec probe(c, 1.0, l);
    const double T = probe.T0() + uniform(rng, 0.0, 10.0);
    const DomainSpec spec = probe.with_T(T);
    const double r0 = spec.r0();

    // u log-uniform over the union of all windows, uv spread around c^2
    const double u = std::exp(uniform(rng, std::log(c) - 3.0, std::log(c) + T + r0 + 2.0));
    const double uv = c * c * uniform(rng, 0.0, 1.5);
    const double v = uv / u;
    double w2 = 0;
    for (int j = 0; j < n; ++j) {
      x[static_cast<std::size_t>(j)] = rng.normal();
      w2 += x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    }
    const double scale = std::sqrt(uv / w2);
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] *= scale;
    x[static_cast<std::size_t>(n)] = (u - v) / 2;
    x[static_cast<std::size_t>(n) + 1] = (u + v) / 2;

    const ConeCoords cc = cone_coords(x);
    const Verdict fl = classify(Domain::F_l, cc, spec.with_T(T - r0));
    const Verdict cl = classify_Cl(cc, spec);
    const Verdict e = classify(Domain::E, cc, spec);
    const Verdict c0 = classify_C0(cc, spec);
    const Verdict f = classify(Domain::F, cc, spec.with_T(T + r0));
    if (fl.marginal || cl.marginal || e.marginal || c0.marginal || f.marginal) {
      ++r.marginal_skipped;
      continue;
    }
    ++r.checked;
    const bool inner = fl.inside && !cl.inside;
    const bool middle = e.inside && !c0.inside;
    r.positives += inner;
    if ((inner && !middle) || (middle && !f.inside)) {
      std::ostringstream os;
      os << "x=" << join(std::span<const double>(x)) << " c=" << c << " T=" << T << " l=" << l
         << " inner=" << inner << " middle=" << middle << " outer=" << f.inside;
      note_violation(r, os.str());
    }
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult check_tessellation(const VerifyOptions& options, int rotations, int N_max) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "tessellation";
  CounterRng rng(options.seed, 3);
  const double c = 1.0;
  for (int i = 0; i < rotations; ++i) {
    const Rotation k = random_rotation(rng, options.n);
    const auto batched = window_counts(k, c, N_max);
    std::int64_t prefix = 0;
    for (int N = 1; N <= N_max; ++N) {
      const std::int64_t single = siegel_window_count(k, N - 1, c);
      prefix += single;
      const DomainCount total = count_in_domain(k, DomainSpec(c, N), Domain::F);
      r.marginal_skipped += total.marginal_hits;
      ++r.checked;
      r.positives += total.count > 0;
      if (prefix != total.count || single != batched[static_cast<std::size_t>(N - 1)]) {
        std::ostringstream os;
        os << "rotation " << i << " N=" << N << ": window sum " << prefix << " vs F total "
           << total.count << "; window " << N - 1 << " single " << single << " batched "
           << batched[static_cast<std::size_t>(N - 1)];
        note_violation(r, os.str());
      }
    }
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult check_two_path(const VerifyOptions& options, int alphas) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "two_path";
  CounterRng rng(options.seed, 4);
  constexpr std::array<double, 2> kCs = {0.5, 1.0};
  for (int i = 0; i < alphas; ++i) {
    const double c = kCs[static_cast<std::size_t>(i) % kCs.size()];
    RealVec g(static_cast<std::size_t>(options.n) + 1);
    for (auto& x : g) x = rng.normal();
    const SpherePoint alpha = SpherePoint::normalized(g);
    const double T = std::acosh(uniform(rng, 1.0, 1e4));
    const ApproximantCount direct = count_approximants(alpha, c, T);
    const Rotation k = rotation_to_pole(alpha);
    const DomainCount lattice = count_in_domain(k, DomainSpec(c, T), Domain::E);
    if (direct.marginal_hits || lattice.marginal_hits) {
      ++r.marginal_skipped;
      continue;
    }
    ++r.checked;
    r.positives += direct.N > 0;
    if (direct.N != lattice.count) {
      std::ostringstream os;
      os << "alpha=" << join(alpha.coords()) << " c=" << c << " T=" << format_double(T)
         << ": direct " << direct.N << " vs lattice " << lattice.count;
      note_violation(r, os.str());
    }
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult check_fiber_oracle(const VerifyOptions& options, std::int64_t q_box, int balls,
                               std::int64_t q_jacobi) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "fiber_oracle";
  CounterRng rng(options.seed, 5);
  const int n = options.n;

  struct Ball {
    SpherePoint alpha;
    double c;
  };
  std::vector<Ball> targets;
  for (int b = 0; b < balls; ++b) {
    RealVec g(static_cast<std::size_t>(n) + 1);
    for (auto& x : g) x = rng.normal();
    targets.push_back({SpherePoint::normalized(g), uniform(rng, 0.3, 3.0)});
  }

  BoxQuery query;
  query.n = n;
  for (std::int64_t q = 1; q <= q_box; ++q) {
    const auto fiber = fiber_points(n, q, q_box);  // ascending lexicographic
    const auto qd = static_cast<double>(q);
    for (const auto& [alpha, c] : targets) {
      query.q = q;
      query.radius = c;
      query.center.assign(alpha.coords().begin(), alpha.coords().end());
      for (auto& x : query.center) x *= qd;

      // exhaustive filter, restricted to the slab |p_0 - center_0| < c
      const auto lo = std::lower_bound(
          fiber.begin(), fiber.end(), query.center[0] - c,
          [](const IntVec& p, double v) { return static_cast<double>(p[0]) < v; });
      std::vector<IntVec> expected;
      bool marginal = false;
      for (auto it = lo; it != fiber.end() && static_cast<double>((*it)[0]) < query.center[0] + c;
           ++it) {
        double d2 = 0;
        for (std::size_t j = 0; j < it->size(); ++j) {
          const double d = static_cast<double>((*it)[j]) - query.center[j];
          d2 += d * d;
        }
        if (std::abs(std::sqrt(d2) - c) <= kMarginTol * std::max(1.0, c)) marginal = true;
        if (d2 < c * c) expected.push_back(*it);
      }
      if (marginal) {
        ++r.marginal_skipped;
        continue;
      }
      ++r.checked;
      r.positives += !expected.empty();
      const auto found = box_search(query);
      bool exact_norms = true;
      for (const auto& p : found) {
        __int128 s = 0;
        for (auto x : p) s += static_cast<__int128>(x) * x;
        exact_norms = exact_norms && s == static_cast<__int128>(q) * q;
      }
      if (found != expected || !exact_norms) {
        std::ostringstream os;
        os << "q=" << q << " c=" << c << " alpha=" << join(alpha.coords()) << ": box "
           << found.size() << " points, exhaustive " << expected.size();
        note_violation(r, os.str());
      }
    }
  }

  if (n == 3) {
    for (std::int64_t q = 1; q <= q_jacobi; ++q) {
      ++r.checked;
      const std::int64_t counted = fiber_count(n, q).count;
      const std::int64_t expected = jacobi_r4(q * q);
      if (counted != expected) {
        note_violation(r, "r_4(" + std::to_string(q * q) + "): counted " +
                              std::to_string(counted) + ", Jacobi " + std::to_string(expected));
      }
    }
  }
  r.seconds = clock.seconds();
  return r;
}

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options) {
  if (options.quick) {
    return {check_correspondence(options, 2000), check_sandwich(options, 20000),
            check_tessellation(options, 5, 8), check_two_path(options, 10),
            check_fiber_oracle(options, 60, 30, 200)};
  }
  return {check_correspondence(options), check_sandwich(options), check_tessellation(options),
          check_two_path(options), check_fiber_oracle(options)};
}

}  // namespace lightcone
