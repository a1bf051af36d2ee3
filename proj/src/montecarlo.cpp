#include "rmstat/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rmstat/error.hpp"

namespace rmstat {

namespace {

double chi(RngStream& rng, double dof) {
  std::gamma_distribution<double> g(0.5 * dof, 1.0);
  return std::sqrt(2.0 * g(rng));
}

// Number of eigenvalues below x (Sturm count of T - x I).
int sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  int count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : off / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

// Leave-one-out standard error from the M jackknife replicates.
double jackknife_se(std::span<const double> loo) {
  const double m = static_cast<double>(loo.size());
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt((m - 1.0) / m * ss);
}

}  // namespace

void EnsembleSpec::validate() const {
  if (N < 1) throw DomainError("EnsembleSpec: N must be >= 1");
  if (kind == Ensemble::laguerre && !(nu > -1.0)) throw DomainError("EnsembleSpec: nu must be > -1");
}

StatisticRegime regime_for(Ensemble kind) {
  return kind == Ensemble::hermite ? StatisticRegime::bulk_hermite
                                   : StatisticRegime::hardedge_laguerre;
}

RngStream replicate_stream(std::uint64_t seed, std::uint64_t m) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m >> 32),
                    0x726d7374u};
  return RngStream(seq);
}

std::vector<double> tridiag_eigenvalues_bisection(std::span<const double> diag,
                                                  std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (offdiag.size() + 1 != n && !(n == 0 && offdiag.empty())) {
    throw DomainError("tridiag_eigenvalues: offdiag must have n - 1 entries");
  }
  std::vector<double> out(n);
  if (n == 0) return out;
  // Gershgorin interval
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::abs(offdiag[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double tol = 1e-15 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo;
    double b = hi;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(diag, offdiag, mid) > static_cast<int>(k)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

std::vector<double> tridiag_eigenvalues(std::span<const double> diag,
                                        std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (offdiag.size() + 1 != n && !(n == 0 && offdiag.empty())) {
    throw DomainError("tridiag_eigenvalues: offdiag must have n - 1 entries");
  }
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = offdiag[i];
  const long cap = 50L * static_cast<long>(std::max<std::size_t>(n, 1));
  long iterations = 0;
  bool failed = false;
  for (std::size_t l = 0; l < n && !failed; ++l) {
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iterations > cap) {
        failed = true;
        break;
      }
      // Wilkinson-type shift from the leading 2x2 block
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  if (failed) return tridiag_eigenvalues_bisection(diag, offdiag);
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> sample_spectrum(const EnsembleSpec& spec, RngStream& rng) {
  spec.validate();
  const int n = spec.N;
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n - 1));
  if (spec.kind == Ensemble::hermite) {
    // Dumitriu-Edelman at beta = 2, rescaled to the weight e^{-x^2}
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (int i = 0; i < n; ++i) diag[i] = normal(rng);
    for (int i = 0; i + 1 < n; ++i) off[i] = 0.5 * chi(rng, 2.0 * (n - 1 - i));
  } else {
    // lower bidiagonal B; eigenvalues of B B^T / 2 carry the weight x^nu e^{-x}
    std::vector<double> b_diag(static_cast<std::size_t>(n));
    std::vector<double> b_sub(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) b_diag[i] = chi(rng, 2.0 * (spec.nu + n - i));
    for (int i = 0; i + 1 < n; ++i) b_sub[i] = chi(rng, 2.0 * (n - 1 - i));
    for (int i = 0; i < n; ++i) {
      const double below = i > 0 ? b_sub[i - 1] : 0.0;
      diag[i] = 0.5 * (b_diag[i] * b_diag[i] + below * below);
      if (i + 1 < n) off[i] = 0.5 * b_diag[i] * b_sub[i];
    }
  }
  return tridiag_eigenvalues(diag, off);
}

double linear_statistic(std::span<const double> eigs, const TestFunction& f,
                        StatisticRegime regime, int N) {
  if (N < 1) throw DomainError("linear_statistic: N must be >= 1");
  double acc = 0.0;
  if (regime == StatisticRegime::bulk_hermite) {
    const double s = std::sqrt(2.0 * N);
    for (double x : eigs) acc += f.eval(x * s);
  } else {
    for (double x : eigs) {
      if (x < 0.0) throw DomainError("linear_statistic: negative eigenvalue at the hard edge");
      acc += f.eval(std::sqrt(4.0 * N * x));
    }
  }
  return acc;
}

std::vector<double> sample_statistics(const EnsembleSpec& spec, const TestFunction& f,
                                      StatisticRegime regime, int M, unsigned workers) {
  spec.validate();
  if (M < 1) throw DomainError("sample_statistics: M must be >= 1");
  std::vector<double> stats(static_cast<std::size_t>(M));
  detail::parallel_for(
      stats.size(),
      [&](std::size_t m) {
        RngStream rng = replicate_stream(spec.seed, m);
        const std::vector<double> eigs = sample_spectrum(spec, rng);
        stats[m] = linear_statistic(eigs, f, regime, spec.N);
      },
      workers == 0 ? detail::default_workers() : workers);
  return stats;
}

McRunReport summarize(std::span<const double> s, std::span<const double> k_grid) {
  const std::size_t count = s.size();
  if (count < 2) throw DomainError("summarize: need at least two replicates");
  const double m = static_cast<double>(count);
  McRunReport r;
  r.replicate_count = static_cast<int>(count);
  r.k_grid.assign(k_grid.begin(), k_grid.end());

  // ordered sums, so the result does not depend on how replicates were scheduled
  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : s) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / m;
  double centered = 0.0;
  for (double v : s) centered += (v - mean) * (v - mean);
  r.mean.value = mean;
  r.variance.value = centered / (m - 1.0);

  std::vector<double> loo(count);
  for (std::size_t i = 0; i < count; ++i) loo[i] = (sum - s[i]) / (m - 1.0);
  r.mean.se = jackknife_se(loo);
  for (std::size_t i = 0; i < count; ++i) {
    const double sm = (sum - s[i]) / (m - 1.0);
    const double ss = sum2 - s[i] * s[i];
    loo[i] = (ss - (m - 1.0) * sm * sm) / (m - 2.0);
  }
  r.variance.se = count > 2 ? jackknife_se(loo) : 0.0;

  for (double k : k_grid) {
    ComplexEstimate ce;
    if (k != 0.0) {
      double re = 0.0;
      double im = 0.0;
      for (double v : s) {
        re += std::cos(k * v);
        im += std::sin(k * v);
      }
      ce.value = {re / m, im / m};
      std::vector<double> loo_im(count);
      for (std::size_t i = 0; i < count; ++i) {
        loo[i] = (re - std::cos(k * s[i])) / (m - 1.0);
        loo_im[i] = (im - std::sin(k * s[i])) / (m - 1.0);
      }
      ce.se_real = jackknife_se(loo);
      ce.se_imag = jackknife_se(loo_im);
    }
    r.cf.push_back(ce);
  }
  return r;
}

McRunReport estimate(const EnsembleSpec& spec, const TestFunction& f, StatisticRegime regime,
                     std::span<const double> k_grid, int M, unsigned workers) {
  if (M < 100) throw DomainError("estimate: at least 100 replicates");
  const std::vector<double> stats = sample_statistics(spec, f, regime, M, workers);
  McRunReport r = summarize(stats, k_grid);
  r.statistic_id = f.id;
  r.seed = spec.seed;
  r.stream_rule = "mt19937_64 seeded by seed_seq(seed, replicate index)";
  return r;
}

}  // namespace rmstat
