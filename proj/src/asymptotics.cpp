#include "rmstat/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "rmstat/error.hpp"
#include "rmstat/specfun.hpp"

namespace rmstat {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^inf g over panels of `width`, stopping after four panels whose peak
// |g| is below `cutoff`.
template <typename F>
double halfline_until_quiet(F&& g, double width, double cutoff, double limit) {
  const Quadrature ref = gauss_legendre(20, 0.0, width);
  double acc = 0.0;
  int quiet = 0;
  for (double lo = 0.0; lo < limit; lo += width) {
    double panel = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double v = g(lo + ref.nodes[i]);
      peak = std::max(peak, std::abs(v));
      panel += ref.weights[i] * v;
    }
    acc += panel;
    quiet = peak < cutoff ? quiet + 1 : 0;
    if (quiet >= 4) return acc;
  }
  throw ResolutionError("integrand did not decay below " + std::to_string(cutoff) +
                        " before " + std::to_string(limit));
}

}  // namespace

std::complex<double> GaussianPrediction::log_cf(double k) const {
  return {-0.5 * k * k * variance, k * mean};
}

std::complex<double> GaussianPrediction::cf(double k) const { return std::exp(log_cf(k)); }

double sine_variance(const TestFunction& f, const TransformConfig& cfg) {
  if (f.sup_norm == 0.0) return 0.0;
  auto g = [&](double x) {
    return x * (fourier_transform(f, x, cfg) * fourier_transform(f, -x, cfg)).real();
  };
  return 2.0 * halfline_until_quiet(g, 0.5, 1e-14, 2000.0);
}

GaussianPrediction sine_prediction(const TestFunction& f, double alpha,
                                   const TransformConfig& cfg) {
  if (!(alpha > 0.0)) throw DomainError("sine_prediction: alpha must be positive");
  GaussianPrediction p;
  p.regime = Regime::sine;
  p.alpha = alpha;
  p.mean = f.sup_norm == 0.0 ? 0.0 : 2.0 * alpha * cosine_transform(f, 0.0, cfg) / kPi;
  p.literal_mean = alpha * f.integral_fullline / (2.0 * kPi);
  p.variance = sine_variance(f, cfg);
  return p;
}

double bessel_mean(const TestFunction& f, double alpha, double nu) {
  return alpha / kPi * f.integral_halfline - 0.5 * nu * f.value_at_zero;
}

double bessel_variance_cosine(const TestFunction& f, const TransformConfig& cfg) {
  if (f.sup_norm == 0.0) return 0.0;
  const EvenFunction g = f.as_even();
  return cosine_pair_integral(g, g, cfg).real() / (kPi * kPi);
}

double bessel_variance_mellin(const TestFunction& f) {
  if (f.sup_norm == 0.0) return 0.0;
  auto g = [&](double y) {
    if (y == 0.0) return 0.25 * kPi * f.value_at_zero * f.value_at_zero;
    return std::norm(mellin_line(f, y)) * y * std::tanh(kPi * y);
  };
  // the integrand is even in y
  return 2.0 * halfline_until_quiet(g, 0.25, 1e-12, 400.0) / (kPi * kPi);
}

int required_smoothness(double nu) { return static_cast<int>(std::ceil(nu)) + 2; }

GaussianPrediction bessel_cf_prediction(const TestFunction& f, double alpha, double nu,
                                        const TransformConfig& cfg) {
  const int need = required_smoothness(nu);
  if (f.smoothness < need) {
    throw HypothesisError("bessel_cf_prediction: " + f.id + " has " +
                          std::to_string(f.smoothness) + " L1 derivatives, order " +
                          std::to_string(nu) + " needs " + std::to_string(need));
  }
  GaussianPrediction p;
  p.regime = Regime::bessel;
  p.alpha = alpha;
  p.nu = nu;
  p.mean = bessel_mean(f, alpha, nu);
  p.variance = bessel_variance_cosine(f, cfg);
  return p;
}

std::complex<double> szego_G(const TestFunction& f, double k) {
  if (std::abs(k) * f.sup_norm >= kPi) {
    throw DomainError("szego_G: |k| sup|f| must be below pi for the principal logarithm");
  }
  return std::exp(std::complex<double>(0.0, k * f.integral_fullline / (2.0 * kPi)));
}

std::complex<double> thm12_correction(const TestFunction& f, double k, int n,
                                      const TransformConfig& cfg) {
  if (n < 2) throw DomainError("thm12_correction: n must be >= 2");
  if (k == 0.0 || f.sup_norm == 0.0) return 0.0;
  const Symbol sigma = make_symbol(f, k);
  std::vector<CosineTransformer> powers;
  powers.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j < n; ++j) powers.emplace_back(symbol_power(sigma, j), cfg);
  std::complex<double> acc = 0.0;
  for (int j = 1; j < n; ++j) {
    acc += cosine_pair_integral(powers[j - 1], powers[n - j - 1]) / static_cast<double>(j);
  }
  return -acc / (kPi * kPi);
}

std::complex<double> t_weight(std::complex<double> p, std::complex<double> q) {
  const std::complex<double> s = p + q;
  if (!(p.real() > 0.0 && p.real() < 1.0 && q.real() > 0.0 && q.real() < 1.0 && s.real() < 1.0)) {
    throw DomainError("t_weight: need 0 < Re p, Re q < 1 and Re(p+q) < 1");
  }
  const std::complex<double> half_pi = 0.5 * kPi;
  return 2.0 * gamma(p) * gamma(q) * std::cos(half_pi * p) * std::cos(half_pi * q) /
         (gamma(s) * std::cos(half_pi * s));
}

double t_weight_integral(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 && p + q < 1.0)) {
    throw DomainError("t_weight_integral: need 0 < p, q < 1 and p + q < 1");
  }
  // every piece is int_0^1 s^a h(s) ds with a > -1 and h smooth; u = s^(a+1)
  // removes the endpoint singularity
  const Quadrature ref = composite_gauss_legendre(4, 32, 0.0, 1.0);
  auto piece = [&](double a, auto&& h) {
    const double e = 1.0 / (a + 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) acc += ref.weights[i] * h(std::pow(ref.nodes[i], e));
    return acc * e;
  };
  const double ab = -p - q;  // exponent after x -> 1/s at either infinity
  double total = 0.0;
  // x in (0, 1) and (1, inf)
  total += piece(p - 1.0, [&](double s) { return std::pow(1.0 + s, q - 1.0); });
  total += piece(ab, [&](double s) { return std::pow(1.0 + s, q - 1.0); });
  // x in (-1/2, 0) and (-1, -1/2), after s -> s/2
  total += std::pow(0.5, p) * piece(p - 1.0, [&](double s) { return std::pow(1.0 - 0.5 * s, q - 1.0); });
  total += std::pow(0.5, q) * piece(q - 1.0, [&](double s) { return std::pow(1.0 - 0.5 * s, p - 1.0); });
  // x = -1 - v with v in (0, 1) and (1, inf)
  total += piece(q - 1.0, [&](double s) { return std::pow(1.0 + s, p - 1.0); });
  total += piece(ab, [&](double s) { return std::pow(1.0 + s, p - 1.0); });
  return total;
}

std::pair<double, double> kac_identity_check(std::span<const double> a) {
  if (a.size() > 7) throw DomainError("kac_identity_check: at most 7 entries");
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  long double lhs = 0.0L;
  long double rhs = 0.0L;
  long double count = 0.0L;
  do {
    long double partial = 0.0L;
    long double best = 0.0L;
    for (std::size_t idx : perm) {
      partial += a[idx];
      best = std::max(best, partial);
      if (partial > 0.0L) rhs += a[perm[0]];
    }
    lhs += best;
    count += 1.0L;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {static_cast<double>(lhs / count), static_cast<double>(rhs / count)};
}

}  // namespace rmstat
