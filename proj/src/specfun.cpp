#include "rmstat/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rmstat/error.hpp"

namespace rmstat {

namespace {

constexpr double kPi = std::numbers::pi;

// Rescaling guard for recurrences whose unnormalized values grow.
constexpr double kBig = 1e200;
constexpr double kLogBig = 460.51701859880914;  // log(1e200)

void check_order(double nu) {
  if (!std::isfinite(nu) || nu < kBesselMinOrder || nu > kBesselMaxOrder) {
    throw DomainError("bessel_j: order " + std::to_string(nu) + " outside [" +
                      std::to_string(kBesselMinOrder) + ", " +
                      std::to_string(kBesselMaxOrder) + "]");
  }
}

bool is_integer(double v) { return v == std::floor(v); }

double series_j(double nu, double x) {
  const double half = 0.5 * x;
  double term = std::pow(half, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  const double q = -half * half;
  for (int k = 0; k < 200; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > half) break;
  }
  return sum;
}

// Hankel expansion; terms a_k = prod_{j<=k}(4nu^2-(2j-1)^2) / (k! (8x)^k).
double hankel_j(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(a);
    if (mag > prev && k > 10) break;  // asymptotic series started to diverge
    switch (k % 4) {
      case 1: q += a; break;
      case 2: p -= a; break;
      case 3: q -= a; break;
      default: p += a; break;
    }
    if (mag < 1e-17 && k >= 10) break;
    prev = mag;
  }
  const double phase = (0.5 * nu + 0.25) * kPi;
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  const double cp = std::cos(phase);
  const double sp = std::sin(phase);
  const double cchi = cx * cp + sx * sp;
  const double schi = sx * cp - cx * sp;
  return std::sqrt(2.0 / (kPi * x)) * (p * cchi - q * schi);
}

// Miller backward recurrence for J_{mu+n}, mu in [0,1), n >= -2, normalized by
// (x/2)^mu = Gamma(mu+1) J_mu + sum_{k>=1} (mu+2k) Gamma(mu+k)/k! J_{mu+2k}.
double miller_j(double nu, double x) {
  const double base = std::floor(nu);
  const double mu = nu - base;
  const int target = static_cast<int>(base);
  const int start = 2 * ((static_cast<int>(1.2 * x) + 40 + std::max(target, 0)) / 2) + 2;

  // coefficients (mu+2k) Gamma(mu+k)/k! built upward; stored for the even orders.
  std::vector<double> coef(start / 2 + 2, 0.0);
  {
    double c = std::tgamma(mu + 1.0);  // Gamma(mu+1)/1! = Gamma(mu+k)/k! at k=1
    coef[0] = std::tgamma(mu + 1.0);
    for (int k = 1; k < static_cast<int>(coef.size()); ++k) {
      if (k > 1) c *= (mu + k - 1.0) / k;
      coef[k] = (mu + 2.0 * k) * c;
    }
  }

  double jp1 = 0.0;    // J_{mu+m+1}
  double j = 1e-300;   // J_{mu+m}
  double norm = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  double jt = 0.0;
  for (int m = start; m >= 0; --m) {
    if (m % 2 == 0) norm += coef[m / 2] * j;
    if (m == target) jt = j;
    if (m == 1) j1 = j;
    if (m == 0) j0 = j;
    if (m == 0) break;
    const double jm1 = 2.0 * (mu + m) / x * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::abs(j) > kBig) {
      j /= kBig;
      jp1 /= kBig;
      norm /= kBig;
      jt /= kBig;
      j1 /= kBig;
    }
  }
  const double scale = std::pow(0.5 * x, mu) / norm;
  if (target >= 0) return jt * scale;
  // downward recurrence is stable for J
  double upper = j1 * scale;
  double cur = j0 * scale;
  for (int m = 0; m > target; --m) {
    const double down = 2.0 * (mu + m) / x * cur - upper;
    upper = cur;
    cur = down;
  }
  return cur;
}

double hankel_threshold(double nu) { return std::max(25.0, nu * nu + 15.0); }

double bessel_j_unchecked(double nu, double x) {
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0 || is_integer(nu)) return 0.0;
    throw DomainError("bessel_j: J_nu(0) is unbounded for negative non-integer nu");
  }
  if (nu < 0.0 && is_integer(nu)) {
    const double v = bessel_j_unchecked(-nu, x);
    return (static_cast<long>(-nu) % 2 == 0) ? v : -v;
  }
  if (x <= 12.0) return series_j(nu, x);
  if (x >= hankel_threshold(nu)) return hankel_j(nu, x);
  return miller_j(nu, x);
}

}  // namespace

double bessel_j(double nu, double x) {
  check_order(nu);
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_j: argument must be finite and >= 0");
  }
  return bessel_j_unchecked(nu, x);
}

void bessel_j(double nu, std::span<const double> x, std::span<double> out) {
  check_order(nu);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0) || !std::isfinite(x[i])) {
      throw DomainError("bessel_j: argument must be finite and >= 0");
    }
    out[i] = bessel_j_unchecked(nu, x[i]);
  }
}

double log_gamma(double z) {
  if (!(z > 0.0)) throw DomainError("log_gamma: requires z > 0");
  return std::lgamma(z);
}

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Lanczos (g = 7) for Re z >= 1/2.
std::complex<double> log_gamma_lanczos(std::complex<double> z) {
  z -= 1.0;
  std::complex<double> acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && is_integer(z.real())) {
    throw DomainError("log_gamma: pole at non-positive integer");
  }
  if (z.real() >= 0.5) return log_gamma_lanczos(z);
  return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma_lanczos(1.0 - z);
}

std::complex<double> gamma(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && is_integer(z.real())) {
    throw DomainError("gamma: pole at non-positive integer");
  }
  if (z.real() >= 0.5) return std::exp(log_gamma_lanczos(z));
  return kPi / (std::sin(kPi * z) * std::exp(log_gamma_lanczos(1.0 - z)));
}

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  if (!(a < b)) throw DomainError("gauss_legendre: invalid interval (a >= b)");
  Quadrature q;
  q.a = a;
  q.b = b;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        if (it > 0) break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x runs from near +1 downward; store ascending
    q.nodes[n - 1 - i] = mid + half * x;
    q.nodes[i] = mid - half * x;
    q.weights[n - 1 - i] = half * w;
    q.weights[i] = half * w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = mid;
  return q;
}

Quadrature composite_gauss_legendre(int panels, int points, double a, double b) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be >= 1");
  if (!(a < b)) throw DomainError("composite_gauss_legendre: invalid interval (a >= b)");
  const Quadrature ref = gauss_legendre(points, -1.0, 1.0);
  Quadrature q;
  q.a = a;
  q.b = b;
  q.nodes.reserve(static_cast<std::size_t>(panels) * points);
  q.weights.reserve(static_cast<std::size_t>(panels) * points);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == panels) ? b : lo + width;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < points; ++i) {
      q.nodes.push_back(mid + half * ref.nodes[i]);
      q.weights.push_back(half * ref.weights[i]);
    }
  }
  return q;
}

Quadrature concatenate(std::span<const Quadrature> parts) {
  Quadrature q;
  if (parts.empty()) return q;
  q.a = parts.front().a;
  q.b = parts.back().b;
  for (const auto& part : parts) {
    q.nodes.insert(q.nodes.end(), part.nodes.begin(), part.nodes.end());
    q.weights.insert(q.weights.end(), part.weights.begin(), part.weights.end());
  }
  return q;
}

namespace {

void check_index(int i) {
  if (i < 0 || i > kMaxOrthonormalIndex) {
    throw DomainError("orthonormal function index " + std::to_string(i) +
                      " outside the stability envelope [0, " +
                      std::to_string(kMaxOrthonormalIndex) + "]");
  }
}

}  // namespace

void hermite_fns(int count, double x, std::span<double> out) {
  if (count <= 0) return;
  check_index(count - 1);
  // normalized recurrence without the Gaussian factor, with a running log scale
  // per entry so that large |x| neither overflows nor underflows prematurely.
  std::vector<double> logscale(count, 0.0);
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25);
  double shift = 0.0;
  out[0] = cur;
  logscale[0] = 0.0;
  for (int k = 0; k + 1 < count; ++k) {
    const double next = std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      shift += kLogBig;
    }
    out[k + 1] = cur;
    logscale[k + 1] = shift;
  }
  const double g = -0.5 * x * x;
  for (int k = 0; k < count; ++k) out[k] *= std::exp(g + logscale[k]);
}

double hermite_fn(int i, double x) {
  check_index(i);
  std::vector<double> v(i + 1);
  hermite_fns(i + 1, x, v);
  return v[i];
}

void laguerre_fns(int count, double nu, double x, std::span<double> out) {
  if (count <= 0) return;
  check_index(count - 1);
  if (!(nu > -1.0)) throw DomainError("laguerre_fn: requires nu > -1");
  if (!(x > 0.0)) throw DomainError("laguerre_fn: requires x > 0");
  std::vector<double> logscale(count, 0.0);
  double prev = 0.0;
  double cur = std::exp(-0.5 * std::lgamma(nu + 1.0));
  double shift = 0.0;
  out[0] = cur;
  for (int k = 0; k + 1 < count; ++k) {
    const double next = ((2.0 * k + 1.0 + nu - x) * cur - std::sqrt(k * (k + nu)) * prev) /
                        std::sqrt((k + 1.0) * (k + nu + 1.0));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      shift += kLogBig;
    }
    out[k + 1] = cur;
    logscale[k + 1] = shift;
  }
  const double g = 0.5 * nu * std::log(x) - 0.5 * x;
  for (int k = 0; k < count; ++k) out[k] *= std::exp(g + logscale[k]);
}

double laguerre_fn(int i, double nu, double x) {
  check_index(i);
  std::vector<double> v(i + 1);
  laguerre_fns(i + 1, nu, x, v);
  return v[i];
}

}  // namespace rmstat
