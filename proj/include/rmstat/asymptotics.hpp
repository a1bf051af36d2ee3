#pragma once

#include <complex>
#include <span>
#include <utility>

#include "rmstat/fredholm.hpp"
#include "rmstat/symbols.hpp"
#include "rmstat/transforms.hpp"

namespace rmstat {

/// Gaussian limit law exp(ik mean - k^2 variance / 2) for a linear statistic.
struct GaussianPrediction {
  double mean = 0.0;
  double variance = 0.0;
  Regime regime = Regime::bessel;
  double nu = 0.0;
  double alpha = 0.0;
  // sine regime only: (alpha / 2pi) int_R f, reported beside the operator-trace mean
  double literal_mean = 0.0;

  std::complex<double> log_cf(double k) const;
  std::complex<double> cf(double k) const;
};

/// Mean from the diagonal of A_alpha(f), i.e. 2 alpha (1/pi) C(f)(0); variance
/// 2 int_0^inf x f^(x) f^(-x) dx from the Fourier transform.
GaussianPrediction sine_prediction(const TestFunction& f, double alpha,
                                   const TransformConfig& cfg = {});

/// 2 int_0^inf x f^(x) f^(-x) dx.
double sine_variance(const TestFunction& f, const TransformConfig& cfg = {});

/// (alpha/pi) int_0^inf f - (nu/2) f(0).
double bessel_mean(const TestFunction& f, double alpha, double nu);

/// (1/pi^2) int_0^inf x C(f)(x)^2 dx.
double bessel_variance_cosine(const TestFunction& f, const TransformConfig& cfg = {});

/// (1/pi^2) int_R |M(f)(2iy)|^2 y tanh(pi y) dy.
double bessel_variance_mellin(const TestFunction& f);

/// Derivatives in L1 that the Gaussian limit at order nu asks of f.
int required_smoothness(double nu);

/// Theorem-13 law; throws HypothesisError when f is not smooth enough for nu.
GaussianPrediction bessel_cf_prediction(const TestFunction& f, double alpha, double nu,
                                        const TransformConfig& cfg = {});

/// exp((1/2pi) int_R log(1 + sigma)) with sigma = e^{ikf} - 1, i.e. exp(ik int_R f / 2pi).
std::complex<double> szego_G(const TestFunction& f, double k);

/// -(1/pi^2) sum_{j=1}^{n-1} (1/j) int_0^inf x C(s^j) C(s^{n-j}) for s = e^{ikf} - 1:
/// the O(1) gap between tr B(s)^n and tr B(s^n).
std::complex<double> thm12_correction(const TestFunction& f, double k, int n,
                                      const TransformConfig& cfg = {});

/// 2 G(p) G(q) cos(pi p/2) cos(pi q/2) / (G(p+q) cos(pi (p+q)/2)) with G = Gamma,
/// so that int_R |x|^{p-1} |x+y|^{q-1} dx = |y|^{p+q-1} t(p, q).
std::complex<double> t_weight(std::complex<double> p, std::complex<double> q);

/// int_R |x|^{p-1} |x+1|^{q-1} dx by direct quadrature, for real p, q; equals t(p, q).
double t_weight_integral(double p, double q);

/// Both sides of Kac's identity, averaged over all orderings of a (size <= 7):
/// lhs = mean max(0, s_1, ..., s_n), rhs = mean sum_k a_perm(1) [s_k > 0].
std::pair<double, double> kac_identity_check(std::span<const double> a);

}  // namespace rmstat
