#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rmstat {

/// Nodes and positive weights of an interpolatory rule on (a, b).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const { return nodes.size(); }

  template <typename F>
  auto integrate(F&& fn) const {
    using R = decltype(fn(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * fn(nodes[i]);
    return acc;
  }
};

/// Gauss-Legendre rule with n nodes on (a, b); exact for degree <= 2n-1.
Quadrature gauss_legendre(int n, double a, double b);

/// Composite Gauss-Legendre: `panels` equal panels, each with `points` nodes.
Quadrature composite_gauss_legendre(int panels, int points, double a, double b);

/// Concatenate rules on adjacent intervals into one rule on (first.a, last.b).
Quadrature concatenate(std::span<const Quadrature> parts);

// Supported Bessel orders. The documented public range is [-1/2, 6]; the
// extra margin lets the recurrence J_{nu-1} be formed for every supported nu.
inline constexpr double kBesselMinOrder = -1.5;
inline constexpr double kBesselMaxOrder = 7.0;

/// Bessel function of the first kind J_nu(x) for real x >= 0.
double bessel_j(double nu, double x);

/// J_nu(x) for a fixed order at many arguments; identical to calling bessel_j.
void bessel_j(double nu, std::span<const double> x, std::span<double> out);

/// log Gamma(z) for real z > 0.
double log_gamma(double z);

/// Principal log Gamma(z) for complex z off the non-positive real axis.
std::complex<double> log_gamma(std::complex<double> z);

/// Gamma(z) for complex z, with reflection for Re z < 1/2.
std::complex<double> gamma(std::complex<double> z);

inline constexpr int kMaxOrthonormalIndex = 500;

/// i-th orthonormal Hermite function: orthonormalization of x^i e^{-x^2/2} on R.
double hermite_fn(int i, double x);

/// phi_0(x) ... phi_{count-1}(x) written into out (size >= count).
void hermite_fns(int count, double x, std::span<double> out);

/// i-th orthonormal Laguerre function: orthonormalization of x^{nu/2} e^{-x/2} x^i on R+.
double laguerre_fn(int i, double nu, double x);

void laguerre_fns(int count, double nu, double x, std::span<double> out);

}  // namespace rmstat
