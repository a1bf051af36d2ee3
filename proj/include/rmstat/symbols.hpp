#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rmstat {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

/// An even function on R, stored by its profile on [0, inf).
///
/// `radius_for(eps)` is a radius r with |g(x)| <= eps for all |x| >= r; the
/// transforms and operator builders truncate with it. `sup_abs` bounds |g|.
struct EvenFunction {
  std::string label;
  ComplexFn profile;
  std::function<double(double)> radius_for;
  double sup_abs = 0.0;
  bool real = false;
  double k = 0.0;  // symbol parameter when built from e^{ikf}-1, else 0

  std::complex<double> operator()(double x) const { return profile(std::abs(x)); }
  bool is_zero() const { return sup_abs == 0.0; }
};

/// A real, even, integrable statistic function together with its metadata.
struct TestFunction {
  std::string id;
  RealFn profile;  // values on [0, inf); eval() applies the even extension
  double integral_halfline = 0.0;
  double integral_fullline = 0.0;
  double value_at_zero = 0.0;
  std::optional<RealFn> cosine_transform_closed_form;
  int smoothness = 0;  // declared number of L1 derivatives
  double sup_norm = 0.0;
  std::function<double(double)> radius_for;

  double eval(double x) const { return profile(std::abs(x)); }
  double operator()(double x) const { return eval(x); }

  /// Radius beyond which |f| <= 1e-6.
  double support_radius() const { return radius_for(1e-6); }

  EvenFunction as_even() const;
  /// The pointwise square f^2 (used for variance traces).
  EvenFunction squared() const;
};

TestFunction gaussian();
TestFunction cauchy();
TestFunction bump(double radius = 2.0);
/// e^{-|x|}; kept out of the default catalog (its even extension has a kink).
TestFunction exponential();
/// f == 0, registered for null-statistic runs.
TestFunction zero_function();

/// Default catalog: gaussian, cauchy, bump, zero.
std::vector<TestFunction> catalog();

/// Catalog lookup by stable id ("gaussian", "cauchy", "bump", "zero", "exponential").
TestFunction find_test_function(const std::string& id);

/// sigma(x) = e^{ikf(x)} - 1.
struct Symbol {
  TestFunction f;
  double k = 0.0;

  std::complex<double> operator()(double x) const;
  EvenFunction as_even() const;
};

Symbol make_symbol(const TestFunction& f, double k);

/// x -> sigma(x)^n.
EvenFunction symbol_power(const Symbol& sigma, int n);

/// Pointwise power of an arbitrary even function.
EvenFunction power(const EvenFunction& g, int n);

/// Pointwise product.
EvenFunction product(const EvenFunction& a, const EvenFunction& b);

/// e^{ik s} - 1 evaluated without cancellation for small k s.
std::complex<double> expm1_i(double theta);

}  // namespace rmstat
