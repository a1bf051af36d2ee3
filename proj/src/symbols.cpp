#include "rmstat/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmstat/error.hpp"
#include "rmstat/specfun.hpp"

namespace rmstat {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_eps(double eps) { return std::clamp(eps, 1e-300, 1.0); }

}  // namespace

std::complex<double> expm1_i(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, std::sin(theta)};
}

EvenFunction TestFunction::as_even() const {
  EvenFunction g;
  g.label = id;
  g.profile = [p = profile](double x) { return std::complex<double>(p(x), 0.0); };
  g.radius_for = radius_for;
  g.sup_abs = sup_norm;
  g.real = true;
  return g;
}

EvenFunction TestFunction::squared() const {
  EvenFunction g;
  g.label = id + "^2";
  g.profile = [p = profile](double x) {
    const double v = p(x);
    return std::complex<double>(v * v, 0.0);
  };
  g.radius_for = [r = radius_for](double eps) { return r(std::sqrt(clamp_eps(eps))); };
  g.sup_abs = sup_norm * sup_norm;
  g.real = true;
  return g;
}

TestFunction gaussian() {
  TestFunction f;
  f.id = "gaussian";
  f.profile = [](double x) { return std::exp(-x * x); };
  f.integral_halfline = 0.5 * std::sqrt(kPi);
  f.integral_fullline = std::sqrt(kPi);
  f.value_at_zero = 1.0;
  f.cosine_transform_closed_form = [](double x) {
    return 0.5 * std::sqrt(kPi) * std::exp(-0.25 * x * x);
  };
  f.smoothness = 16;
  f.sup_norm = 1.0;
  f.radius_for = [](double eps) { return std::sqrt(std::max(0.0, -std::log(clamp_eps(eps)))); };
  return f;
}

TestFunction cauchy() {
  TestFunction f;
  f.id = "cauchy";
  f.profile = [](double x) { return 1.0 / (1.0 + x * x); };
  f.integral_halfline = 0.5 * kPi;
  f.integral_fullline = kPi;
  f.value_at_zero = 1.0;
  f.cosine_transform_closed_form = [](double x) { return 0.5 * kPi * std::exp(-std::abs(x)); };
  f.smoothness = 16;
  f.sup_norm = 1.0;
  f.radius_for = [](double eps) {
    eps = clamp_eps(eps);
    return eps >= 1.0 ? 0.0 : std::sqrt(1.0 / eps - 1.0);
  };
  return f;
}

TestFunction bump(double radius) {
  if (!(radius > 0.0)) throw DomainError("bump: radius must be positive");
  TestFunction f;
  f.id = "bump";
  f.profile = [radius](double x) {
    const double t = x / radius;
    if (t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  };
  const Quadrature q = composite_gauss_legendre(64, 24, 0.0, radius);
  f.integral_halfline = q.integrate(f.profile);
  f.integral_fullline = 2.0 * f.integral_halfline;
  f.value_at_zero = 1.0;
  f.smoothness = 8;
  f.sup_norm = 1.0;
  f.radius_for = [radius](double eps) { return eps >= 1.0 ? 0.0 : radius; };
  return f;
}

TestFunction exponential() {
  TestFunction f;
  f.id = "exponential";
  f.profile = [](double x) { return std::exp(-x); };
  f.integral_halfline = 1.0;
  f.integral_fullline = 2.0;
  f.value_at_zero = 1.0;
  f.cosine_transform_closed_form = [](double x) { return 1.0 / (1.0 + x * x); };
  f.smoothness = 0;
  f.sup_norm = 1.0;
  f.radius_for = [](double eps) { return std::max(0.0, -std::log(clamp_eps(eps))); };
  return f;
}

TestFunction zero_function() {
  TestFunction f;
  f.id = "zero";
  f.profile = [](double) { return 0.0; };
  f.cosine_transform_closed_form = [](double) { return 0.0; };
  f.smoothness = 1 << 20;
  f.sup_norm = 0.0;
  f.radius_for = [](double) { return 0.0; };
  return f;
}

std::vector<TestFunction> catalog() { return {gaussian(), cauchy(), bump(), zero_function()}; }

TestFunction find_test_function(const std::string& id) {
  if (id == "gaussian") return gaussian();
  if (id == "cauchy") return cauchy();
  if (id == "bump") return bump();
  if (id == "zero") return zero_function();
  if (id == "exponential") return exponential();
  throw DomainError("unknown test function id: " + id);
}

std::complex<double> Symbol::operator()(double x) const { return expm1_i(k * f.eval(x)); }

EvenFunction Symbol::as_even() const {
  EvenFunction g;
  g.label = "sigma[" + f.id + "]";
  g.profile = [p = f.profile, k = k](double x) { return expm1_i(k * p(x)); };
  const double kabs = std::abs(k);
  g.radius_for = [r = f.radius_for, kabs](double eps) {
    return kabs == 0.0 ? 0.0 : r(clamp_eps(eps) / kabs);
  };
  // |e^{i t} - 1| = 2|sin(t/2)| <= min(|t|, 2)
  g.sup_abs = std::min(kabs * f.sup_norm, 2.0);
  g.real = (k == 0.0);
  g.k = k;
  return g;
}

Symbol make_symbol(const TestFunction& f, double k) { return Symbol{f, k}; }

EvenFunction power(const EvenFunction& g, int n) {
  if (n < 1) throw DomainError("power: exponent must be >= 1");
  if (n == 1) return g;
  EvenFunction out;
  out.label = g.label + "^" + std::to_string(n);
  out.profile = [p = g.profile, n](double x) {
    const std::complex<double> v = p(x);
    std::complex<double> acc = v;
    for (int i = 1; i < n; ++i) acc *= v;
    return acc;
  };
  out.radius_for = [r = g.radius_for, n](double eps) {
    return r(std::pow(clamp_eps(eps), 1.0 / n));
  };
  out.sup_abs = std::pow(g.sup_abs, n);
  out.real = g.real;
  out.k = g.k;
  return out;
}

EvenFunction symbol_power(const Symbol& sigma, int n) { return power(sigma.as_even(), n); }

EvenFunction product(const EvenFunction& a, const EvenFunction& b) {
  EvenFunction out;
  out.label = a.label + "*" + b.label;
  out.profile = [pa = a.profile, pb = b.profile](double x) { return pa(x) * pb(x); };
  const double sa = a.sup_abs;
  const double sb = b.sup_abs;
  out.radius_for = [ra = a.radius_for, rb = b.radius_for, sa, sb](double eps) {
    if (sa == 0.0 || sb == 0.0) return 0.0;
    return std::min(ra(clamp_eps(eps / sb)), rb(clamp_eps(eps / sa)));
  };
  out.sup_abs = sa * sb;
  out.real = a.real && b.real;
  return out;
}

}  // namespace rmstat
