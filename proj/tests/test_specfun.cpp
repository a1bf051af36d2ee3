#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "rmstat/error.hpp"
#include "rmstat/specfun.hpp"

using namespace rmstat;
using std::numbers::pi;

TEST_SUITE("specfun") {

TEST_CASE("gauss_legendre basics") {
  const Quadrature mid = gauss_legendre(1, 0.0, 2.0);
  REQUIRE(mid.size() == 1);
  CHECK(mid.nodes[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  const Quadrature two = gauss_legendre(2, 0.0, 1.0);
  CHECK(std::abs(two.integrate([](double x) { return x * x; }) - 1.0 / 3.0) < 1e-15);

  const Quadrature q20 = gauss_legendre(20, -1.0, 1.0);
  double sum = 0.0;
  for (double w : q20.weights) sum += w;
  CHECK(std::abs(sum - 2.0) < 1e-14);

  CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(gauss_legendre(4, 2.0, 1.0), DomainError);
}

TEST_CASE("quadrature invariants and monomial exactness") {
  for (int n : {1, 3, 8, 20, 64}) {
    const double a = -0.7, b = 2.3;
    const Quadrature q = gauss_legendre(n, a, b);
    REQUIRE(q.nodes.size() == q.weights.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      CHECK(q.nodes[i] > a);
      CHECK(q.nodes[i] < b);
      CHECK(q.weights[i] > 0.0);
      if (i > 0) CHECK(q.nodes[i] > q.nodes[i - 1]);
    }
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double exact = (std::pow(b, d + 1) - std::pow(a, d + 1)) / (d + 1);
      const double got = q.integrate([d](double x) { return std::pow(x, d); });
      CHECK(std::abs(got - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
    }
  }
  const Quadrature c = composite_gauss_legendre(7, 20, 0.0, 3.5);
  double sum = 0.0;
  for (double w : c.weights) sum += w;
  CHECK(std::abs(sum - 3.5) < 1e-12 * 3.5);
}

TEST_CASE("bessel_j closed forms and errors") {
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(std::abs(bessel_j(0.5, pi / 2) - 2.0 / pi) < 1e-12);
  CHECK_THROWS_AS(bessel_j(0.0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel_j(9.0, 1.0), DomainError);
}

TEST_CASE("bessel_j against an independent implementation") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0, 2.5, 6.0}) {
    for (double x = 0.05; x <= 10.0; x += 0.37) {
      CHECK(std::abs(bessel_j(nu, x) - oracle::bessel_j(nu, x)) <= 1e-12);
    }
    // beyond 10 the relative bound is measured against the envelope sqrt(2/(pi x))
    for (double x = 10.5; x <= 1e4; x *= 1.31) {
      const double envelope = std::sqrt(2.0 / (pi * x));
      CHECK(std::abs(bessel_j(nu, x) - oracle::bessel_j(nu, x)) <= 1e-10 * envelope);
    }
  }
  std::vector<double> xs{0.0, 0.3, 7.0, 42.0, 900.0}, out(xs.size());
  bessel_j(1.5, xs, out);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(out[i] == bessel_j(1.5, xs[i]));
}

TEST_CASE("bessel recurrence residual") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
      const double j = bessel_j(nu, x);
      const double r = bessel_j(nu - 1.0, x) + bessel_j(nu + 1.0, x) - 2.0 * nu / x * j;
      CHECK(std::abs(r) <= 1e-10 * std::max(1.0, std::abs(j)));
    }
  }
}

TEST_CASE("integral of J_1 J_0 tends to one half") {
  // int_0^T J_1 J_0 = (1 - J_0(T)^2) / 2; average the oscillating remainder over
  // a window around T = 1e4 by direct quadrature of the library functions.
  const double T = 1e4;
  const Quadrature q = composite_gauss_legendre(4000, 16, 0.0, T);
  const double head = q.integrate([](double x) { return bessel_j(1.0, x) * bessel_j(0.0, x); });
  const Quadrature win = composite_gauss_legendre(64, 16, T, T + 2.0 * pi * 8);
  const double window = win.integrate([&](double s) {
    const Quadrature part = composite_gauss_legendre(1, 16, T, s);
    return part.integrate([](double x) { return bessel_j(1.0, x) * bessel_j(0.0, x); });
  });
  const double cesaro = head + window / (2.0 * pi * 8);
  CHECK(std::abs(cesaro - 0.5) < 1e-4);
}

TEST_CASE("log_gamma") {
  CHECK(std::abs(log_gamma(1.0)) < 1e-15);
  CHECK(std::abs(log_gamma(0.5) - std::log(std::sqrt(pi))) < 1e-13);
  for (double z : {0.3, 1.7, 4.2}) {
    const double dup = log_gamma(2 * z) -
                       (log_gamma(z) + log_gamma(z + 0.5) + (2 * z - 1) * std::log(2.0) - 0.5 * std::log(pi));
    CHECK(std::abs(dup) < 1e-12);
  }
  for (double z : {1e-3, 0.1, 0.77, 2.5, 13.0, 171.3, 1e4}) {
    const double ref = oracle::lgamma(z);
    CHECK(std::abs(log_gamma(z) - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.0), DomainError);
}

TEST_CASE("complex gamma against real values and reflection") {
  for (double x : {0.25, 1.5, 3.7}) {
    CHECK(std::abs(log_gamma(std::complex<double>(x, 0.0)) - std::complex<double>(oracle::lgamma(x), 0.0)) < 1e-13);
  }
  const std::complex<double> z(0.3, 1.2);
  // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
  const std::complex<double> lhs = gamma(z) * gamma(1.0 - z);
  const std::complex<double> rhs = pi / std::sin(pi * z);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
}

TEST_CASE("hermite functions") {
  CHECK(std::abs(hermite_fn(0, 0.0) - std::pow(pi, -0.25)) < 1e-15);
  CHECK(std::abs(hermite_fn(1, 0.0)) < 1e-15);
  const Quadrature q = gauss_legendre(200, -20.0, 20.0);
  std::vector<std::vector<double>> vals(q.size(), std::vector<double>(21));
  for (std::size_t m = 0; m < q.size(); ++m) hermite_fns(21, q.nodes[m], vals[m]);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < q.size(); ++m) s += q.weights[m] * vals[m][i] * vals[m][j];
      CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(hermite_fn(kMaxOrthonormalIndex + 1, 0.0), DomainError);
}

TEST_CASE("hermite recurrence matches direct evaluation") {
  // phi_i = H_i(x) e^{-x^2/2} / sqrt(2^i i! sqrt(pi)); physicists' H_i from Boost
  for (int i = 0; i <= 50; i += 7) {
    for (double x : {-3.1, -0.4, 0.0, 1.3, 5.5}) {
      const double log_norm = 0.5 * (i * std::log(2.0) + oracle::lgamma(i + 1.0) + 0.5 * std::log(pi));
      const double direct = boost::math::hermite(i, x) * std::exp(-0.5 * x * x - log_norm);
      CHECK(std::abs(hermite_fn(i, x) - direct) < 1e-10);
    }
  }
}

TEST_CASE("laguerre functions") {
  CHECK(std::abs(laguerre_fn(0, 0.0, 1e-14) - 1.0) < 1e-12);
  CHECK(std::abs(laguerre_fn(0, 2.0, 1.0) - std::exp(-0.5) / std::sqrt(2.0)) < 1e-14);
  for (double nu : {-0.5, 0.0, 1.0}) {
    // x = t^2 moves the x^{nu} endpoint behaviour into a smooth integrand
    const Quadrature q = composite_gauss_legendre(60, 20, 0.0, std::sqrt(200.0));
    std::vector<std::vector<double>> vals(q.size(), std::vector<double>(21));
    for (std::size_t m = 0; m < q.size(); ++m) laguerre_fns(21, nu, q.nodes[m] * q.nodes[m], vals[m]);
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t m = 0; m < q.size(); ++m) s += q.weights[m] * 2.0 * q.nodes[m] * vals[m][i] * vals[m][j];
        CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(laguerre_fn(0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(laguerre_fn(0, -1.0, 1.0), DomainError);
}

TEST_CASE("laguerre recurrence matches direct evaluation") {
  // integer orders from Boost's associated Laguerre polynomials; order -1/2 via
  // L_i^{-1/2}(t^2) = (-1)^i H_{2i}(t) / (4^i i!)
  auto poly = [](int i, double nu, double x) {
    if (nu == -0.5) {
      const double t = std::sqrt(x);
      const double log_scale = i * std::log(4.0) + oracle::lgamma(i + 1.0);
      return (i % 2 ? -1.0 : 1.0) * boost::math::hermite(2 * i, t) * std::exp(-log_scale);
    }
    return boost::math::laguerre(i, static_cast<unsigned>(nu), x);
  };
  for (double nu : {-0.5, 0.0, 1.0}) {
    for (int i = 0; i <= 50; i += 7) {
      for (double x : {0.05, 1.0, 7.5, 40.0}) {
        const double log_norm = 0.5 * (oracle::lgamma(i + nu + 1.0) - oracle::lgamma(i + 1.0));
        const double direct = poly(i, nu, x) * std::exp(0.5 * nu * std::log(x) - 0.5 * x - log_norm);
        CHECK(std::abs(laguerre_fn(i, nu, x) - direct) < 1e-10);
      }
    }
  }
}

}  // TEST_SUITE
