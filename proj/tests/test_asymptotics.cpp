#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rmstat/asymptotics.hpp"
#include "rmstat/error.hpp"

using namespace rmstat;
using std::numbers::pi;

namespace {

const std::complex<double> I(0.0, 1.0);

// int_R |x|^{p-1} |x+y|^{q-1} dx for y > 0. Each piece is written in the distance d
// from its singular point, so the quadrature never lands on the singularity.
double singular_pair_oracle(double p, double q, double y) {
  auto piece = [](auto&& h, double length) {
    return std::isinf(length) ? oracle::integrate_singular_to_inf(h, 0.0) : oracle::integrate_singular(h, 0.0, length);
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double right = piece([&](double d) { return std::pow(d, p - 1) * std::pow(d + y, q - 1); }, inf);
  const double left = piece([&](double d) { return std::pow(y + d, p - 1) * std::pow(d, q - 1); }, inf);
  const double near_zero = piece([&](double d) { return std::pow(d, p - 1) * std::pow(y - d, q - 1); }, y / 2);
  const double near_minus_y = piece([&](double d) { return std::pow(y - d, p - 1) * std::pow(d, q - 1); }, y / 2);
  return right + left + near_zero + near_minus_y;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("sine prediction") {
  const GaussianPrediction c = sine_prediction(cauchy(), 10.0);
  CHECK(std::abs(c.variance - 0.125) < 1e-8);
  const GaussianPrediction g = sine_prediction(gaussian(), 10.0);
  CHECK(std::abs(g.variance - 1.0 / (2 * pi)) < 1e-8);
  CHECK(std::abs(g.mean - 10.0 / pi * std::sqrt(pi)) < 1e-9);
  CHECK(std::abs(g.literal_mean - 10.0 / (2 * pi) * std::sqrt(pi)) < 1e-12);
  CHECK(g.cf(0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(sine_variance(gaussian()) - g.variance) < 1e-15);
}

TEST_CASE("Bessel mean") {
  CHECK(std::abs(bessel_mean(gaussian(), pi, 0.0) - std::sqrt(pi) / 2) < 1e-15);
  CHECK(bessel_mean(zero_function(), 17.0, 2.0) == 0.0);
  CHECK(std::abs(bessel_mean(cauchy(), 2.0, 1.0) - 0.5) < 1e-15);
}

TEST_CASE("Bessel variance by both routes") {
  CHECK(std::abs(bessel_variance_cosine(cauchy()) - 0.0625) < 1e-9);
  CHECK(std::abs(bessel_variance_cosine(gaussian()) - 1.0 / (4 * pi)) < 1e-9);
  CHECK(bessel_variance_cosine(zero_function()) == 0.0);
  CHECK(std::abs(bessel_variance_mellin(cauchy()) - 0.0625) < 1e-5);
  CHECK(std::abs(bessel_variance_mellin(gaussian()) - 1.0 / (4 * pi)) < 1e-5);
  CHECK(bessel_variance_mellin(zero_function()) == 0.0);
  const TestFunction b = bump(2.0);
  CHECK(std::abs(bessel_variance_mellin(b) - bessel_variance_cosine(b)) < 1e-5);
}

TEST_CASE("Gaussian limit prediction") {
  const TestFunction f = gaussian();
  const GaussianPrediction p = bessel_cf_prediction(f, pi, 0.0);
  const std::complex<double> expected = std::exp(0.2 * I * (std::sqrt(pi) / 2) - 0.02 / (4 * pi));
  CHECK(std::abs(p.cf(0.2) - expected) < 1e-12);
  CHECK(std::abs(std::abs(p.cf(0.2)) - std::exp(-0.0015915)) < 1e-7);
  CHECK(p.cf(0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(p.cf(-0.3) - std::conj(p.cf(0.3))) < 1e-15);

  // composed exactly from the two closed forms
  for (double nu : {-0.5, 0.0, 1.0, 3.0}) {
    const GaussianPrediction q = bessel_cf_prediction(cauchy(), 12.0, nu);
    for (double k : {0.1, 0.4}) {
      const std::complex<double> direct =
          std::exp(I * k * bessel_mean(cauchy(), 12.0, nu) - k * k * bessel_variance_cosine(cauchy()) / 2.0);
      CHECK(std::abs(q.cf(k) - direct) < 1e-15);
    }
  }

  // order -1/2: the f(0) term is +ik f(0)/4, term by term with the half-line form
  const double alpha = 25.0, k = 0.2;
  const GaussianPrediction h = bessel_cf_prediction(f, alpha, -0.5);
  const std::complex<double> rest = I * k * (alpha / pi) * f.integral_halfline -
                                    k * k / (2 * pi * pi) * cosine_pair_integral(f.as_even(), f.as_even()).real();
  CHECK(std::abs(h.log_cf(k) - rest - I * k * f.value_at_zero / 4.0) < 1e-12);

  CHECK(required_smoothness(0.0) == 2);
  CHECK(required_smoothness(0.5) == 3);
  CHECK_THROWS_AS(bessel_cf_prediction(exponential(), 10.0, 0.0), HypothesisError);
}

TEST_CASE("Szego constant") {
  CHECK(szego_G(gaussian(), 0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(szego_G(gaussian(), 1.0) - std::exp(I * 0.2820947917738781)) < 1e-12);
  for (double k : {0.3, -1.7, 2.9}) CHECK(std::abs(std::abs(szego_G(cauchy(), k)) - 1.0) < 1e-15);
  CHECK_THROWS_AS(szego_G(gaussian(), 4.0), DomainError);
}

TEST_CASE("trace-power correction") {
  const TestFunction c = cauchy();
  CHECK(std::abs(thm12_correction(c, 0.0, 2)) == 0.0);
  // sigma ~ ik f makes the n = 2 term +(k^2/pi^2) int x C(f)^2 at leading order; the
  // first correction is imaginary and cubic in k, so the real part scales as k^2
  const std::complex<double> a = thm12_correction(c, 0.1, 2);
  const std::complex<double> b = thm12_correction(c, 0.05, 2);
  CHECK(std::abs(a.real() - 6.25e-4) < 0.02 * 6.25e-4);
  CHECK(std::abs(a.real() / 0.01 - b.real() / 0.0025) < 0.02 * std::abs(b.real() / 0.0025));
  CHECK(std::abs(b.real() / 0.0025 - bessel_variance_cosine(c)) < 0.02 * bessel_variance_cosine(c));
  CHECK(std::abs(a.imag() / b.imag() - 8.0) < 0.1 * 8.0);
  for (int n : {2, 3}) {
    CHECK(std::abs(thm12_correction(gaussian(), -0.2, n) - std::conj(thm12_correction(gaussian(), 0.2, n))) < 1e-14);
  }
  CHECK_THROWS_AS(thm12_correction(c, 0.1, 1), DomainError);
}

TEST_CASE("t weight") {
  const std::complex<double> p(0.2, 0.1), q(0.35, -0.05);
  CHECK(std::abs(t_weight(p, q) - t_weight(q, p)) < 1e-15 * std::abs(t_weight(p, q)));

  const double o14 = singular_pair_oracle(0.25, 0.25, 1.0);
  CHECK(std::abs(t_weight(0.25, 0.25).real() - o14) < 1e-6);
  const double o13 = singular_pair_oracle(1.0 / 3, 1.0 / 3, 2.0);
  CHECK(std::abs(std::pow(2.0, 2.0 / 3 - 1) * t_weight(1.0 / 3, 1.0 / 3).real() - o13) < 1e-6);
  CHECK(std::abs(t_weight_integral(0.25, 0.25) - o14) < 1e-6);
  CHECK(std::abs(t_weight_integral(1.0 / 3, 1.0 / 3) - t_weight(1.0 / 3, 1.0 / 3).real()) < 1e-6);

  CHECK_THROWS_AS(t_weight(0.6, 0.6), DomainError);
  CHECK_THROWS_AS(t_weight(-0.1, 0.3), DomainError);
  CHECK_THROWS_AS(t_weight_integral(0.5, 0.5), DomainError);
}

TEST_CASE("Kac identity") {
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  auto [l0, r0] = kac_identity_check(zeros);
  CHECK(l0 == 0.0);
  CHECK(r0 == 0.0);
  const std::vector<double> one{1.0};
  auto [l1, r1] = kac_identity_check(one);
  CHECK(l1 == 1.0);
  CHECK(r1 == 1.0);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> len(2, 6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(len(rng));
    for (double& v : a) v = u(rng);
    auto [lhs, rhs] = kac_identity_check(a);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  CHECK_THROWS_AS(kac_identity_check(std::vector<double>(8, 0.1)), DomainError);
}

}  // TEST_SUITE
