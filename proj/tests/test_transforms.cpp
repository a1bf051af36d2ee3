#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rmstat/asymptotics.hpp"
#include "rmstat/error.hpp"
#include "rmstat/transforms.hpp"

using namespace rmstat;
using std::numbers::pi;

TEST_SUITE("transforms") {

TEST_CASE("cosine transform closed forms") {
  CHECK(std::abs(cosine_transform(cauchy(), 1.0) - (pi / 2) * std::exp(-1.0)) < 1e-9);
  CHECK(std::abs(cosine_transform(gaussian(), 0.0) - std::sqrt(pi) / 2) < 1e-9);
  const TestFunction b = bump(2.0);
  CHECK(std::abs(cosine_transform(b, 0.0) - b.integral_halfline) < 1e-9);
  for (const TestFunction& f : {gaussian(), cauchy()}) {
    for (double x : {0.0, 0.3, 1.1, 2.7, 6.0, 15.0}) {
      CHECK(std::abs(cosine_transform(f, x) - (*f.cosine_transform_closed_form)(x)) < 1e-9);
    }
  }
}

TEST_CASE("bump transform against adaptive quadrature") {
  const TestFunction b = bump(2.0);
  for (double x : {0.5, 3.0, 11.0}) {
    CHECK(std::abs(cosine_transform(b, x) - oracle::cosine_transform(b.profile, x, 2.0)) < 1e-9);
  }
}

TEST_CASE("cosine transform is linear") {
  const TestFunction f = gaussian(), g = cauchy();
  EvenFunction mix = f.as_even();
  mix.label = "mix";
  mix.profile = [f, g](double x) { return std::complex<double>(2.0 * f.eval(x) - 0.5 * g.eval(x), 0.0); };
  mix.radius_for = [f, g](double eps) { return std::max(f.radius_for(eps / 4), g.radius_for(eps)); };
  mix.sup_abs = 2.5;
  for (double x : {0.0, 0.4, 2.0, 5.0}) {
    const std::complex<double> lhs = cosine_transform(mix, x);
    const double rhs = 2.0 * cosine_transform(f, x) - 0.5 * cosine_transform(g, x);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("resolution budget is enforced") {
  TransformConfig tiny;
  tiny.panel_count = 8;
  CHECK_THROWS_AS(cosine_transform(gaussian(), 100.0, tiny), ResolutionError);
  CHECK_THROWS_AS(fourier_transform(gaussian(), 100.0, tiny), ResolutionError);
  TransformConfig bad;
  bad.points_per_panel = 2;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("fourier transform convention") {
  CHECK(std::abs(fourier_transform(gaussian(), 0.0) - 1.0 / (2.0 * std::sqrt(pi))) < 1e-9);
  CHECK(std::abs(fourier_transform(cauchy(), 2.0) - 0.5 * std::exp(-2.0)) < 1e-9);
  const TestFunction g = gaussian();
  const std::complex<double> a = fourier_transform(g, 1.3), b = fourier_transform(g, -1.3);
  CHECK(std::abs(a - b) < 1e-14);
  CHECK(std::abs(a.imag()) < 1e-14);
  CHECK(std::abs(a.real() - cosine_transform(g, 1.3) / pi) < 1e-9);
}

TEST_CASE("mellin transform on the imaginary axis") {
  const TestFunction c = cauchy();
  // int_0^inf x^{i-1}/(1+x^2) dx = (pi/2)/sin(i pi/2) = -i (pi/2) csch(pi/2)
  const std::complex<double> closed(0.0, -(pi / 2) / std::sinh(pi / 2));
  const std::complex<double> brute = oracle::mellin(c.profile, std::complex<double>(0.0, 1.0));
  CHECK(std::abs(brute - closed) < 1e-9);
  CHECK(std::abs(mellin_line(c, 0.5) - closed) < 1e-7);

  const TestFunction g = gaussian();
  for (double y : {0.05, 0.3, 1.0, 2.5}) {
    const std::complex<double> s(0.0, 2.0 * y);
    CHECK(std::abs(mellin_line(g, y) - oracle::mellin(g.profile, s)) < 1e-7);
    CHECK(std::abs(mellin_line(c, y) - oracle::mellin(c.profile, s)) < 1e-7);
    CHECK(std::abs(mellin_line(g, -y) - std::conj(mellin_line(g, y))) < 1e-12);
  }
  // near y = 0, M ~ f(0)/(2iy), so y |M|^2 tanh(pi y) -> pi f(0)^2 / 4 rather than 0
  for (double y : {1e-3, 1e-4, 1e-5}) {
    const double v = y * std::norm(mellin_line(g, y)) * std::tanh(pi * y);
    CHECK(std::abs(v - pi / 4) < 10 * y);
  }
  CHECK_THROWS_AS(mellin_line(g, 0.0), DomainError);
}

TEST_CASE("cosine pair integrals") {
  const TestFunction c = cauchy(), g = gaussian();
  CHECK(std::abs(cosine_pair_integral(c.as_even(), c.as_even()) - pi * pi / 16) < 1e-7);
  CHECK(std::abs(cosine_pair_integral(g.as_even(), g.as_even()) - pi / 4) < 1e-7);
  CHECK(std::abs(cosine_pair_integral(g.as_even(), zero_function().as_even())) == 0.0);
}

TEST_CASE("Parseval-style consistency of the two transforms") {
  // Fourier route (full-line transform at +x and -x) against the cosine route
  for (const TestFunction& f : {gaussian(), cauchy(), bump(2.0)}) {
    const double fourier = sine_variance(f);
    const double cosine = 2.0 / (pi * pi) * cosine_pair_integral(f.as_even(), f.as_even()).real();
    CHECK(std::abs(fourier - cosine) < 1e-8);
  }
}

TEST_CASE("wynn epsilon and tail integral") {
  // partial sums of sum (-1)^k / (k+1) -> log 2
  std::vector<std::complex<double>> sums;
  double acc = 0.0;
  for (int k = 0; k < 15; ++k) {
    acc += (k % 2 ? -1.0 : 1.0) / (k + 1);
    sums.emplace_back(acc, 0.0);
  }
  CHECK(std::abs(wynn_epsilon(sums) - std::log(2.0)) < 1e-10);
  const std::complex<double> t =
      tail_integral([](double u) { return std::complex<double>(1.0 / (u * u), 0.0); }, 2.0);
  CHECK(std::abs(t - 0.5) < 1e-12);
}

}  // TEST_SUITE
