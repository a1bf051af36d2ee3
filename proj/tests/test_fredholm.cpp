#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmstat/error.hpp"
#include "rmstat/fredholm.hpp"

using namespace rmstat;
using std::numbers::pi;

namespace {

DiscretizedOperator constant_kernel(double c, int n = 20) {
  DiscretizedOperator op;
  op.grid = operator_grid(0.0, 1.0, n);
  op.matrix = Eigen::MatrixXcd::Constant(op.grid.size(), op.grid.size(), c);
  return op;
}

DiscretizedOperator rank_one(int n = 40) {
  DiscretizedOperator op;
  op.grid = operator_grid(0.0, 2.0, n);
  const auto m = static_cast<Eigen::Index>(op.grid.size());
  Eigen::VectorXcd u(m);
  for (Eigen::Index i = 0; i < m; ++i) u(i) = std::exp(-op.grid.nodes[i]) * std::complex<double>(1.0, 0.3);
  op.matrix = u * u.transpose();
  return op;
}

}  // namespace

TEST_SUITE("fredholm") {

TEST_CASE("traces") {
  CHECK(op_trace(constant_kernel(0.0)) == std::complex<double>(0.0, 0.0));
  const auto r = rank_one();
  CHECK(std::abs(op_trace_power(r, 1) - op_trace(r)) < 1e-15);
  CHECK(std::abs(op_trace_power(r, 2) - op_trace(r) * op_trace(r)) < 1e-10);
  CHECK(std::abs(op_trace_power(r, 4) - std::pow(op_trace(r), 4)) < 1e-10);
  CHECK_THROWS_AS(op_trace_power(r, 7), DomainError);
}

TEST_CASE("Bessel trace at order zero") {
  const auto b = build_bessel_operator(gaussian().as_even(), 30.0, 0.0, 200);
  const double predicted = 30.0 / pi * std::sqrt(pi) / 2;
  CHECK(std::abs(predicted - 8.4628) < 1e-4);
  CHECK(std::abs(op_trace(b) - predicted) < 0.05);
}

TEST_CASE("variance assembly for cauchy at order -1/2") {
  const TestFunction f = cauchy();
  const auto b = build_bessel_operator(f.as_even(), 40.0, -0.5, 200);
  const auto b2 = build_bessel_operator(f.squared(), 40.0, -0.5, 200);
  const std::complex<double> var = op_trace(b2) - op_trace_power(b, 2);
  CHECK(std::abs(var - 0.0625) < 0.01);
}

TEST_CASE("determinants") {
  const DetResult z = fredholm_det(constant_kernel(0.0));
  CHECK(z.value == std::complex<double>(1.0, 0.0));
  CHECK(z.log_value == std::complex<double>(0.0, 0.0));

  // det(I + |u><u|) with u = 1 on (0, 1) is 1 + <u, u> = 2
  const DetResult two = fredholm_det(constant_kernel(1.0));
  CHECK(std::abs(two.value - 2.0) < 1e-13);
  CHECK(std::abs(std::exp(two.log_value) - two.value) < 1e-10 * std::abs(two.value));
  CHECK(two.grid_size == 20);

  CHECK_THROWS_AS(fredholm_det(constant_kernel(-1.0)), SingularMatrixError);

  const auto r = rank_one();
  const DetResult dr = fredholm_det(r);
  CHECK(std::abs(dr.value - (1.0 + op_trace(r))) < 1e-12);
  CHECK(std::abs(log_det_by_eigenvalues(r) - dr.log_value) < 1e-12);
}

TEST_CASE("conjugate symmetry of the determinant") {
  const TestFunction f = gaussian();
  const DetResult p = fredholm_det(build_bessel_operator(make_symbol(f, 0.3).as_even(), 20.0, 0.0, 120));
  const DetResult m = fredholm_det(build_bessel_operator(make_symbol(f, -0.3).as_even(), 20.0, 0.0, 120));
  CHECK(std::abs(p.value - std::conj(m.value)) < 1e-13);
  CHECK(std::abs(std::exp(p.log_value) - p.value) < 1e-10 * std::abs(p.value));
}

TEST_CASE("characteristic function basics") {
  const TestFunction f = gaussian();
  CfNumerics num;
  num.n = 120;
  for (Regime r : {Regime::sine, Regime::bessel, Regime::finite_n_hermite, Regime::finite_n_laguerre}) {
    const double scale = (r == Regime::sine || r == Regime::bessel) ? 10.0 : 20.0;
    const DetResult one = characteristic_function(r, f, 0.0, scale, 0.0, num);
    CHECK(std::abs(one.value - 1.0) < 1e-12);
    for (double k : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      CHECK(std::abs(characteristic_function(r, f, k, scale, 0.0, num).value) <= 1.0 + 1e-8);
    }
  }
  CHECK(regime_from_string(to_string(Regime::finite_n_laguerre)) == Regime::finite_n_laguerre);
  CHECK_THROWS_AS(regime_from_string("airy"), DomainError);
}

TEST_CASE("tracked branch agrees with the principal one modulo 2 pi i") {
  const TestFunction f = gaussian();
  // a large alpha k drives the phase of the determinant past pi
  const DetResult principal = characteristic_function(Regime::sine, f, 0.5, 40.0, 0.0);
  const DetResult tracked = characteristic_function_tracked(Regime::sine, f, 0.5, 40.0, 0.0);
  CHECK(tracked.branch_tracked);
  CHECK(!principal.branch_tracked);
  CHECK(std::abs(tracked.value - principal.value) < 1e-12 * std::abs(principal.value));
  const double turns = (tracked.log_value - principal.log_value).imag() / (2 * pi);
  CHECK(std::abs(turns - std::round(turns)) < 1e-9);
  CHECK(std::abs(tracked.log_value.real() - principal.log_value.real()) < 1e-12);
  // the tracked phase follows k * mean = 0.5 * (40/pi) sqrt(pi) ~ 11.3
  CHECK(std::abs(tracked.log_value.imag() - 0.5 * 40.0 / pi * std::sqrt(pi)) < 0.1);
}

TEST_CASE("cumulants from finite differences") {
  const TestFunction f = gaussian();
  const double h = 1e-3;
  CfNumerics num;
  for (Regime r : {Regime::bessel, Regime::sine}) {
    const double alpha = 20.0;
    auto logcf = [&](double k) { return characteristic_function(r, f, k, alpha, 0.0, num).log_value; };
    const std::complex<double> lp = logcf(h), lm = logcf(-h), l0 = logcf(0.0);
    const DiscretizedOperator a = build_regime_operator(r, f.as_even(), alpha, 0.0, num);
    const DiscretizedOperator a2 = build_regime_operator(r, f.squared(), alpha, 0.0, num);
    const std::complex<double> tr = op_trace(a);
    const std::complex<double> var = op_trace(a2) - op_trace_power(a, 2);

    const std::complex<double> first = (lp - lm) / (2 * h);
    CHECK(std::abs(first - std::complex<double>(0.0, 1.0) * tr) < 1e-4 * (1 + std::abs(tr)));
    const std::complex<double> second = (lp - 2.0 * l0 + lm) / (h * h);
    CHECK(std::abs(second + var) < 1e-3 * std::abs(var));
  }
}

}  // TEST_SUITE
