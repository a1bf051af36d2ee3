#include "rmstat/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "rmstat/error.hpp"

namespace rmstat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinRcond = 1e-15;
constexpr int kMaxBisections = 8;

Eigen::MatrixXcd symmetrized(const DiscretizedOperator& op) {
  const auto n = op.size();
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = std::sqrt(op.grid.weights[i]);
  return root.asDiagonal() * op.matrix * root.asDiagonal();
}

std::complex<double> unwrap_towards(std::complex<double> principal, std::complex<double> ref) {
  const double turns = std::round((ref.imag() - principal.imag()) / (2.0 * kPi));
  return principal + std::complex<double>(0.0, 2.0 * kPi * turns);
}

double mean_estimate(Regime regime, const TestFunction& f, double scale, double nu) {
  double half = 0.0;
  if (f.sup_norm > 0.0) {
    const Quadrature q = composite_gauss_legendre(64, 20, 0.0, f.radius_for(1e-10));
    half = q.integrate([&](double x) { return std::abs(f.profile(x)); });
  }
  switch (regime) {
    case Regime::sine: return 2.0 * scale * half / kPi;
    case Regime::bessel: return scale * half / kPi + 0.5 * std::abs(nu) * f.sup_norm;
    case Regime::finite_n_hermite: return 2.0 * half / kPi;
    case Regime::finite_n_laguerre: return half / kPi + 0.5 * std::abs(nu) * f.sup_norm;
  }
  return 0.0;
}

}  // namespace

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::sine: return "sine";
    case Regime::bessel: return "bessel";
    case Regime::finite_n_hermite: return "finiteN_hermite";
    case Regime::finite_n_laguerre: return "finiteN_laguerre";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& name) {
  if (name == "sine") return Regime::sine;
  if (name == "bessel") return Regime::bessel;
  if (name == "finiteN_hermite" || name == "hermite") return Regime::finite_n_hermite;
  if (name == "finiteN_laguerre" || name == "laguerre") return Regime::finite_n_laguerre;
  throw DomainError("unknown regime: " + name);
}

std::complex<double> op_trace(const DiscretizedOperator& op) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < op.size(); ++i) acc += op.grid.weights[i] * op.matrix(i, i);
  return acc + op.tail.power(1);
}

std::complex<double> op_trace_power(const DiscretizedOperator& op, int n) {
  if (n < 1 || n > 6) throw DomainError("op_trace_power: n must be in [1, 6]");
  if (n == 1) return op_trace(op);
  const Eigen::MatrixXcd s = symmetrized(op);
  Eigen::MatrixXcd p = s;
  for (int i = 2; i < n; ++i) p = p * s;
  // tr(P S) without forming the last product
  const std::complex<double> tr = (p.array() * s.transpose().array()).sum();
  return tr + op.tail.power(n);
}

DetResult fredholm_det(const DiscretizedOperator& op) {
  DetResult r;
  r.grid_size = static_cast<int>(op.size());
  const auto n = op.size();
  if (n == 0) return r;
  Eigen::MatrixXcd a = symmetrized(op);
  a.diagonal().array() += 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double rcond = lu.rcond();
  const auto& u = lu.matrixLU();
  std::complex<double> log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (u(i, i) == 0.0) throw SingularMatrixError("fredholm_det: exact zero pivot");
    log_det += std::log(u(i, i));
  }
  if (!(rcond > kMinRcond)) {
    throw SingularMatrixError("fredholm_det: I + K is numerically singular (rcond " +
                              std::to_string(rcond) + ")");
  }
  if (lu.permutationP().determinant() < 0) log_det += std::complex<double>(0.0, kPi);
  log_det += op.tail.log_det;
  // principal branch of the total
  log_det = unwrap_towards(log_det, {0.0, 0.0});
  r.log_value = log_det;
  r.value = std::exp(log_det);
  r.condition_estimate = 1.0 / rcond;
  return r;
}

std::complex<double> log_det_by_eigenvalues(const DiscretizedOperator& op) {
  if (op.size() == 0) return 0.0;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(symmetrized(op), false);
  if (es.info() != Eigen::Success) throw ConvergenceError("log_det_by_eigenvalues: no convergence");
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < op.size(); ++i) acc += std::log(1.0 + es.eigenvalues()(i));
  return acc + op.tail.log_det;
}

DiscretizedOperator build_regime_operator(Regime regime, const EvenFunction& sigma, double scale,
                                          double nu, const CfNumerics& numerics) {
  switch (regime) {
    case Regime::sine:
      return build_wiener_hopf(sigma, scale, numerics.n, numerics.transform);
    case Regime::bessel:
      return build_bessel_operator(sigma, scale, nu, numerics.n, numerics.transform);
    case Regime::finite_n_hermite:
      return build_finite_n_operator(Ensemble::hermite, sigma, static_cast<int>(std::lround(scale)),
                                     nu, numerics.n);
    case Regime::finite_n_laguerre:
      return build_finite_n_operator(Ensemble::laguerre, sigma,
                                     static_cast<int>(std::lround(scale)), nu, numerics.n);
  }
  throw DomainError("build_regime_operator: unknown regime");
}

DetResult characteristic_function(Regime regime, const TestFunction& f, double k, double scale,
                                  double nu, const CfNumerics& numerics) {
  if (k == 0.0) {
    DetResult r;
    r.branch_tracked = true;
    return r;
  }
  const EvenFunction sigma = make_symbol(f, k).as_even();
  return fredholm_det(build_regime_operator(regime, sigma, scale, nu, numerics));
}

DetResult characteristic_function_tracked(Regime regime, const TestFunction& f, double k,
                                          double scale, double nu, const CfNumerics& numerics,
                                          int steps) {
  if (k == 0.0) return characteristic_function(regime, f, k, scale, nu, numerics);
  if (steps <= 0) {
    const double phase = std::abs(k) * mean_estimate(regime, f, scale, nu);
    steps = 1 + static_cast<int>(std::ceil(phase / (kPi / 4.0)));
  }
  std::complex<double> prev_log = 0.0;
  double prev_k = 0.0;
  DetResult last;
  // walk k_j = j k / steps, bisecting any step whose phase change reaches pi/2
  auto advance = [&](auto&& self, double target, int depth) -> void {
    DetResult r = characteristic_function(regime, f, target, scale, nu, numerics);
    const std::complex<double> unwrapped = unwrap_towards(r.log_value, prev_log);
    if (std::abs(unwrapped.imag() - prev_log.imag()) >= 0.5 * kPi) {
      if (depth >= kMaxBisections) {
        throw ConvergenceError("characteristic_function_tracked: phase jumps by more than pi/2 "
                               "between k = " + std::to_string(prev_k) + " and " +
                               std::to_string(target));
      }
      self(self, 0.5 * (prev_k + target), depth + 1);
      self(self, target, depth + 1);
      return;
    }
    r.log_value = unwrapped;
    prev_log = unwrapped;
    prev_k = target;
    last = r;
  };
  for (int j = 1; j <= steps; ++j) advance(advance, k * j / steps, 0);
  last.branch_tracked = true;
  return last;
}

}  // namespace rmstat
