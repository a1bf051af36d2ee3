#pragma once

#include <complex>
#include <string>

#include "rmstat/operators.hpp"

namespace rmstat {

struct DetResult {
  std::complex<double> value = 1.0;
  std::complex<double> log_value = 0.0;
  double condition_estimate = 1.0;
  int grid_size = 0;
  bool branch_tracked = false;  // false: log_value is the principal sum of pivot logs
};

/// sum_i w_i K(x_i, x_i), plus the tail contribution when present.
std::complex<double> op_trace(const DiscretizedOperator& op);

/// tr K^n for 1 <= n <= 6 (quadrature-weighted products).
std::complex<double> op_trace_power(const DiscretizedOperator& op, int n);

/// det(I + W^{1/2} K W^{1/2}) by partial-pivot LU; throws SingularMatrixError.
DetResult fredholm_det(const DiscretizedOperator& op);

/// sum_i log(1 + lambda_i) over eigenvalues of the symmetrized matrix. A second
/// route to log det used to cross-check the LU path.
std::complex<double> log_det_by_eigenvalues(const DiscretizedOperator& op);

enum class Regime { sine, bessel, finite_n_hermite, finite_n_laguerre };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

struct CfNumerics {
  int n = 200;  // operator grid size
  TransformConfig transform{};
};

/// Operator with symbol sigma for a regime. `scale` is alpha for the limit
/// regimes and N (rounded) for the finite-N ones.
DiscretizedOperator build_regime_operator(Regime regime, const EvenFunction& sigma, double scale,
                                          double nu, const CfNumerics& numerics);

/// det(I + operator(e^{ikf} - 1)) with principal-branch log.
DetResult characteristic_function(Regime regime, const TestFunction& f, double k, double scale,
                                  double nu, const CfNumerics& numerics = {});

/// Same determinant with log continued from k = 0 in steps that keep the phase
/// change below pi/2; `steps` = 0 picks the count from a mean estimate.
DetResult characteristic_function_tracked(Regime regime, const TestFunction& f, double k,
                                          double scale, double nu,
                                          const CfNumerics& numerics = {}, int steps = 0);

}  // namespace rmstat
