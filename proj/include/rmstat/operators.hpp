#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "rmstat/specfun.hpp"
#include "rmstat/symbols.hpp"
#include "rmstat/transforms.hpp"

namespace rmstat {

enum class OperatorKind { sine_wh, bessel, finite_wh, hankel, finite_n_hermite, finite_n_laguerre, composed };
enum class Ensemble { hermite, laguerre };

std::string to_string(OperatorKind kind);
std::string to_string(Ensemble ensemble);

struct Provenance {
  OperatorKind kind = OperatorKind::composed;
  double alpha = 0.0;
  double nu = 0.0;
  int N = 0;
  double k = 0.0;
};

/// What a Bessel operator loses when its symbol is tapered to zero by chi.
///
/// At high frequency B_alpha(s) acts like multiplication by s, so the removed part
/// adds (alpha/pi) int [s^n - (s chi)^n] to tr B^n and
/// (alpha/pi) int [log(1+s) - log(1+s chi)] to log det. Empty unless the symbol
/// decays too slowly for the grid.
struct TailCorrection {
  std::vector<std::complex<double>> power_traces;  // index n, entry 0 unused
  std::complex<double> log_det = 0.0;
  double cutoff = 0.0;

  bool present() const { return !power_traces.empty(); }
  std::complex<double> power(int n) const;
};

/// Dense Nystrom data: raw kernel values K(x_i, x_j) on a quadrature grid.
struct DiscretizedOperator {
  Quadrature grid;
  Eigen::MatrixXcd matrix;
  Provenance provenance;
  TailCorrection tail;
  // Symmetric difference kernels only: int K(z, x_j) dz minus its quadrature value.
  // Rows and columns share it because K(x, y) = K(y, x).
  Eigen::VectorXcd mass_defect;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Composite Gauss-Legendre grid on (a, b) with at least n nodes (20-point panels).
Quadrature operator_grid(double a, double b, int n);

double sine_kernel(double x, double y);

/// Bessel kernel of order nu at x, y > 0.
double bessel_kernel(double nu, double x, double y);

/// sum_{i<N} phi_i(x) phi_i(y); Christoffel-Darboux form for N > 50 away from the diagonal.
double finite_n_kernel(Ensemble ensemble, int N, double nu, double x, double y);

/// Same kernel, always by direct summation.
double finite_n_kernel_summed(Ensemble ensemble, int N, double nu, double x, double y);

/// hermite: (1/sqrt(2N)) K_N(x/sqrt(2N), y/sqrt(2N)); laguerre: (1/4N) K_N(x/4N, y/4N).
double rescaled_finite_n_kernel(Ensemble ensemble, int N, double nu, double x, double y);

inline constexpr int kMaxFiniteN = 300;

/// A_alpha(sigma) on (-alpha, alpha), kernel (1/pi) C(sigma)(x - y).
DiscretizedOperator build_wiener_hopf(const EvenFunction& sigma, double alpha, int n,
                                      const TransformConfig& cfg = {});

/// W_alpha(sigma) on (0, alpha), kernel (1/pi) C(sigma)(x - y).
DiscretizedOperator build_finite_wh(const EvenFunction& sigma, double alpha, int n,
                                    const TransformConfig& cfg = {});

/// H_alpha(sigma) on (0, alpha), kernel (1/pi) C(sigma)(x + y).
DiscretizedOperator build_hankel(const EvenFunction& sigma, double alpha, int n,
                                 const TransformConfig& cfg = {});

/// Largest |sigma| accepted where the Bessel symbol taper starts.
inline constexpr double kBesselTaperLimit = 0.25;

/// B_alpha(sigma) on (0, 1):
///   alpha^2 int_0^inf u sigma(u) sqrt(x y) J_nu(alpha u x) J_nu(alpha u y) du.
/// The u-integral stops where |sigma| < 1e-12. If that lies beyond the frequency the
/// x-grid resolves (about 4 nodes per period of J_nu(alpha u x)), sigma is tapered
/// smoothly to zero on [U/2, U] and the removed part enters through a TailCorrection.
DiscretizedOperator build_bessel_operator(const EvenFunction& sigma, double alpha, double nu,
                                          int n, const TransformConfig& cfg = {});

/// Unitary rescale of an operator on (0, 1) to (0, alpha): X = alpha x, K -> K / alpha.
DiscretizedOperator rescale_to_alpha(const DiscretizedOperator& op, double alpha);

/// Kernel sigma(x) K(x, y) on a truncated domain. Hermite: |x| < L around the bulk
/// scaling of the rescaled kernel. Laguerre: in the variable t = sqrt(X) of the hard-edge
/// scaling, kernel sigma(t) 2 sqrt(t s) K(t^2, s^2) on (0, L).
DiscretizedOperator build_finite_n_operator(Ensemble ensemble, const EvenFunction& sigma, int N,
                                            double nu, int n);

/// sum_l A(x_i, x_l) w_l B(x_l, x_j).
DiscretizedOperator op_compose(const DiscretizedOperator& a, const DiscretizedOperator& b);

/// op_compose corrected for derivative jumps of the kernels on the diagonal. For b,
/// sum_l (A_il - A_ij) w_l B_lj + A_ij int B(z, x_j) dz = A W B + A diag(defect_b);
/// a's jump adds diag(defect_a) B the same way. Operators without a recorded
/// defect are treated as smooth.
DiscretizedOperator op_compose_kink_corrected(const DiscretizedOperator& a,
                                              const DiscretizedOperator& b);

/// a + scale * b on a shared grid.
DiscretizedOperator op_add(const DiscretizedOperator& a, const DiscretizedOperator& b,
                           std::complex<double> scale = 1.0);

/// The Nystrom identity: diag(1 / w_i).
DiscretizedOperator nystrom_identity(const Quadrature& grid);

/// Max-norm residuals of the product identities for the truncated Wiener-Hopf and
/// Hankel operators with phi = 1 + sigma1, psi = 1 + sigma2, in kernel form.
struct IdentityResiduals {
  double wh_plus_hw = 0.0;    // W(phi)H(psi) + H(phi)W(psi) - H(phi psi)
  double ww_plus_hh = 0.0;    // W(phi)W(psi) - W(phi psi) + H(phi)H(psi)
  double inverse = 0.0;       // (W(phi)+H(phi))(W(phi^-1)+H(phi^-1)) - I, with psi = phi^-1
  // the same norms restricted to x, y < alpha/2
  double wh_plus_hw_interior = 0.0;
  double ww_plus_hh_interior = 0.0;
  double inverse_interior = 0.0;
};

/// sigma1 = e^{ikf1} - 1, sigma2 = e^{ikf2} - 1 for the product identities; the
/// inverse identity uses sigma1 and its reciprocal symbol e^{-ikf1} - 1.
IdentityResiduals identity_residuals(const TestFunction& f1, const TestFunction& f2, double k,
                                     double alpha, int n, const TransformConfig& cfg = {});

struct OneSidedResidual {
  double full = 0.0;
  double interior = 0.0;  // x, y < alpha/2
};

/// Max of |W(psi)W(phi) - W(phi psi)| over a samples x samples grid of (0, alpha)^2,
/// in kernel form. phi = 1 + c/(1 - i xi) has kernel c e^{-u} supported on u > 0,
/// psi = e^{ikf}. The product side is integrated directly; the kernel of phi psi
/// comes from the product symbol, (c/pi)(C(g) - C(g)') with g = (psi - 1)/(1 + xi^2).
OneSidedResidual one_sided_product_residual(const TestFunction& f, double k, double c, double alpha,
                                            int samples = 41, const TransformConfig& cfg = {});

}  // namespace rmstat
