#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rmstat/specfun.hpp"
#include "rmstat/symbols.hpp"

namespace rmstat {

struct TransformConfig {
  int panel_count = 4096;  // resolution budget: maximum panels on the inner region
  int points_per_panel = 20;
  double truncation_radius = 40.0;  // inner region [0, R]; beyond it a tail method is used
  double oscillation_safety = 10.0;  // quadrature nodes per oscillation period
  double tail_tolerance = 1e-17;     // |g| below this beyond R means no tail is needed

  void validate() const;
};

/// C(g)(x) = int_0^inf g(y) cos(xy) dy for an even function g.
///
/// Panels on [0, R] are sized so every cos period receives at least
/// `oscillation_safety` nodes; node values of g are cached per resolution
/// level. When g has not decayed below `tail_tolerance` at R, the remainder
/// int_R^inf is summed over half periods and extrapolated with Wynn's epsilon
/// algorithm.
class CosineTransformer {
 public:
  CosineTransformer(EvenFunction g, TransformConfig cfg);

  std::complex<double> operator()(double x) const;

  /// Build the node cache covering arguments up to x_max (optional warm-up
  /// before concurrent use).
  void prepare(double x_max) const;

  double inner_radius() const { return radius_; }
  bool has_tail() const { return needs_tail_; }
  const EvenFunction& function() const { return g_; }

 private:
  struct Level {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<std::complex<double>> values;
  };
  const Level& level_for(double x) const;

  EvenFunction g_;
  TransformConfig cfg_;
  double radius_ = 0.0;
  bool needs_tail_ = false;
  mutable std::map<int, Level> levels_;
  mutable std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

/// Cosine transform of a catalog function (real part of the general transform).
double cosine_transform(const TestFunction& f, double x, const TransformConfig& cfg = {});

std::complex<double> cosine_transform(const EvenFunction& g, double x,
                                      const TransformConfig& cfg = {});

/// f^(xi) = (1/2pi) int_R f(x) e^{-i xi x} dx, integrated over the whole line.
std::complex<double> fourier_transform(const TestFunction& f, double xi,
                                       const TransformConfig& cfg = {});

/// M(f)(2iy) = int_0^inf f(x) x^{2iy-1} dx, continued to the imaginary axis by
/// subtracting f(0) e^{-x}, whose transform Gamma(2iy) is added back.
/// Throws DomainError at y == 0 (pole) unless f(0) == 0.
std::complex<double> mellin_line(const TestFunction& f, double y);

/// int_0^inf x C(f)(x) C(g)(x) dx, truncated where the integrand is below 1e-12.
std::complex<double> cosine_pair_integral(const EvenFunction& f, const EvenFunction& g,
                                          const TransformConfig& cfg = {});

/// Same integral with caller-provided transformers (reuses cached node values).
std::complex<double> cosine_pair_integral(const CosineTransformer& cf, const CosineTransformer& cg);

/// int_from^inf g(u) du via the map u = from / t.
std::complex<double> tail_integral(const ComplexFn& g, double from);

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm.
std::complex<double> wynn_epsilon(const std::vector<std::complex<double>>& partial_sums);

}  // namespace rmstat
