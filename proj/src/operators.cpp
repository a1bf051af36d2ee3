#include "rmstat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "parallel.hpp"
#include "rmstat/error.hpp"

namespace rmstat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kGridPanelPoints = 20;
constexpr double kBesselTruncation = 1e-12;

Eigen::MatrixXcd zero_matrix(const Quadrature& q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  return Eigen::MatrixXcd::Zero(n, n);
}

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError(std::string(who) + ": alpha must be positive and finite");
  }
}

// Piecewise Chebyshev interpolant of C(sigma) on [0, reach]. C(sigma) is smooth
// for x > 0, and one table replaces the n^2 / 2 direct transforms of a kernel build.
class TransformTable {
 public:
  TransformTable(const EvenFunction& sigma, double reach, const TransformConfig& cfg)
      : panels_(std::max(1, static_cast<int>(std::ceil(reach / kTablePanelWidth)))),
        width_(std::max(reach, 1e-12) / panels_),
        values_(static_cast<std::size_t>(panels_) * kTableNodes) {
    const CosineTransformer transform(sigma, cfg);
    transform.prepare(reach);
    for (int j = 0; j < kTableNodes; ++j) {
      unit_[j] = std::cos(kPi * (j + 0.5) / kTableNodes);
      bary_[j] = ((j % 2 == 0) ? 1.0 : -1.0) * std::sin(kPi * (j + 0.5) / kTableNodes);
    }
    detail::parallel_for(static_cast<std::size_t>(panels_), [&](std::size_t p) {
      const double mid = (p + 0.5) * width_;
      for (int j = 0; j < kTableNodes; ++j) {
        values_[p * kTableNodes + j] = transform(mid + 0.5 * width_ * unit_[j]);
      }
    });
  }

  std::complex<double> operator()(double x) const {
    x = std::abs(x);
    const int p = std::min(panels_ - 1, static_cast<int>(x / width_));
    const double t = (x - (p + 0.5) * width_) / (0.5 * width_);
    const std::complex<double>* v = &values_[static_cast<std::size_t>(p) * kTableNodes];
    std::complex<double> num = 0.0;
    double den = 0.0;
    for (int j = 0; j < kTableNodes; ++j) {
      const double d = t - unit_[j];
      if (d == 0.0) return v[j];
      const double c = bary_[j] / d;
      num += c * v[j];
      den += c;
    }
    return num / den;
  }

 private:
  static constexpr int kTableNodes = 16;
  static constexpr double kTablePanelWidth = 0.25;
  int panels_;
  double width_;
  std::vector<std::complex<double>> values_;
  double unit_[kTableNodes];
  double bary_[kTableNodes];
};

// (1/pi) C(sigma)(x_i op x_j) over a grid; symmetric in i, j.
Eigen::MatrixXcd transform_kernel(const TransformTable& table, const Quadrature& q, double sign) {
  Eigen::MatrixXcd m = zero_matrix(q);
  const auto n = static_cast<Eigen::Index>(q.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) m(i, j) = table(q.nodes[i] + sign * q.nodes[j]) / kPi;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) m(i, j) = m(j, i);
  return m;
}

double grid_reach(const Quadrature& q) {
  double reach = 0.0;
  for (double x : q.nodes) reach = std::max(reach, 2.0 * std::abs(x));
  return std::max(reach, 2.0 * std::max(std::abs(q.a), std::abs(q.b)));
}

// int_a^b (1/pi) C(sigma)(z - x_j) dz minus the grid's quadrature of the same column.
Eigen::VectorXcd difference_mass_defect(const TransformTable& table, const Quadrature& q,
                                        const Eigen::MatrixXcd& m) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::VectorXcd defect = Eigen::VectorXcd::Zero(n);
  // primitive P(s) = int_0^s C(sigma), needed at s = x_j - a and b - x_j
  std::vector<double> ends;
  ends.reserve(2 * q.size());
  for (double x : q.nodes) {
    ends.push_back(x - q.a);
    ends.push_back(q.b - x);
  }
  std::vector<double> sorted = ends;
  std::sort(sorted.begin(), sorted.end());
  const Quadrature ref = gauss_legendre(20, -1.0, 1.0);
  std::map<double, std::complex<double>> primitive;
  std::complex<double> acc = 0.0;
  double at = 0.0;
  for (double s : sorted) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((s - at) / 0.25)));
    const double h = (s - at) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double mid = at + (p + 0.5) * h;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        acc += 0.5 * h * ref.weights[i] * table(mid + 0.5 * h * ref.nodes[i]);
      }
    }
    at = s;
    primitive[s] = acc;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::complex<double> exact =
        (primitive[ends[2 * j]] + primitive[ends[2 * j + 1]]) / kPi;
    std::complex<double> quad = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) quad += q.weights[l] * m(l, j);
    defect(j) = exact - quad;
  }
  return defect;
}

DiscretizedOperator make_operator(Quadrature grid, Eigen::MatrixXcd m, OperatorKind kind,
                                  double alpha, double nu, int N, double k) {
  DiscretizedOperator op;
  op.grid = std::move(grid);
  op.matrix = std::move(m);
  op.provenance = Provenance{kind, alpha, nu, N, k};
  return op;
}

void check_same_grid(const DiscretizedOperator& a, const DiscretizedOperator& b) {
  if (a.grid.nodes != b.grid.nodes || a.grid.weights != b.grid.weights) {
    throw DomainError("operators live on different grids");
  }
}

// sqrt(u_l x_i) J_nu(alpha u_l x_i), cached per (nu, alpha, x grid, u grid).
struct BesselBasis {
  std::vector<double> u_nodes;
  std::vector<double> u_weights;
  Eigen::MatrixXd v;  // grid size x u nodes
};

using BasisKey = std::tuple<double, double, std::vector<double>, double, double>;

std::shared_ptr<const BesselBasis> bessel_basis(double nu, double alpha, const Quadrature& x,
                                                double upper, double width, int points) {
  static std::mutex mutex;
  static std::map<BasisKey, std::shared_ptr<const BesselBasis>> cache;
  static std::vector<BasisKey> order;
  constexpr std::size_t kCacheSize = 4;

  BasisKey key{nu, alpha, x.nodes, upper, width};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto basis = std::make_shared<BesselBasis>();
  const int panels = std::max(1, static_cast<int>(std::ceil(upper / width)));
  const Quadrature uq = composite_gauss_legendre(panels, points, 0.0, upper);
  basis->u_nodes = uq.nodes;
  basis->u_weights = uq.weights;
  const auto rows = static_cast<Eigen::Index>(x.size());
  const auto cols = static_cast<Eigen::Index>(uq.size());
  basis->v.resize(rows, cols);
  detail::parallel_for(x.size(), [&](std::size_t i) {
    std::vector<double> args(uq.size());
    std::vector<double> vals(uq.size());
    const double xi = x.nodes[i];
    for (std::size_t l = 0; l < uq.size(); ++l) args[l] = alpha * uq.nodes[l] * xi;
    bessel_j(nu, args, vals);
    for (std::size_t l = 0; l < uq.size(); ++l) {
      basis->v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
          std::sqrt(uq.nodes[l] * xi) * vals[l];
    }
  });
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() >= kCacheSize) {
    cache.erase(order.front());
    order.erase(order.begin());
  }
  cache.emplace(key, basis);
  order.push_back(key);
  return basis;
}

void check_finite_n(int N, double nu, Ensemble e) {
  if (N < 1 || N > kMaxFiniteN) throw DomainError("finite-N kernel: N must be in [1, 300]");
  if (e == Ensemble::laguerre && !(nu > -1.0)) throw DomainError("laguerre kernel: nu must be > -1");
}

void orthonormal_values(Ensemble e, int count, double nu, double x, std::span<double> out) {
  if (e == Ensemble::hermite) {
    hermite_fns(count, x, out);
  } else {
    laguerre_fns(count, nu, x, out);
  }
}

}  // namespace

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::sine_wh: return "sine_WH";
    case OperatorKind::bessel: return "bessel";
    case OperatorKind::finite_wh: return "finite_WH";
    case OperatorKind::hankel: return "hankel";
    case OperatorKind::finite_n_hermite: return "finiteN_hermite";
    case OperatorKind::finite_n_laguerre: return "finiteN_laguerre";
    case OperatorKind::composed: return "composed";
  }
  return "unknown";
}

std::string to_string(Ensemble ensemble) {
  return ensemble == Ensemble::hermite ? "hermite" : "laguerre";
}

std::complex<double> TailCorrection::power(int n) const {
  if (n < 1 || static_cast<std::size_t>(n) >= power_traces.size()) return 0.0;
  return power_traces[static_cast<std::size_t>(n)];
}

Quadrature operator_grid(double a, double b, int n) {
  if (n < 1) throw DomainError("operator_grid: n must be positive");
  if (n <= kGridPanelPoints) return gauss_legendre(n, a, b);
  const int panels = (n + kGridPanelPoints - 1) / kGridPanelPoints;
  return composite_gauss_legendre(panels, kGridPanelPoints, a, b);
}

double sine_kernel(double x, double y) {
  const double d = x - y;
  if (std::abs(d) < 1e-4) {
    const double d2 = d * d;
    return (1.0 - d2 / 6.0 + d2 * d2 / 120.0) / kPi;
  }
  return std::sin(d) / (kPi * d);
}

double bessel_kernel(double nu, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("bessel_kernel: x and y must be positive");
  if (nu < -0.5 || nu > kBesselMaxOrder - 1.0) {
    throw DomainError("bessel_kernel: order outside [-1/2, 6]");
  }
  auto diagonal = [nu](double s) {
    const double z = std::sqrt(s);
    const double j = bessel_j(nu, z);
    return 0.25 * (j * j - bessel_j(nu + 1.0, z) * bessel_j(nu - 1.0, z));
  };
  if (std::abs(x - y) < 1e-6 * std::max(1.0, std::max(x, y))) {
    // symmetric in (x, y), so the linear term vanishes about the midpoint
    return diagonal(0.5 * (x + y));
  }
  const double a = std::sqrt(x);
  const double b = std::sqrt(y);
  const double ja = bessel_j(nu, a);
  const double jb = bessel_j(nu, b);
  // J'(z) = J_{nu-1}(z) - (nu/z) J_nu(z)
  const double dja = bessel_j(nu - 1.0, a) - nu / a * ja;
  const double djb = bessel_j(nu - 1.0, b) - nu / b * jb;
  return (ja * b * djb - a * dja * jb) / (2.0 * (x - y));
}

double finite_n_kernel_summed(Ensemble ensemble, int N, double nu, double x, double y) {
  check_finite_n(N, nu, ensemble);
  if (ensemble == Ensemble::laguerre && (!(x > 0.0) || !(y > 0.0))) {
    throw DomainError("laguerre kernel: x and y must be positive");
  }
  std::vector<double> px(static_cast<std::size_t>(N));
  std::vector<double> py(static_cast<std::size_t>(N));
  orthonormal_values(ensemble, N, nu, x, px);
  orthonormal_values(ensemble, N, nu, y, py);
  double acc = 0.0;
  for (int i = 0; i < N; ++i) acc += px[i] * py[i];
  return acc;
}

double finite_n_kernel(Ensemble ensemble, int N, double nu, double x, double y) {
  check_finite_n(N, nu, ensemble);
  const double scale = std::max({1.0, std::abs(x), std::abs(y)});
  if (N <= 50 || std::abs(x - y) < 1e-2 * scale) {
    return finite_n_kernel_summed(ensemble, N, nu, x, y);
  }
  if (ensemble == Ensemble::laguerre && (!(x > 0.0) || !(y > 0.0))) {
    throw DomainError("laguerre kernel: x and y must be positive");
  }
  std::vector<double> px(static_cast<std::size_t>(N) + 1);
  std::vector<double> py(static_cast<std::size_t>(N) + 1);
  orthonormal_values(ensemble, N + 1, nu, x, px);
  orthonormal_values(ensemble, N + 1, nu, y, py);
  // off-diagonal Jacobi coefficient linking indices N-1 and N
  const double c = ensemble == Ensemble::hermite ? std::sqrt(0.5 * N)
                                                 : -std::sqrt(N * (N + nu));
  return c * (px[N] * py[N - 1] - px[N - 1] * py[N]) / (x - y);
}

double rescaled_finite_n_kernel(Ensemble ensemble, int N, double nu, double x, double y) {
  if (ensemble == Ensemble::hermite) {
    const double s = std::sqrt(2.0 * N);
    return finite_n_kernel(ensemble, N, nu, x / s, y / s) / s;
  }
  const double s = 4.0 * N;
  return finite_n_kernel(ensemble, N, nu, x / s, y / s) / s;
}

DiscretizedOperator build_wiener_hopf(const EvenFunction& sigma, double alpha, int n,
                                      const TransformConfig& cfg) {
  check_alpha(alpha, "build_wiener_hopf");
  if (n > 1000) throw DomainError("build_wiener_hopf: n must be <= 1000");
  Quadrature q = operator_grid(-alpha, alpha, n);
  if (sigma.is_zero()) {
    return make_operator(q, zero_matrix(q), OperatorKind::sine_wh, alpha, 0.0, 0, sigma.k);
  }
  const TransformTable table(sigma, grid_reach(q), cfg);
  Eigen::MatrixXcd m = transform_kernel(table, q, -1.0);
  Eigen::VectorXcd defect = difference_mass_defect(table, q, m);
  auto op = make_operator(std::move(q), std::move(m), OperatorKind::sine_wh, alpha, 0.0, 0,
                          sigma.k);
  op.mass_defect = std::move(defect);
  return op;
}

DiscretizedOperator build_finite_wh(const EvenFunction& sigma, double alpha, int n,
                                    const TransformConfig& cfg) {
  check_alpha(alpha, "build_finite_wh");
  Quadrature q = operator_grid(0.0, alpha, n);
  if (sigma.is_zero()) {
    return make_operator(q, zero_matrix(q), OperatorKind::finite_wh, alpha, -0.5, 0, sigma.k);
  }
  const TransformTable table(sigma, grid_reach(q), cfg);
  Eigen::MatrixXcd m = transform_kernel(table, q, -1.0);
  Eigen::VectorXcd defect = difference_mass_defect(table, q, m);
  auto op = make_operator(std::move(q), std::move(m), OperatorKind::finite_wh, alpha, -0.5, 0,
                          sigma.k);
  op.mass_defect = std::move(defect);
  return op;
}

DiscretizedOperator build_hankel(const EvenFunction& sigma, double alpha, int n,
                                 const TransformConfig& cfg) {
  check_alpha(alpha, "build_hankel");
  Quadrature q = operator_grid(0.0, alpha, n);
  if (sigma.is_zero()) {
    return make_operator(q, zero_matrix(q), OperatorKind::hankel, alpha, -0.5, 0, sigma.k);
  }
  const TransformTable table(sigma, grid_reach(q), cfg);
  Eigen::MatrixXcd m = transform_kernel(table, q, 1.0);
  return make_operator(std::move(q), std::move(m), OperatorKind::hankel, alpha, -0.5, 0, sigma.k);
}

DiscretizedOperator build_bessel_operator(const EvenFunction& sigma, double alpha, double nu,
                                          int n, const TransformConfig& cfg) {
  check_alpha(alpha, "build_bessel_operator");
  cfg.validate();
  if (nu < -0.5 || nu > kBesselMaxOrder - 1.0) {
    throw DomainError("build_bessel_operator: nu must be in [-1/2, 6]");
  }
  if (n > 600) throw DomainError("build_bessel_operator: n must be <= 600");
  Quadrature q = operator_grid(0.0, 1.0, n);
  DiscretizedOperator op =
      make_operator(q, zero_matrix(q), OperatorKind::bessel, alpha, nu, 0, sigma.k);
  if (sigma.is_zero()) return op;

  // J_nu(alpha u x) J_nu(alpha u y) oscillates with period >= pi / alpha in u
  const int points = cfg.points_per_panel;
  const double width = points * kPi / (alpha * cfg.oscillation_safety);
  const double natural = sigma.radius_for(kBesselTruncation);
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) spacing = std::max(spacing, q.nodes[i + 1] - q.nodes[i]);
  const double resolvable = 2.0 * kPi / (4.0 * spacing * alpha);
  const bool taper = natural > resolvable;
  double upper = taper ? resolvable : natural;
  const double taper_start = 0.5 * upper;
  if (taper && std::abs(sigma(taper_start)) > kBesselTaperLimit) {
    throw ResolutionError("build_bessel_operator: |sigma| = " +
                          std::to_string(std::abs(sigma(taper_start))) + " at u = " +
                          std::to_string(taper_start) +
                          " where the grid stops resolving the kernel; raise n");
  }
  upper = std::max(upper, width);
  if (std::ceil(upper / width) > cfg.panel_count) {
    throw ResolutionError("build_bessel_operator: u-integral needs more than " +
                          std::to_string(cfg.panel_count) + " panels");
  }
  auto chi = [taper, taper_start, upper](double u) {
    if (!taper || u <= taper_start) return 1.0;
    if (u >= upper) return 0.0;
    const double s = (u - taper_start) / (upper - taper_start);
    const double a = std::exp(-1.0 / (1.0 - s));
    const double b = std::exp(-1.0 / s);
    return a / (a + b);
  };

  const auto basis = bessel_basis(nu, alpha, q, upper, width, points);
  const auto cols = static_cast<Eigen::Index>(basis->u_nodes.size());
  Eigen::VectorXd re(cols), im(cols);
  for (Eigen::Index l = 0; l < cols; ++l) {
    const double u = basis->u_nodes[l];
    const std::complex<double> s = chi(u) * sigma(u) * basis->u_weights[l];
    re(l) = s.real();
    im(l) = s.imag();
  }
  const double a2 = alpha * alpha;
  Eigen::MatrixXd real_part = a2 * (basis->v * re.asDiagonal() * basis->v.transpose());
  op.matrix = real_part.cast<std::complex<double>>();
  if (im.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::MatrixXd imag_part = a2 * (basis->v * im.asDiagonal() * basis->v.transpose());
    op.matrix.imag() = imag_part;
  }

  if (taper) {
    const double scale = alpha / kPi;
    const Quadrature band = composite_gauss_legendre(16, points, taper_start, upper);
    op.tail.cutoff = taper_start;
    op.tail.power_traces.assign(7, 0.0);
    for (int p = 1; p <= 6; ++p) {
      const auto removed = [&](double u) {
        const std::complex<double> s = sigma(u);
        return std::pow(s, p) - std::pow(chi(u) * s, p);
      };
      op.tail.power_traces[p] =
          scale * (band.integrate(removed) + tail_integral(power(sigma, p).profile, upper));
    }
    const auto removed_log = [&](double u) {
      const std::complex<double> s = sigma(u);
      return std::log(1.0 + s) - std::log(1.0 + chi(u) * s);
    };
    op.tail.log_det =
        scale * (band.integrate(removed_log) +
                 tail_integral([&](double u) { return std::log(1.0 + sigma(u)); }, upper));
  }
  return op;
}

DiscretizedOperator rescale_to_alpha(const DiscretizedOperator& op, double alpha) {
  check_alpha(alpha, "rescale_to_alpha");
  DiscretizedOperator out = op;
  out.grid.a = op.grid.a * alpha;
  out.grid.b = op.grid.b * alpha;
  for (auto& x : out.grid.nodes) x *= alpha;
  for (auto& w : out.grid.weights) w *= alpha;
  out.matrix /= alpha;
  return out;
}

DiscretizedOperator build_finite_n_operator(Ensemble ensemble, const EvenFunction& sigma, int N,
                                            double nu, int n) {
  check_finite_n(N, nu, ensemble);
  // |K| <= ~1/pi in the scaled variables, so this bounds |sigma K| by ~1e-14
  double reach = sigma.is_zero() ? 1.0 : sigma.radius_for(1e-14);
  // Past the spectral edge the density falls off like Ai^2 on the soft-edge scale,
  // (2N)^{1/3} in these variables; twenty widths leave nothing visible in a trace.
  const double width = 2.0 * std::cbrt(2.0 * N);
  const double edge = ensemble == Ensemble::hermite
                          ? 2.0 * N + 10.0 * width
                          : std::sqrt(4.0 * N * (4.0 * N + 10.0 * width));
  reach = std::clamp(reach, 1.0, edge);
  // bulk oscillation period is ~pi; keep at least 8 nodes per period
  const int needed = static_cast<int>(std::ceil(reach * 8.0 / kPi));
  const int nodes = std::max(n, ensemble == Ensemble::hermite ? 2 * needed : needed);
  Quadrature q = ensemble == Ensemble::hermite ? operator_grid(-reach, reach, nodes)
                                               : operator_grid(0.0, reach, nodes);
  const auto size = static_cast<Eigen::Index>(q.size());

  Eigen::MatrixXd phi(size, N);
  detail::parallel_for(q.size(), [&](std::size_t i) {
    std::vector<double> vals(static_cast<std::size_t>(N));
    const double t = q.nodes[i];
    const double arg = ensemble == Ensemble::hermite ? t / std::sqrt(2.0 * N) : t * t / (4.0 * N);
    orthonormal_values(ensemble, N, nu, arg, vals);
    // hermite: 1/sqrt(2N) factor; laguerre: (1/4N) * 2 sqrt(t s) split between rows
    const double rowscale = ensemble == Ensemble::hermite
                                ? std::pow(2.0 * N, -0.25)
                                : std::sqrt(2.0 * t / (4.0 * N));
    for (int j = 0; j < N; ++j) phi(static_cast<Eigen::Index>(i), j) = rowscale * vals[j];
  });
  Eigen::MatrixXd kernel = phi * phi.transpose();
  Eigen::MatrixXcd m(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const std::complex<double> s = sigma.is_zero() ? 0.0 : sigma(q.nodes[i]);
    m.row(i) = s * kernel.row(i).cast<std::complex<double>>();
  }
  const OperatorKind kind = ensemble == Ensemble::hermite ? OperatorKind::finite_n_hermite
                                                          : OperatorKind::finite_n_laguerre;
  return make_operator(std::move(q), std::move(m), kind, 0.0, nu, N, sigma.k);
}

DiscretizedOperator op_compose(const DiscretizedOperator& a, const DiscretizedOperator& b) {
  check_same_grid(a, b);
  const Eigen::Map<const Eigen::VectorXd> w(a.grid.weights.data(),
                                            static_cast<Eigen::Index>(a.grid.size()));
  DiscretizedOperator out;
  out.grid = a.grid;
  out.matrix = a.matrix * w.cast<std::complex<double>>().asDiagonal() * b.matrix;
  out.provenance = a.provenance;
  out.provenance.kind = OperatorKind::composed;
  return out;
}

DiscretizedOperator op_compose_kink_corrected(const DiscretizedOperator& a,
                                              const DiscretizedOperator& b) {
  DiscretizedOperator out = op_compose(a, b);
  if (a.mass_defect.size() == a.size()) out.matrix += a.mass_defect.asDiagonal() * b.matrix;
  if (b.mass_defect.size() == b.size()) out.matrix += a.matrix * b.mass_defect.asDiagonal();
  return out;
}

DiscretizedOperator op_add(const DiscretizedOperator& a, const DiscretizedOperator& b,
                           std::complex<double> scale) {
  check_same_grid(a, b);
  DiscretizedOperator out;
  out.grid = a.grid;
  out.matrix = a.matrix + scale * b.matrix;
  // a kernel without a recorded defect is smooth, so its defect is negligible
  if (a.mass_defect.size() == a.size()) out.mass_defect = a.mass_defect;
  if (b.mass_defect.size() == b.size()) {
    if (out.mass_defect.size() == 0) out.mass_defect = Eigen::VectorXcd::Zero(a.size());
    out.mass_defect += scale * b.mass_defect;
  }
  out.provenance = a.provenance;
  out.provenance.kind = OperatorKind::composed;
  return out;
}

DiscretizedOperator nystrom_identity(const Quadrature& grid) {
  DiscretizedOperator out;
  out.grid = grid;
  out.matrix = zero_matrix(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0 / grid.weights[i];
  }
  return out;
}

IdentityResiduals identity_residuals(const TestFunction& f1, const TestFunction& f2, double k,
                                     double alpha, int n, const TransformConfig& cfg) {
  const EvenFunction s1 = make_symbol(f1, k).as_even();
  const EvenFunction s2 = make_symbol(f2, k).as_even();
  const EvenFunction s1_inv = make_symbol(f1, -k).as_even();
  const EvenFunction s12 = product(s1, s2);

  const auto w1 = build_finite_wh(s1, alpha, n, cfg);
  const auto h1 = build_hankel(s1, alpha, n, cfg);
  const auto w2 = build_finite_wh(s2, alpha, n, cfg);
  const auto h2 = build_hankel(s2, alpha, n, cfg);
  const auto w12 = build_finite_wh(s12, alpha, n, cfg);
  const auto h12 = build_hankel(s12, alpha, n, cfg);
  const auto k1 = op_add(w1, h1);
  const auto k1_inv = op_add(build_finite_wh(s1_inv, alpha, n, cfg),
                             build_hankel(s1_inv, alpha, n, cfg));

  const Eigen::MatrixXcd r1 =
      op_compose_kink_corrected(w1, h2).matrix + op_compose_kink_corrected(h1, w2).matrix - h12.matrix;
  const Eigen::MatrixXcd r2 =
      op_compose_kink_corrected(w1, w2).matrix - w12.matrix + op_compose_kink_corrected(h1, h2).matrix;
  const Eigen::MatrixXcd r3 = k1.matrix + k1_inv.matrix + op_compose_kink_corrected(k1, k1_inv).matrix;

  Eigen::Index inner = 0;
  while (inner < static_cast<Eigen::Index>(w1.grid.size()) && w1.grid.nodes[inner] < 0.5 * alpha) {
    ++inner;
  }
  auto norm = [](const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); };
  auto inner_norm = [inner](const Eigen::MatrixXcd& m) {
    return inner == 0 ? 0.0 : m.topLeftCorner(inner, inner).cwiseAbs().maxCoeff();
  };
  IdentityResiduals r;
  r.wh_plus_hw = norm(r1);
  r.ww_plus_hh = norm(r2);
  r.inverse = norm(r3);
  r.wh_plus_hw_interior = inner_norm(r1);
  r.ww_plus_hh_interior = inner_norm(r2);
  r.inverse_interior = inner_norm(r3);
  return r;
}

OneSidedResidual one_sided_product_residual(const TestFunction& f, double k, double c, double alpha,
                                            int samples, const TransformConfig& cfg) {
  check_alpha(alpha, "one_sided_product_residual");
  if (samples < 2) throw DomainError("one_sided_product_residual: samples must be >= 2");
  const EvenFunction s = make_symbol(f, k).as_even();
  OneSidedResidual out;
  if (s.is_zero() || c == 0.0) return out;

  // kernel of psi - 1 for the truncated product
  const TransformTable table(s, alpha, cfg);
  // g = (psi - 1) / (1 + xi^2) for the product symbol's kernel
  EvenFunction g;
  g.label = s.label + "/(1+x^2)";
  g.profile = [s](double x) { return s.profile(x) / (1.0 + x * x); };
  g.radius_for = s.radius_for;
  g.sup_abs = s.sup_abs;
  g.k = s.k;
  const CosineTransformer cg(g, cfg);
  const double h = 1e-3;
  auto product_kernel = [&](double u) {
    const std::complex<double> d =
        (cg(u - 2 * h) - 8.0 * cg(u - h) + 8.0 * cg(u + h) - cg(u + 2 * h)) / (12.0 * h);
    return c / kPi * (cg(u) - d);
  };

  std::vector<double> x(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) x[i] = alpha * i / (samples - 1);
  // u = x_i - x_j takes 2 samples - 1 values on the uniform grid
  std::vector<std::complex<double>> kp(static_cast<std::size_t>(2 * samples - 1));
  cg.prepare(alpha + 1.0);
  for (int d = -(samples - 1); d < samples; ++d) kp[d + samples - 1] = product_kernel(alpha * d / (samples - 1));

  const Quadrature ref = gauss_legendre(kGridPanelPoints, 0.0, 1.0);
  auto segment = [&](double xi, double yj, double lo, double hi) {
    std::complex<double> acc = 0.0;
    if (hi <= lo) return acc;
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.5)));
    const double w = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      for (std::size_t l = 0; l < ref.size(); ++l) {
        const double z = lo + w * (p + ref.nodes[l]);
        acc += w * ref.weights[l] * table(xi - z) * std::exp(-(z - yj));
      }
    }
    return acc;
  };
  std::vector<double> full(x.size() * x.size());
  std::vector<double> inner(x.size() * x.size());
  detail::parallel_for(x.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double xi = x[i];
      const double yj = x[j];
      // k_psi has a kink at z = x, so split there
      const double mid = std::clamp(xi, yj, alpha);
      const std::complex<double> lhs = c / kPi * (segment(xi, yj, yj, mid) + segment(xi, yj, mid, alpha));
      const double r = std::abs(lhs - kp[i - j + x.size() - 1]);
      full[i * x.size() + j] = r;
      inner[i * x.size() + j] = (xi < 0.5 * alpha && yj < 0.5 * alpha) ? r : 0.0;
    }
  });
  out.full = *std::max_element(full.begin(), full.end());
  out.interior = *std::max_element(inner.begin(), inner.end());
  return out;
}

}  // namespace rmstat
