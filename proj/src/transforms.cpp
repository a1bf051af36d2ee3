#include "rmstat/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rmstat/error.hpp"

namespace rmstat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMinPanels = 16;
constexpr int kTailHalfPeriods = 48;

const Quadrature& reference_rule(int points) {
  thread_local std::map<int, Quadrature> cache;
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, gauss_legendre(points, -1.0, 1.0)).first;
  return it->second;
}

template <typename F>
auto gauss_on(F&& fn, double lo, double hi, int points) {
  const Quadrature& ref = reference_rule(points);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  using R = decltype(fn(0.0));
  R acc{};
  for (std::size_t i = 0; i < ref.size(); ++i) acc += ref.weights[i] * fn(mid + half * ref.nodes[i]);
  return acc * half;
}

// int_lo^hi with geometric panels of ratio <= 1.5 (lo > 0).
template <typename F>
std::complex<double> graded_integral(F&& fn, double lo, double hi, int points) {
  std::complex<double> acc = 0.0;
  double a = lo;
  while (a < hi) {
    const double b = std::min(hi, a * 1.5);
    acc += gauss_on(fn, a, b, points);
    a = b;
  }
  return acc;
}

}  // namespace

void TransformConfig::validate() const {
  if (panel_count <= 0 || points_per_panel < 4 || !(truncation_radius > 0.0) ||
      !(oscillation_safety > 0.0) || !(tail_tolerance > 0.0)) {
    throw DomainError(
        "TransformConfig: all fields must be positive and points_per_panel >= 4");
  }
}

std::complex<double> wynn_epsilon(const std::vector<std::complex<double>>& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  if (n < 3) return s.back();
  std::vector<std::complex<double>> prev(n + 1, 0.0);
  std::vector<std::complex<double>> cur(s.begin(), s.end());
  std::complex<double> best = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<std::complex<double>> next(n - k);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const std::complex<double> diff = cur[i + 1] - cur[i];
      if (std::abs(diff) == 0.0) return best;
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (k % 2 == 0) {
      if (!std::isfinite(next.back().real()) || !std::isfinite(next.back().imag())) return best;
      best = next.back();
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return best;
}

std::complex<double> tail_integral(const ComplexFn& g, double from) {
  if (!(from > 0.0)) throw DomainError("tail_integral: lower limit must be positive");
  // u = from / t, du = from / t^2 dt, t in (0, 1]; geometric panels toward t = 0.
  auto mapped = [&](double t) { return g(from / t) * (from / (t * t)); };
  std::complex<double> acc = 0.0;
  double hi = 1.0;
  for (int p = 0; p < 40; ++p) {
    const double lo = 0.5 * hi;
    acc += gauss_on(mapped, lo, hi, 20);
    hi = lo;
  }
  return acc;
}

CosineTransformer::CosineTransformer(EvenFunction g, TransformConfig cfg)
    : g_(std::move(g)), cfg_(cfg) {
  cfg_.validate();
  if (g_.is_zero()) {
    radius_ = 0.0;
    return;
  }
  const double natural = g_.radius_for(cfg_.tail_tolerance);
  radius_ = std::min(cfg_.truncation_radius, natural);
  needs_tail_ = natural > radius_;
  if (!(radius_ > 0.0)) radius_ = std::min(cfg_.truncation_radius, 1.0);
}

const CosineTransformer::Level& CosineTransformer::level_for(double x) const {
  const double periods = x * radius_ / (2.0 * kPi);
  const double nodes_needed = periods * cfg_.oscillation_safety;
  const double panels_needed = std::max<double>(kMinPanels, nodes_needed / cfg_.points_per_panel);
  if (panels_needed > cfg_.panel_count) {
    throw ResolutionError("cosine transform of " + g_.label + " at x=" + std::to_string(x) +
                          " needs " + std::to_string(static_cast<long>(panels_needed)) +
                          " panels on [0," + std::to_string(radius_) +
                          "], budget is " + std::to_string(cfg_.panel_count));
  }
  int level = 0;
  while (kMinPanels * (1L << level) < panels_needed) ++level;
  std::lock_guard<std::mutex> lock(*mutex_);
  auto it = levels_.find(level);
  if (it != levels_.end()) return it->second;
  const int panels = std::min<long>(kMinPanels * (1L << level), cfg_.panel_count);
  const Quadrature q = composite_gauss_legendre(panels, cfg_.points_per_panel, 0.0, radius_);
  Level lv;
  lv.nodes = q.nodes;
  lv.weights = q.weights;
  lv.values.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) lv.values[i] = g_.profile(q.nodes[i]);
  return levels_.emplace(level, std::move(lv)).first->second;
}

void CosineTransformer::prepare(double x_max) const {
  if (!g_.is_zero()) level_for(std::abs(x_max));
}

std::complex<double> CosineTransformer::operator()(double x) const {
  if (g_.is_zero()) return 0.0;
  x = std::abs(x);
  const Level& lv = level_for(x);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < lv.nodes.size(); ++i) {
    acc += lv.weights[i] * lv.values[i] * std::cos(x * lv.nodes[i]);
  }
  if (!needs_tail_) return acc;

  const double r = radius_;
  const auto& prof = g_.profile;
  if (x * r < 1e-8) return acc + tail_integral(prof, r);

  auto integrand = [&](double y) { return prof(y) * std::cos(x * y); };
  // zeros of cos(xy) beyond R: y_m = (m + 1/2) pi / x
  const double m0 = std::ceil(x * r / kPi - 0.5);
  double y = (m0 + 0.5) * kPi / x;
  std::vector<std::complex<double>> sums;
  sums.reserve(kTailHalfPeriods + 1);
  std::complex<double> s = (y > r) ? graded_integral(integrand, r, y, 20) : 0.0;
  sums.push_back(s);
  for (int m = 0; m < kTailHalfPeriods; ++m) {
    const double next = y + kPi / x;
    const std::complex<double> piece = (next / y > 1.5) ? graded_integral(integrand, y, next, 20)
                                                        : gauss_on(integrand, y, next, 20);
    s += piece;
    sums.push_back(s);
    y = next;
    if (std::abs(piece) < 1e-19) break;
  }
  return acc + wynn_epsilon(sums);
}

double cosine_transform(const TestFunction& f, double x, const TransformConfig& cfg) {
  return CosineTransformer(f.as_even(), cfg)(x).real();
}

std::complex<double> cosine_transform(const EvenFunction& g, double x, const TransformConfig& cfg) {
  return CosineTransformer(g, cfg)(x);
}

std::complex<double> fourier_transform(const TestFunction& f, double xi,
                                       const TransformConfig& cfg) {
  cfg.validate();
  if (f.sup_norm == 0.0) return 0.0;
  const double natural = f.radius_for(cfg.tail_tolerance);
  const double r = std::max(std::min(cfg.truncation_radius, natural), 1e-3);
  const double periods = std::abs(xi) * 2.0 * r / (2.0 * kPi);
  const double panels_needed =
      std::max<double>(2 * kMinPanels, periods * cfg.oscillation_safety / cfg.points_per_panel);
  if (panels_needed > 2.0 * cfg.panel_count) {
    throw ResolutionError("fourier_transform: xi=" + std::to_string(xi) +
                          " exceeds the resolution budget");
  }
  const int panels = static_cast<int>(std::ceil(panels_needed));
  const Quadrature q = composite_gauss_legendre(panels, cfg.points_per_panel, -r, r);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double x = q.nodes[i];
    acc += q.weights[i] * f.eval(x) * std::complex<double>(std::cos(xi * x), -std::sin(xi * x));
  }
  if (natural > r) {
    // both half-line tails: int_R^inf f(x) (e^{-i xi x} + e^{i xi x}) dx
    TransformConfig tail_cfg = cfg;
    tail_cfg.truncation_radius = r;
    const CosineTransformer outer(f.as_even(), tail_cfg);
    const Quadrature half = composite_gauss_legendre((panels + 1) / 2, cfg.points_per_panel, 0.0, r);
    const double inner = half.integrate([&](double x) { return f.profile(x) * std::cos(xi * x); });
    acc += 2.0 * (outer(xi) - inner);
  }
  return acc / (2.0 * kPi);
}

std::complex<double> mellin_line(const TestFunction& f, double y) {
  const double f0 = f.value_at_zero;
  if (!std::isfinite(f0)) throw DomainError("mellin_line: f(0) must be finite");
  if (y == 0.0) {
    if (f0 != 0.0) throw DomainError("mellin_line: pole at y = 0 (f(0) != 0)");
  }
  if (f.sup_norm == 0.0) return 0.0;
  const double natural = std::max(f.radius_for(1e-18), 1.0);
  const double s_max = std::log(natural) + 2.0;
  const double s_min = -42.0;
  auto integrand = [&](double s) {
    const double x = std::exp(s);
    const double reg = f.profile(x) - f0 * std::exp(-x);
    return reg * std::complex<double>(std::cos(2.0 * y * s), std::sin(2.0 * y * s));
  };
  const double end_value = std::abs(f.profile(std::exp(s_max)));
  if (!(end_value < 1e-12)) {
    throw DomainError("mellin_line: integrand does not decay; subtraction does not regularize");
  }
  const int points = 20;
  const double width = std::min(0.25, (kPi / std::max(std::abs(y), 1e-12)) * points / 10.0);
  const int panels = static_cast<int>(std::ceil((s_max - s_min) / width));
  const Quadrature q = composite_gauss_legendre(panels, points, s_min, s_max);
  std::complex<double> acc = q.integrate(integrand);
  if (f0 != 0.0) acc += f0 * gamma(std::complex<double>(0.0, 2.0 * y));
  return acc;
}

std::complex<double> cosine_pair_integral(const CosineTransformer& cf,
                                          const CosineTransformer& cg) {
  if (cf.function().is_zero() || cg.function().is_zero()) return 0.0;
  constexpr double kWidth = 0.5;
  constexpr double kCutoff = 1e-12;
  constexpr double kMaxX = 4000.0;
  std::complex<double> acc = 0.0;
  int quiet = 0;
  const Quadrature& ref = reference_rule(20);
  for (double lo = 0.0; lo < kMaxX; lo += kWidth) {
    const double mid = lo + 0.5 * kWidth;
    const double half = 0.5 * kWidth;
    std::complex<double> panel = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double x = mid + half * ref.nodes[i];
      const std::complex<double> v = x * cf(x) * cg(x);
      peak = std::max(peak, std::abs(v));
      panel += ref.weights[i] * v;
    }
    acc += half * panel;
    quiet = (peak < kCutoff) ? quiet + 1 : 0;
    if (quiet >= 4) return acc;
  }
  throw ResolutionError("cosine_pair_integral: integrand did not fall below 1e-12 by x=4000");
}

std::complex<double> cosine_pair_integral(const EvenFunction& f, const EvenFunction& g,
                                          const TransformConfig& cfg) {
  if (f.is_zero() || g.is_zero()) return 0.0;
  const CosineTransformer cf(f, cfg);
  const CosineTransformer cg(g, cfg);
  return cosine_pair_integral(cf, cg);
}

}  // namespace rmstat
