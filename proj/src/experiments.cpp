#include "rmstat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "rmstat/asymptotics.hpp"
#include "rmstat/error.hpp"
#include "rmstat/fredholm.hpp"
#include "rmstat/montecarlo.hpp"
#include "rmstat/operators.hpp"

namespace rmstat {

namespace {

using nlohmann::json;
using Row = std::vector<Cell>;

constexpr double kPi = std::numbers::pi;
// grid refinement may move a trace or determinant by at most this, relative to max(1, |value|)
constexpr double kRefineTolerance = 1e-6;
// identity residual norms are compared absolutely
constexpr double kResidualTolerance = 1e-4;
constexpr double kKernelFormTolerance = 1e-10;

ConvergenceCheck make_check(std::string name, std::complex<double> coarse,
                            std::complex<double> fine, double tol) {
  ConvergenceCheck c;
  c.name = std::move(name);
  c.coarse = coarse;
  c.fine = fine;
  c.tolerance = tol;
  return c;
}

ConvergenceCheck refine_check(std::string name, std::complex<double> coarse,
                              std::complex<double> fine) {
  return make_check(std::move(name), coarse, fine,
                    kRefineTolerance * std::max(1.0, std::abs(coarse)));
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_number(double v) { return std::isfinite(v) ? fmt(v) : "null"; }

std::string json_string(const std::string& s) { return json(s).dump(); }

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  if (const auto* z = std::get_if<std::complex<double>>(&c)) {
    const std::string im = fmt(z->imag());
    return fmt(z->real()) + (im.front() == '-' || im.front() == 'n' ? "" : "+") + im + "j";
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return quoted + "\"";
}

std::string json_complex(std::complex<double> z) {
  return "{\"re\": " + json_number(z.real()) + ", \"im\": " + json_number(z.imag()) + "}";
}

std::string json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return json_number(*d);
  if (const auto* z = std::get_if<std::complex<double>>(&c)) return json_complex(*z);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return json_string(std::get<std::string>(c));
}

std::string json_checks(const std::vector<ConvergenceCheck>& checks) {
  std::string out = "[";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const ConvergenceCheck& c = checks[i];
    out += i ? ", " : "";
    out += "{\"name\": " + json_string(c.name) + ", \"coarse\": " + json_complex(c.coarse) +
           ", \"fine\": " + json_complex(c.fine) + ", \"difference\": " +
           json_number(c.difference()) + ", \"tolerance\": " + json_number(c.tolerance) +
           ", \"passed\": " + (c.passed() ? "true" : "false") + "}";
  }
  return out + "]";
}

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool is_sine(const ExperimentConfig& c) { return c.ensemble == "sine"; }

// Evaluates fn over the sweep on the worker pool; rows keep sweep order.
template <typename Point>
std::vector<Row> sweep(const std::vector<Point>& points, unsigned workers,
                       const std::function<Row(const Point&)>& fn) {
  std::vector<Row> rows(points.size());
  detail::parallel_for(points.size(), [&](std::size_t i) { rows[i] = fn(points[i]); }, workers);
  return rows;
}

struct AlphaK {
  double alpha;
  double k;
};

std::vector<AlphaK> alpha_k_grid(const ExperimentConfig& c) {
  std::vector<AlphaK> out;
  for (double a : sorted(c.alpha_list)) {
    for (double k : c.k_list) out.push_back({a, k});
  }
  return out;
}

// ---- operator traces ----

DiscretizedOperator limit_operator(const ExperimentConfig& c, const EvenFunction& g, double alpha,
                                   int n) {
  return is_sine(c) ? build_wiener_hopf(g, alpha, n) : build_bessel_operator(g, alpha, c.nu, n);
}

double operator_mean(const ExperimentConfig& c, const TestFunction& f, double alpha, int n) {
  return op_trace(limit_operator(c, f.as_even(), alpha, n)).real();
}

double operator_variance(const ExperimentConfig& c, const TestFunction& f, double alpha, int n) {
  const DiscretizedOperator op = limit_operator(c, f.as_even(), alpha, n);
  const DiscretizedOperator sq = limit_operator(c, f.squared(), alpha, n);
  return (op_trace(sq) - op_trace_power(op, 2)).real();
}

Regime limit_regime(const ExperimentConfig& c) { return is_sine(c) ? Regime::sine : Regime::bessel; }

double nu_for(const ExperimentConfig& c) { return is_sine(c) ? 0.0 : c.nu; }

GaussianPrediction limit_prediction(const ExperimentConfig& c, const TestFunction& f,
                                    double alpha) {
  return is_sine(c) ? sine_prediction(f, alpha) : bessel_cf_prediction(f, alpha, c.nu);
}

// ---- commands ----

void cmd_mean(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  const TestFunction f = find_test_function(c.f_id);
  r.table.columns = {"alpha", "tr_operator", "closed_form_eq22_or_thm2", "deviation"};
  if (is_sine(c)) r.table.columns.push_back("literal_mean");
  const std::vector<double> alphas = sorted(c.alpha_list);
  r.table.rows = sweep<double>(alphas, workers, [&](const double& alpha) {
    const double tr = operator_mean(c, f, alpha, c.quad_n);
    Row row{alpha, tr};
    if (is_sine(c)) {
      const double closed = alpha * f.integral_fullline / kPi;
      row.insert(row.end(), {closed, tr - closed, alpha * f.integral_fullline / (2.0 * kPi)});
    } else {
      const double closed = bessel_mean(f, alpha, c.nu);
      row.insert(row.end(), {closed, tr - closed});
    }
    return row;
  });
  const double top = alphas.back();
  r.checks.push_back(refine_check("tr_operator at alpha=" + fmt(top) + ", n vs 2n",
                                  std::get<double>(r.table.rows.back()[1]),
                                  operator_mean(c, f, top, 2 * c.quad_n)));
}

void cmd_variance(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  const TestFunction f = find_test_function(c.f_id);
  r.table.columns = {"alpha", "operator_variance", "eq25", "eq26"};
  // the whole-line sine variance is twice the half-line formulas
  const double scale = is_sine(c) ? 2.0 : 1.0;
  const double eq25 = scale * bessel_variance_mellin(f);
  const double eq26 = scale * bessel_variance_cosine(f);
  if (is_sine(c)) r.table.columns.push_back("fourier_variance");
  const double fourier = is_sine(c) ? sine_variance(f) : 0.0;
  const std::vector<double> alphas = sorted(c.alpha_list);
  r.table.rows = sweep<double>(alphas, workers, [&](const double& alpha) {
    Row row{alpha, operator_variance(c, f, alpha, c.quad_n), eq25, eq26};
    if (is_sine(c)) row.push_back(fourier);
    return row;
  });
  const double top = alphas.back();
  r.checks.push_back(refine_check("operator_variance at alpha=" + fmt(top) + ", n vs 2n",
                                  std::get<double>(r.table.rows.back()[1]),
                                  operator_variance(c, f, top, 2 * c.quad_n)));
  r.checks.push_back(make_check("eq25 vs eq26", eq25, eq26, 1e-5));
}

void cmd_cf(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  const TestFunction f = find_test_function(c.f_id);
  r.table.columns = {"alpha", "k", "det_value", "gaussian_prediction", "log_deviation"};
  if (is_sine(c)) r.table.columns.push_back("literal_mean");
  const std::vector<AlphaK> grid = alpha_k_grid(c);
  auto det_at = [&](double alpha, double k, int n) {
    CfNumerics numerics;
    numerics.n = n;
    return characteristic_function_tracked(limit_regime(c), f, k, alpha, nu_for(c), numerics);
  };
  r.table.rows = sweep<AlphaK>(grid, workers, [&](const AlphaK& p) {
    const DetResult det = det_at(p.alpha, p.k, c.quad_n);
    const GaussianPrediction pred = limit_prediction(c, f, p.alpha);
    Row row{p.alpha, p.k, det.value, pred.cf(p.k), std::abs(det.log_value - pred.log_cf(p.k))};
    if (is_sine(c)) row.push_back(pred.literal_mean);
    return row;
  });
  const double top = grid.back().alpha;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].alpha != top) continue;
    r.checks.push_back(refine_check(
        "det_value at alpha=" + fmt(top) + ", k=" + fmt(grid[i].k) + ", n vs 2n",
        std::get<std::complex<double>>(r.table.rows[i][2]),
        det_at(top, grid[i].k, 2 * c.quad_n).value));
  }
}

void cmd_trace_powers(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  const TestFunction f = find_test_function(c.f_id);
  r.table.columns = {"alpha", "k", "n", "lhs", "thm12_C", "deviation"};
  struct Point {
    double alpha;
    double k;
    int n;
  };
  std::vector<Point> grid;
  for (const AlphaK& p : alpha_k_grid(c)) {
    for (int n : sorted(c.n_list)) grid.push_back({p.alpha, p.k, n});
  }
  auto lhs_at = [&](const Point& p, int grid_n) {
    const Symbol s = make_symbol(f, p.k);
    const DiscretizedOperator b = build_bessel_operator(s.as_even(), p.alpha, c.nu, grid_n);
    const DiscretizedOperator bn = build_bessel_operator(symbol_power(s, p.n), p.alpha, c.nu, grid_n);
    return op_trace_power(b, p.n) - op_trace(bn);
  };
  r.table.rows = sweep<Point>(grid, workers, [&](const Point& p) {
    const std::complex<double> lhs = lhs_at(p, c.quad_n);
    const std::complex<double> corr = thm12_correction(f, p.k, p.n);
    return Row{p.alpha, p.k, static_cast<long long>(p.n), lhs, corr, std::abs(lhs - corr)};
  });
  const double top = grid.back().alpha;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].alpha != top) continue;
    r.checks.push_back(refine_check("lhs at alpha=" + fmt(top) + ", k=" + fmt(grid[i].k) +
                                        ", n=" + std::to_string(grid[i].n) + ", grid vs 2x grid",
                                    std::get<std::complex<double>>(r.table.rows[i][3]),
                                    lhs_at(grid[i], 2 * c.quad_n)));
  }
}

// the second symbol of the identity pairs
std::string partner_id(const std::string& id) { return id == "gaussian" ? "cauchy" : "gaussian"; }

// identities use a fixed node density: quad_n nodes per 10 units of (0, alpha)
int identity_grid(const ExperimentConfig& c, double alpha, int density_factor) {
  return static_cast<int>(std::lround(density_factor * c.quad_n * alpha / 10.0));
}

void cmd_identities(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  const TestFunction f = find_test_function(c.f_id);
  const TestFunction g = find_test_function(partner_id(c.f_id));
  r.table.columns = {"alpha", "k", "n", "wh_plus_hw", "ww_plus_hh", "inverse",
                     "wh_plus_hw_interior", "ww_plus_hh_interior", "inverse_interior",
                     "one_sided", "one_sided_interior"};
  const std::vector<AlphaK> grid = alpha_k_grid(c);
  r.table.rows = sweep<AlphaK>(grid, workers, [&](const AlphaK& p) {
    const int n = identity_grid(c, p.alpha, 1);
    const IdentityResiduals res = identity_residuals(f, g, p.k, p.alpha, n);
    const OneSidedResidual one = one_sided_product_residual(f, p.k, p.k, p.alpha);
    return Row{p.alpha, p.k, static_cast<long long>(n), res.wh_plus_hw, res.ww_plus_hh,
               res.inverse, res.wh_plus_hw_interior, res.ww_plus_hh_interior,
               res.inverse_interior, one.full, one.interior};
  });

  // Kac's identity on random vectors of length 1..6
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double kac_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(static_cast<std::size_t>(1 + t % 6));
    for (double& x : a) x = unif(rng);
    const auto [lhs, rhs] = kac_identity_check(a);
    kac_worst = std::max(kac_worst, std::abs(lhs - rhs));
  }
  r.summary.emplace_back("symbol_pair", c.f_id + "," + partner_id(c.f_id));
  r.summary.emplace_back("kac_vectors", 100LL);
  r.summary.emplace_back("kac_max_abs_difference", kac_worst);
  double t_worst = 0.0;
  for (double pq : {0.25, 1.0 / 3.0}) {
    const double closed = t_weight(pq, pq).real();
    const double direct = t_weight_integral(pq, pq);
    r.summary.emplace_back("t_weight(" + fmt(pq) + ")", closed);
    r.summary.emplace_back("t_integral(" + fmt(pq) + ")", direct);
    t_worst = std::max(t_worst, std::abs(closed - direct));
  }
  r.summary.emplace_back("t_max_abs_difference", t_worst);
  r.checks.push_back(make_check("kac identity", kac_worst, 0.0, 1e-12));
  r.checks.push_back(make_check("t weight vs direct integral", t_worst, 0.0, 1e-6));

  // refinement at the smallest alpha, where the doubled grid stays affordable
  const AlphaK low = grid.front();
  const IdentityResiduals fine =
      identity_residuals(f, g, low.k, low.alpha, identity_grid(c, low.alpha, 2));
  r.checks.push_back(make_check("inverse residual at alpha=" + fmt(low.alpha) +
                                    ", density vs 2x density",
                                std::get<double>(r.table.rows.front()[5]), fine.inverse,
                                kResidualTolerance));
}

Ensemble finite_ensemble(const ExperimentConfig& c) {
  return is_sine(c) ? Ensemble::hermite : Ensemble::laguerre;
}

struct FinitePrediction {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::complex<double>> cf;
};

FinitePrediction finite_prediction(const ExperimentConfig& c, const TestFunction& f, int N,
                                   int grid_n) {
  const Ensemble ens = finite_ensemble(c);
  const double nu = nu_for(c);
  const DiscretizedOperator op = build_finite_n_operator(ens, f.as_even(), N, nu, grid_n);
  const DiscretizedOperator sq = build_finite_n_operator(ens, f.squared(), N, nu, grid_n);
  FinitePrediction p;
  p.mean = op_trace(op).real();
  p.variance = (op_trace(sq) - op_trace_power(op, 2)).real();
  CfNumerics numerics;
  numerics.n = grid_n;
  const Regime regime = is_sine(c) ? Regime::finite_n_hermite : Regime::finite_n_laguerre;
  for (double k : c.k_list) {
    p.cf.push_back(characteristic_function(regime, f, k, N, nu, numerics).value);
  }
  return p;
}

void cmd_montecarlo(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  const TestFunction f = find_test_function(c.f_id);
  r.table.columns = {"N",        "k",        "mean_hat", "mean_se",   "mean_pred",
                     "var_hat",  "var_se",   "var_pred", "cf_hat",    "cf_se_re",
                     "cf_se_im", "cf_pred"};
  const std::vector<int> Ns = sorted(c.N_list);
  std::string stream_rule;
  for (int N : Ns) {
    EnsembleSpec spec;
    spec.kind = finite_ensemble(c);
    spec.N = N;
    spec.nu = nu_for(c);
    spec.seed = c.seed;
    const McRunReport mc = estimate(spec, f, regime_for(spec.kind), c.k_list, c.mc_replicates, workers);
    stream_rule = mc.stream_rule;
    const FinitePrediction pred = finite_prediction(c, f, N, c.quad_n);
    for (std::size_t j = 0; j < c.k_list.size(); ++j) {
      r.table.rows.push_back(Row{static_cast<long long>(N), c.k_list[j], mc.mean.value, mc.mean.se,
                                 pred.mean, mc.variance.value, mc.variance.se, pred.variance,
                                 mc.cf[j].value, mc.cf[j].se_real, mc.cf[j].se_imag, pred.cf[j]});
    }
  }
  r.summary.emplace_back("ensemble", to_string(finite_ensemble(c)));
  r.summary.emplace_back("statistic_id", f.id);
  r.summary.emplace_back("replicate_count", static_cast<long long>(c.mc_replicates));
  r.summary.emplace_back("seed", std::to_string(c.seed));
  r.summary.emplace_back("stream_rule", stream_rule);

  const int top = Ns.back();
  const FinitePrediction fine = finite_prediction(c, f, top, 2 * c.quad_n);
  const std::size_t base = r.table.rows.size() - c.k_list.size();
  r.checks.push_back(refine_check("mean_pred at N=" + std::to_string(top) + ", n vs 2n",
                                  std::get<double>(r.table.rows[base][4]), fine.mean));
  r.checks.push_back(refine_check("var_pred at N=" + std::to_string(top) + ", n vs 2n",
                                  std::get<double>(r.table.rows[base][7]), fine.variance));
  for (std::size_t j = 0; j < c.k_list.size(); ++j) {
    r.checks.push_back(refine_check("cf_pred at N=" + std::to_string(top) + ", k=" + fmt(c.k_list[j]) + ", n vs 2n",
                                    std::get<std::complex<double>>(r.table.rows[base + j][11]),
                                    fine.cf[j]));
  }
}

void cmd_kernel_convergence(const ExperimentConfig& c, ExperimentReport& r, unsigned workers) {
  r.table.columns = {"N", "sup-norm distance"};
  const Ensemble ens = finite_ensemble(c);
  const double nu = nu_for(c);
  std::vector<double> pts(10);
  for (int i = 0; i < 10; ++i) pts[i] = 0.2 + 2.8 * i / 9.0;
  auto limit = [&](double x, double y) { return is_sine(c) ? sine_kernel(x, y) : bessel_kernel(nu, x, y); };
  const std::vector<int> Ns = sorted(c.N_list);
  r.table.rows = sweep<int>(Ns, workers, [&](const int& N) {
    double sup = 0.0;
    for (double x : pts) {
      for (double y : pts) {
        sup = std::max(sup, std::abs(rescaled_finite_n_kernel(ens, N, nu, x, y) - limit(x, y)));
      }
    }
    return Row{static_cast<long long>(N), sup};
  });
  // the two evaluation forms of the finite kernel at the largest N
  const int top = Ns.back();
  const double scale = ens == Ensemble::hermite ? 1.0 / std::sqrt(2.0 * top) : 1.0 / (4.0 * top);
  double worst = 0.0;
  double peak = 0.0;
  for (double x : pts) {
    for (double y : pts) {
      const double a = finite_n_kernel(ens, top, nu, scale * x, scale * y);
      const double b = finite_n_kernel_summed(ens, top, nu, scale * x, scale * y);
      worst = std::max(worst, std::abs(a - b));
      peak = std::max(peak, std::abs(b));
    }
  }
  r.checks.push_back(make_check("closed vs summed kernel at N=" + std::to_string(top), worst, 0.0,
                               kKernelFormTolerance * std::max(1.0, peak)));
}

template <typename T>
std::vector<T> read_list(const json& j, const char* key) {
  if (!j.is_array()) throw DomainError(std::string("config: ") + key + " must be a list");
  return j.get<std::vector<T>>();
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::mean: return "mean";
    case Command::variance: return "variance";
    case Command::cf: return "cf";
    case Command::trace_powers: return "trace_powers";
    case Command::identities: return "identities";
    case Command::montecarlo: return "montecarlo";
    case Command::kernel_convergence: return "kernel_convergence";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::mean, Command::variance, Command::cf, Command::trace_powers,
                    Command::identities, Command::montecarlo, Command::kernel_convergence}) {
    if (to_string(c) == name) return c;
  }
  throw DomainError("unknown command: " + name);
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> warnings;
  if (ensemble != "sine" && ensemble != "bessel") {
    throw DomainError("ensemble must be sine or bessel, got " + ensemble);
  }
  find_test_function(f_id);
  if (out_format != "csv" && out_format != "json") {
    throw DomainError("out_format must be csv or json, got " + out_format);
  }
  if (quad_n < 20 || quad_n > 300) throw DomainError("quad_n must lie in [20, 300]");
  if (ensemble == "sine") {
    if (nu != 0.0) warnings.push_back("nu is ignored for the sine ensemble");
    if (command == Command::trace_powers) {
      throw DomainError("trace_powers is defined for the bessel ensemble only");
    }
  } else if (!(nu >= -0.5 && nu <= 6.0)) {
    throw DomainError("nu must lie in [-1/2, 6] for the bessel ensemble");
  }
  const bool needs_alpha = command == Command::mean || command == Command::variance ||
                           command == Command::cf || command == Command::trace_powers ||
                           command == Command::identities;
  const bool needs_k = command == Command::cf || command == Command::trace_powers ||
                       command == Command::identities || command == Command::montecarlo;
  const bool needs_N = command == Command::montecarlo || command == Command::kernel_convergence;
  if (needs_alpha) {
    if (alpha_list.empty()) throw DomainError("alpha_list must be non-empty for " + to_string(command));
    for (double a : alpha_list) {
      if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("alpha values must be positive");
    }
  }
  if (needs_k) {
    if (k_list.empty()) throw DomainError("k_list must be non-empty for " + to_string(command));
    for (double k : k_list) {
      if (!std::isfinite(k)) throw DomainError("k values must be finite");
    }
  }
  if (needs_N) {
    if (N_list.empty()) throw DomainError("N_list must be non-empty for " + to_string(command));
    for (int N : N_list) {
      if (N < 1 || N > kMaxFiniteN) {
        throw DomainError("N values must lie in [1, " + std::to_string(kMaxFiniteN) + "]");
      }
    }
  }
  if (command == Command::trace_powers) {
    if (n_list.empty()) throw DomainError("n_list must be non-empty for trace_powers");
    for (int n : n_list) {
      if (n < 2 || n > 6) throw DomainError("n values must lie in [2, 6]");
    }
  }
  if (command == Command::montecarlo && mc_replicates < 100) {
    throw DomainError("mc_replicates must be at least 100");
  }
  return warnings;
}

std::string config_to_json(const ExperimentConfig& c) {
  // hand-assembled so floats carry 17 significant digits like the tables
  auto list = [](const auto& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += i ? ", " : "";
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>) {
        s += json_number(v[i]);
      } else {
        s += std::to_string(v[i]);
      }
    }
    return s + "]";
  };
  std::string s = "{";
  s += "\"command\": " + json_string(to_string(c.command));
  s += ", \"ensemble\": " + json_string(c.ensemble);
  s += ", \"f_id\": " + json_string(c.f_id);
  s += ", \"nu\": " + json_number(c.nu);
  s += ", \"alpha_list\": " + list(c.alpha_list);
  s += ", \"k_list\": " + list(c.k_list);
  s += ", \"N_list\": " + list(c.N_list);
  s += ", \"n_list\": " + list(c.n_list);
  s += ", \"mc_replicates\": " + std::to_string(c.mc_replicates);
  s += ", \"seed\": " + std::to_string(c.seed);
  s += ", \"quad_n\": " + std::to_string(c.quad_n);
  s += ", \"out_format\": " + json_string(c.out_format);
  s += ", \"out_path\": " + json_string(c.out_path);
  return s + "}";
}

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("config: top level must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = command_from_string(v.get<std::string>());
      else if (key == "ensemble") c.ensemble = v.get<std::string>();
      else if (key == "f_id") c.f_id = v.get<std::string>();
      else if (key == "nu") c.nu = v.get<double>();
      else if (key == "alpha_list") c.alpha_list = read_list<double>(v, "alpha_list");
      else if (key == "k_list") c.k_list = read_list<double>(v, "k_list");
      else if (key == "N_list") c.N_list = read_list<int>(v, "N_list");
      else if (key == "n_list") c.n_list = read_list<int>(v, "n_list");
      else if (key == "mc_replicates") c.mc_replicates = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "quad_n") c.quad_n = v.get<int>();
      else if (key == "out_format") c.out_format = v.get<std::string>();
      else if (key == "out_path") c.out_path = v.get<std::string>();
      else throw DomainError("config: unknown key " + key);
    }
  } catch (const json::type_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  return c;
}

double ConvergenceCheck::difference() const { return std::abs(fine - coarse); }

bool ExperimentReport::converged() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConvergenceCheck& c) { return c.passed(); });
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers) {
  ExperimentReport r;
  r.config = config;
  r.warnings = config.validate();
  if (workers == 0) workers = detail::default_workers();
  switch (config.command) {
    case Command::mean: cmd_mean(config, r, workers); break;
    case Command::variance: cmd_variance(config, r, workers); break;
    case Command::cf: cmd_cf(config, r, workers); break;
    case Command::trace_powers: cmd_trace_powers(config, r, workers); break;
    case Command::identities: cmd_identities(config, r, workers); break;
    case Command::montecarlo: cmd_montecarlo(config, r, workers); break;
    case Command::kernel_convergence: cmd_kernel_convergence(config, r, workers); break;
  }
  return r;
}

std::string render_csv(const ExperimentReport& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) {
    out << (i ? "," : "") << csv_cell(r.table.columns[i]);
  }
  out << '\n';
  for (const Row& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  for (const auto& [key, value] : r.summary) out << "# " << key << '=' << csv_cell(value) << '\n';
  return out.str();
}

std::string render_json(const ExperimentReport& r, bool manifest) {
  std::string s = "{\"command\": " + json_string(to_string(r.config.command));
  s += ", \"columns\": [";
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) {
    s += (i ? ", " : "") + json_string(r.table.columns[i]);
  }
  s += "], \"rows\": [";
  for (std::size_t k = 0; k < r.table.rows.size(); ++k) {
    s += k ? ",\n  {" : "\n  {";
    const Row& row = r.table.rows[k];
    for (std::size_t i = 0; i < row.size(); ++i) {
      s += (i ? ", " : "") + json_string(r.table.columns[i]) + ": " + json_cell(row[i]);
    }
    s += "}";
  }
  s += "], \"summary\": {";
  for (std::size_t i = 0; i < r.summary.size(); ++i) {
    s += (i ? ", " : "") + json_string(r.summary[i].first) + ": " + json_cell(r.summary[i].second);
  }
  s += "}, \"checks\": " + json_checks(r.checks);
  s += ", \"warnings\": [";
  for (std::size_t i = 0; i < r.warnings.size(); ++i) s += (i ? ", " : "") + json_string(r.warnings[i]);
  s += "]";
  if (manifest) s += ", \"config\": " + config_to_json(r.config);
  return s + "}\n";
}

std::string error_json(const std::string& kind, const std::string& message,
                       const std::vector<ConvergenceCheck>& checks) {
  return "{\"error\": " + json_string(kind) + ", \"message\": " + json_string(message) +
         ", \"checks\": " + json_checks(checks) + "}\n";
}

}  // namespace rmstat
