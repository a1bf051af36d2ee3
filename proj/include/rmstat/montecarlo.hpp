#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rmstat/operators.hpp"
#include "rmstat/symbols.hpp"

namespace rmstat {

struct EnsembleSpec {
  Ensemble kind = Ensemble::hermite;
  int N = 1;
  double nu = 0.0;  // laguerre only
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StatisticRegime { bulk_hermite, hardedge_laguerre };

StatisticRegime regime_for(Ensemble kind);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct ComplexEstimate {
  std::complex<double> value = 1.0;
  double se_real = 0.0;
  double se_imag = 0.0;
};

struct McRunReport {
  std::string statistic_id;
  int replicate_count = 0;
  Estimate mean;
  Estimate variance;
  std::vector<double> k_grid;
  std::vector<ComplexEstimate> cf;  // one per k_grid entry
  std::uint64_t seed = 0;
  std::string stream_rule;  // how replicate streams derive from the seed
};

using RngStream = std::mt19937_64;

/// Independent stream for replicate m, a pure function of (seed, m).
RngStream replicate_stream(std::uint64_t seed, std::uint64_t m);

/// Eigenvalues of one draw. Hermite: tridiagonal model with density
/// prod|x_i - x_j|^2 prod e^{-x_i^2}; laguerre: bidiagonal model with weight x^nu e^{-x}.
std::vector<double> sample_spectrum(const EnsembleSpec& spec, RngStream& rng);

/// Ascending eigenvalues of a symmetric tridiagonal matrix by implicit QL, with
/// Sturm bisection if QL exceeds 50 N iterations.
std::vector<double> tridiag_eigenvalues(std::span<const double> diag,
                                        std::span<const double> offdiag);

/// Same, always by Sturm bisection.
std::vector<double> tridiag_eigenvalues_bisection(std::span<const double> diag,
                                                  std::span<const double> offdiag);

/// sum f(x sqrt(2N)) for bulk_hermite, sum f(sqrt(4N x)) for hardedge_laguerre.
double linear_statistic(std::span<const double> eigs, const TestFunction& f,
                        StatisticRegime regime, int N);

/// Statistic values for replicates [0, M), in replicate order.
std::vector<double> sample_statistics(const EnsembleSpec& spec, const TestFunction& f,
                                      StatisticRegime regime, int M, unsigned workers = 0);

/// Mean, variance and cf(k) = (1/M) sum e^{ik S_m} with jackknife standard errors.
/// Depends only on (spec, f, regime, k_grid, M), never on `workers`.
McRunReport estimate(const EnsembleSpec& spec, const TestFunction& f, StatisticRegime regime,
                     std::span<const double> k_grid, int M, unsigned workers = 0);

/// Reduction of precomputed statistic values (the second half of estimate()).
McRunReport summarize(std::span<const double> statistics, std::span<const double> k_grid);

}  // namespace rmstat
