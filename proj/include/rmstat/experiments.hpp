#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rmstat {

enum class Command { mean, variance, cf, trace_powers, identities, montecarlo, kernel_convergence };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

struct ExperimentConfig {
  Command command = Command::mean;
  std::string ensemble = "bessel";  // sine | bessel
  std::string f_id = "gaussian";
  double nu = 0.0;
  std::vector<double> alpha_list{10.0, 20.0, 40.0};
  std::vector<double> k_list{0.2};
  std::vector<int> N_list{25, 50, 100, 200};
  std::vector<int> n_list{2, 3};  // trace_powers
  int mc_replicates = 20000;
  std::uint64_t seed = 12345;
  int quad_n = 200;
  std::string out_format = "csv";
  std::string out_path;  // empty: stdout

  /// Throws DomainError on a bad config; returns warnings (nu under sine).
  std::vector<std::string> validate() const;
};

/// JSON round trip with keys named like the fields. Missing keys keep `base`.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});

using Cell = std::variant<double, std::complex<double>, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// A quantity recomputed on a finer grid (or by a second route).
struct ConvergenceCheck {
  std::string name;
  std::complex<double> coarse = 0.0;
  std::complex<double> fine = 0.0;
  double tolerance = 0.0;

  double difference() const;
  bool passed() const { return difference() < tolerance; }
};

struct ExperimentReport {
  ExperimentConfig config;
  Table table;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<ConvergenceCheck> checks;
  std::vector<std::string> warnings;

  bool converged() const;
};

/// Runs one command. Sweep points go to `workers` threads (0: hardware default);
/// rows come back in sweep order, so the report does not depend on it.
ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// Header row, then one line per row; complex cells as re+imj. Summary entries
/// follow as "# key=value" lines. 17 significant digits throughout.
std::string render_csv(const ExperimentReport& report);

/// {"command", "columns", "rows": [{column: value}], "summary", "checks", "warnings"},
/// complex values as {"re", "im"}; "config" is added when `manifest` is set.
std::string render_json(const ExperimentReport& report, bool manifest);

/// {"error": kind, "message": ..., "checks": [...]} for failed runs.
std::string error_json(const std::string& kind, const std::string& message,
                       const std::vector<ConvergenceCheck>& checks = {});

}  // namespace rmstat
