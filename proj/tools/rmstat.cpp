// rmstat: run one experiment and write its table as CSV or JSON.
//
// Exit codes: 0 ok, 2 bad usage or config, 3 self-convergence failed,
// 4 numerical failure inside a module.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rmstat/error.hpp"
#include "rmstat/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rmstat::DomainError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int fail(const std::string& kind, const std::string& message, int code,
         const std::vector<rmstat::ConvergenceCheck>& checks = {}) {
  std::cerr << rmstat::error_json(kind, message, checks);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear statistics of sine and Bessel ensembles"};
  app.set_help_flag("-h,--help", "Show usage");

  std::string command;
  std::string ensemble, f_id, format, out_path, config_path;
  double nu = 0.0;
  std::vector<double> alphas, ks;
  std::vector<int> Ns, ns;
  int replicates = 0, quad_n = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool manifest = false;

  app.add_option("command", command,
                 "mean | variance | cf | trace_powers | identities | montecarlo | kernel_convergence")
      ->required();
  auto* o_ensemble = app.add_option("--ensemble", ensemble, "sine | bessel");
  auto* o_f = app.add_option("--f", f_id, "gaussian | cauchy | bump | zero");
  auto* o_nu = app.add_option("--nu", nu, "Bessel order");
  auto* o_alpha = app.add_option("--alpha", alphas, "Comma-separated alpha values")->delimiter(',');
  auto* o_k = app.add_option("--k", ks, "Comma-separated k values")->delimiter(',');
  auto* o_N = app.add_option("--N", Ns, "Comma-separated matrix sizes")->delimiter(',');
  auto* o_n = app.add_option("--n", ns, "Comma-separated trace powers (trace_powers)")->delimiter(',');
  auto* o_reps = app.add_option("--mc-replicates", replicates, "Monte Carlo replicates");
  auto* o_seed = app.add_option("--seed", seed, "Monte Carlo seed");
  auto* o_quad = app.add_option("--quad-n", quad_n, "Operator grid size");
  auto* o_out = app.add_option("--out", out_path, "Output file (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv | json");
  app.add_option("--config", config_path, "JSON config; flags override it");
  app.add_option("--workers", workers, "Worker threads for sweep points (0: all cores)");
  app.add_flag("--manifest", manifest, "Emit the resolved config with the results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  rmstat::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = rmstat::config_from_json(read_file(config_path));
    config.command = rmstat::command_from_string(command);
    if (*o_ensemble) config.ensemble = ensemble;
    if (*o_f) config.f_id = f_id;
    if (*o_nu) config.nu = nu;
    if (*o_alpha) config.alpha_list = alphas;
    if (*o_k) config.k_list = ks;
    if (*o_N) config.N_list = Ns;
    if (*o_n) config.n_list = ns;
    if (*o_reps) config.mc_replicates = replicates;
    if (*o_seed) config.seed = seed;
    if (*o_quad) config.quad_n = quad_n;
    if (*o_out) config.out_path = out_path;
    if (*o_format) config.out_format = format;
    config.validate();
  } catch (const std::exception& e) {
    return fail("config", e.what(), 2);
  }

  rmstat::ExperimentReport report;
  try {
    report = rmstat::run_experiment(config, workers);
  } catch (const rmstat::DomainError& e) {
    return fail("domain", e.what(), 2);
  } catch (const rmstat::HypothesisError& e) {
    return fail("hypothesis", e.what(), 4);
  } catch (const rmstat::ResolutionError& e) {
    return fail("resolution", e.what(), 4);
  } catch (const rmstat::ConvergenceError& e) {
    return fail("convergence", e.what(), 4);
  } catch (const rmstat::SingularMatrixError& e) {
    return fail("singular", e.what(), 4);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 4);
  }

  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';

  std::string text;
  if (config.out_format == "json") {
    text = rmstat::render_json(report, manifest);
  } else {
    text = rmstat::render_csv(report);
    if (manifest) text += "# config=" + rmstat::config_to_json(config) + '\n';
  }
  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(config.out_path);
    if (!out) return fail("io", "cannot write " + config.out_path, 2);
    out << text;
  }

  if (!report.converged()) {
    return fail("self_convergence", "a refinement check exceeded its tolerance", 3, report.checks);
  }
  return 0;
}
