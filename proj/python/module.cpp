#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmstat/asymptotics.hpp"
#include "rmstat/error.hpp"
#include "rmstat/experiments.hpp"
#include "rmstat/fredholm.hpp"
#include "rmstat/montecarlo.hpp"

namespace py = pybind11;
using namespace rmstat;

namespace {

std::string run_json(const std::string& config_text) {
  const ExperimentConfig config = config_from_json(config_text);
  config.validate();
  ExperimentReport report;
  {
    py::gil_scoped_release release;
    report = run_experiment(config);
  }
  return render_json(report, true);
}

py::dict prediction_dict(const GaussianPrediction& p) {
  py::dict d;
  d["mean"] = p.mean;
  d["variance"] = p.variance;
  d["literal_mean"] = p.literal_mean;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rmstat, m) {
  m.doc() = "Bindings for the rmstat library";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("test_functions", [] {
    std::vector<std::string> ids;
    for (const auto& f : catalog()) ids.push_back(f.id);
    return ids;
  });

  m.def("sine_kernel", &sine_kernel, py::arg("x"), py::arg("y"));
  m.def("bessel_kernel", &bessel_kernel, py::arg("nu"), py::arg("x"), py::arg("y"));

  m.def(
      "sine_prediction",
      [](const std::string& f, double alpha) {
        return prediction_dict(sine_prediction(find_test_function(f), alpha));
      },
      py::arg("f"), py::arg("alpha"));
  m.def(
      "bessel_mean",
      [](const std::string& f, double alpha, double nu) {
        return bessel_mean(find_test_function(f), alpha, nu);
      },
      py::arg("f"), py::arg("alpha"), py::arg("nu"));
  m.def(
      "bessel_variance_cosine",
      [](const std::string& f) { return bessel_variance_cosine(find_test_function(f)); },
      py::arg("f"));
  m.def(
      "bessel_variance_mellin",
      [](const std::string& f) { return bessel_variance_mellin(find_test_function(f)); },
      py::arg("f"));

  m.def(
      "characteristic_function",
      [](const std::string& regime, const std::string& f, double k, double scale, double nu,
         int n, bool tracked) {
        const Regime r = regime_from_string(regime);
        const TestFunction tf = find_test_function(f);
        CfNumerics numerics;
        numerics.n = n;
        py::gil_scoped_release release;
        const DetResult det = tracked
                                  ? characteristic_function_tracked(r, tf, k, scale, nu, numerics)
                                  : characteristic_function(r, tf, k, scale, nu, numerics);
        return std::make_pair(det.value, det.log_value);
      },
      py::arg("regime"), py::arg("f"), py::arg("k"), py::arg("scale"), py::arg("nu") = 0.0,
      py::arg("n") = 200, py::arg("tracked") = true,
      "(det, log det) of I + operator(e^{ikf} - 1).");

  m.def(
      "montecarlo_statistics",
      [](const std::string& ensemble, const std::string& f, int N, int M, std::uint64_t seed,
         double nu) {
        EnsembleSpec spec;
        spec.kind = ensemble == "laguerre" ? Ensemble::laguerre : Ensemble::hermite;
        if (ensemble != "laguerre" && ensemble != "hermite")
          throw DomainError("ensemble must be hermite or laguerre");
        spec.N = N;
        spec.nu = nu;
        spec.seed = seed;
        spec.validate();
        const TestFunction tf = find_test_function(f);
        py::gil_scoped_release release;
        return sample_statistics(spec, tf, regime_for(spec.kind), M);
      },
      py::arg("ensemble"), py::arg("f"), py::arg("N"), py::arg("M"), py::arg("seed") = 12345,
      py::arg("nu") = 0.0);

  m.def("t_weight", &t_weight, py::arg("p"), py::arg("q"));
  m.def(
      "kac_identity_check",
      [](const std::vector<double>& a) { return kac_identity_check(a); }, py::arg("a"));

  m.def("run_json", &run_json, py::arg("config_json"));
}
