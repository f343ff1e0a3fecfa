// Python bindings for the spincorr core.
#include "spincorr/experiments.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spincorr;

namespace {

DensityMatrix to_state(const Matrix4c& m) { return DensityMatrix(m); }

RunConfig config_from(const std::string& config_json) {
  return config_json.empty() ? RunConfig{} : parse_run_config(nlohmann::json::parse(config_json));
}

py::tuple experiment_tuple(const ExperimentResult& r) { return py::make_tuple(to_csv(r.rows), r.summary.dump()); }

}  // namespace

PYBIND11_MODULE(_spincorr, m) {
  m.doc() = "Two-qubit classical and quantum correlation dynamics";

  py::register_exception<InvalidState>(m, "InvalidState", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

  py::class_<BellCoeffs>(m, "BellCoeffs")
      .def(py::init<double, double, double>(), py::arg("c1") = 0.0, py::arg("c2") = 0.0, py::arg("c3") = 0.0)
      .def_readwrite("c1", &BellCoeffs::c1)
      .def_readwrite("c2", &BellCoeffs::c2)
      .def_readwrite("c3", &BellCoeffs::c3)
      .def("__repr__", [](const BellCoeffs& c) {
        return "BellCoeffs(" + std::to_string(c.c1) + ", " + std::to_string(c.c2) + ", " + std::to_string(c.c3) + ")";
      });

  py::class_<MeasurementBasis>(m, "MeasurementBasis")
      .def_readonly("theta", &MeasurementBasis::theta)
      .def_readonly("phi", &MeasurementBasis::phi);

  py::class_<ErrorBars>(m, "ErrorBars")
      .def_readonly("mutual", &ErrorBars::mutual)
      .def_readonly("classical", &ErrorBars::classical)
      .def_readonly("discord", &ErrorBars::discord);

  py::class_<CorrelationReport>(m, "CorrelationReport")
      .def_readonly("mutual_info", &CorrelationReport::mutual_info)
      .def_readonly("classical_corr", &CorrelationReport::classical_corr)
      .def_readonly("discord", &CorrelationReport::discord)
      .def_readonly("geo_discord", &CorrelationReport::geo_discord)
      .def_readonly("optimum", &CorrelationReport::optimum)
      .def_readonly("errors", &CorrelationReport::errors);

  m.def("analyze", [](const Matrix4c& rho) { return analyze(to_state(rho)); }, py::arg("rho"),
        "Mutual information, classical correlation, discord (bits) and geometric discord; measurement on B.");
  m.def("mutual_information", [](const Matrix4c& rho) { return mutual_information(to_state(rho)); }, py::arg("rho"));
  m.def("classical_correlation", [](const Matrix4c& rho) { return classical_correlation(to_state(rho)).bits; },
        py::arg("rho"));
  m.def("quantum_discord", [](const Matrix4c& rho) { return quantum_discord(to_state(rho)); }, py::arg("rho"));
  m.def("geometric_discord", [](const Matrix4c& rho) { return geometric_discord(to_state(rho)); }, py::arg("rho"));
  m.def(
      "error_bars",
      [](const Matrix4c& rho, const Eigen::Matrix4d& re, const Eigen::Matrix4d& im, int samples, std::uint64_t seed) {
        return correlation_error_bars(to_state(rho), ElementErrors{re, im}, samples, seed);
      },
      py::arg("rho"), py::arg("err_re"), py::arg("err_im"), py::arg("samples") = 1000, py::arg("seed") = 1);

  m.def("bell_state", [](const BellCoeffs& c) { return bell_diagonal_to_density(c).matrix(); }, py::arg("c"));
  m.def("bell_coefficients", [](const Matrix4c& rho) {
    const BellFit f = coeffs_from_density(to_state(rho));
    return py::make_tuple(f.c, f.residual);
  }, py::arg("rho"));
  m.def("mutual_information_bell", &mutual_information_analytic_bell, py::arg("c"));
  m.def("classical_correlation_bell", &classical_correlation_analytic_bell, py::arg("c"));
  m.def("discord_bell", &discord_analytic_bell, py::arg("c"));
  m.def("geometric_discord_bell", &geometric_discord_analytic, py::arg("c"));
  m.def("critical_time", [](double c2_0, double c3, double t_ns) { return critical_time(c2_0, c3, t_ns).t_ns; },
        py::arg("c2_0"), py::arg("c3"), py::arg("t_dephase_ns") = 175.0);

  m.def("thermal_state", [](double eps) { return thermal_state({eps}).matrix(); }, py::arg("epsilon") = 7.35e-3);
  m.def(
      "prepared_state",
      [](const std::string& config_json) {
        const RunConfig cfg = config_from(config_json);
        return prepare_state(cfg.prep.params(), cfg.physics).matrix();
      },
      py::arg("config_json") = "");

  m.def("_free_decay", [](const std::string& c) { return experiment_tuple(run_free_decay(config_from(c))); });
  m.def("_dd_preserve", [](const std::string& c) { return experiment_tuple(run_dd_preserve(config_from(c))); });
  m.def("_revival", [](const std::string& c) { return experiment_tuple(run_revival(config_from(c))); });
  m.def("_state_prep", [](const std::string& c) {
    const StatePrepResult r = run_state_prep(config_from(c));
    return py::make_tuple(r.text, r.summary.dump());
  });
}
