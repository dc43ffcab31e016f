#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cczsim/calibration.hpp"
#include "cczsim/circuits.hpp"
#include "cczsim/couplings.hpp"
#include "cczsim/tomography.hpp"

namespace py = pybind11;
using namespace ccz;

namespace {

ExactOptions exact_options(const std::string& frame) {
  ExactOptions o;
  if (frame == "full") {
    o.frame = Frame::full;
  } else if (frame == "rwa") {
    o.frame = Frame::rwa;
  } else {
    throw InvalidArgument("frame must be 'full' or 'rwa'");
  }
  return o;
}

Mat8 to_mat8(const Eigen::Ref<const CMat>& m) {
  if (m.rows() != 8 || m.cols() != 8) throw DimensionMismatch("expected an 8x8 matrix");
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pulse-level simulation and calibration of a direct CCZ gate";

  auto base = py::register_exception<Error>(m, "CczError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ResonanceError>(m, "ResonanceError", base.ptr());
  py::register_exception<SignalLoss>(m, "SignalLoss", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<FitDegenerate>(m, "FitDegenerate", base.ptr());

  py::class_<DeviceConfig>(m, "Device")
      .def_static("reference", [] { return DeviceConfig{DeviceModel::reference(), NoiseSpec::reference()}; })
      .def_static("load", &load_device_config, py::arg("path"))
      .def_static("from_json", &parse_device_config, py::arg("text"))
      .def("to_json", &device_config_to_json)
      .def_property_readonly("hilbert_dim", [](const DeviceConfig& c) { return c.device.hilbert_dim(); });

  py::class_<CouplingReport>(m, "CouplingReport")
      .def_readonly("omega_c1_ghz", &CouplingReport::omega_c1_ghz)
      .def_readonly("omega_c2_ghz", &CouplingReport::omega_c2_ghz)
      .def_readonly("zeta12", &CouplingReport::zeta12)
      .def_readonly("zeta23", &CouplingReport::zeta23)
      .def_readonly("zeta13", &CouplingReport::zeta13)
      .def_readonly("zeta123_total", &CouplingReport::zeta123_total)
      .def_readonly("zeta_zzz_irreducible", &CouplingReport::zeta_zzz_irreducible)
      .def_readonly("flag", &CouplingReport::flag);

  m.def(
      "zeta_perturbative",
      [](const DeviceConfig& d, double c1, double c2) { return zeta_perturbative(d.device, c1, c2); },
      py::arg("device"), py::arg("omega_c1_ghz"), py::arg("omega_c2_ghz"),
      "Fourth-order perturbative couplings in MHz");
  m.def(
      "zeta_exact",
      [](const DeviceConfig& d, double c1, double c2, const std::string& frame) {
        return zeta_exact(d.device, c1, c2, exact_options(frame));
      },
      py::arg("device"), py::arg("omega_c1_ghz"), py::arg("omega_c2_ghz"), py::arg("frame") = "full",
      "Couplings from exact diagonalization in MHz");
  m.def(
      "find_idle_point",
      [](const DeviceConfig& d, const std::string& frame) {
        const IdlePoint p = find_idle_point(d.device, exact_options(frame));
        return py::make_tuple(p.omega_c1_ghz, p.omega_c2_ghz);
      },
      py::arg("device"), py::arg("frame") = "full", "Coupler frequencies (GHz) where zeta12 and zeta23 vanish");

  py::class_<PhaseSet>(m, "PhaseSet")
      .def_readonly("phi12", &PhaseSet::phi12)
      .def_readonly("phi23", &PhaseSet::phi23)
      .def_readonly("phi13", &PhaseSet::phi13)
      .def_readonly("phi123", &PhaseSet::phi123)
      .def_readonly("phi_ccz", &PhaseSet::phi_ccz);
  m.def(
      "conditional_phases", [](const Eigen::Ref<const CMat>& u) { return conditional_phases(to_mat8(u)); },
      py::arg("evolution"), "Conditional phases of an 8x8 evolution");

  py::class_<OperatingPoint>(m, "OperatingPoint")
      .def_readonly("amp_c1", &OperatingPoint::amp_c1)
      .def_readonly("amp_c2", &OperatingPoint::amp_c2)
      .def_readonly("tau", &OperatingPoint::tau)
      .def_readonly("leakage", &OperatingPoint::leakage)
      .def_readonly("phases", &OperatingPoint::phases);
  m.def(
      "evaluate_operating_point",
      [](const DeviceConfig& d, double a1, double a2, double window) {
        py::gil_scoped_release release;
        const GateSimulator sim = idle_gate_simulator(d.device, d.noise);
        return evaluate_operating_point(sim, a1, a2, window);
      },
      py::arg("device"), py::arg("amp_c1"), py::arg("amp_c2"), py::arg("window") = 150.0,
      "Leakage and conditional phases of the first CCZ segment (amplitudes in GHz from idle)");

  m.def(
      "process_fidelity_unitary",
      [](const Eigen::Ref<const CMat>& a, const Eigen::Ref<const CMat>& b) {
        return process_fidelity(ideal_chi(to_mat8(a)), ideal_chi(to_mat8(b)));
      },
      py::arg("a"), py::arg("b"), "Chi-matrix process fidelity between two 8x8 unitaries");

  m.def("rb_fidelity", &rb_fidelity, py::arg("p_ref"), py::arg("p_gate"), py::arg("d"));
  m.def(
      "fit_rb_decay",
      [](const std::vector<double>& depths, const std::vector<double>& survival) {
        const RbFit f = fit_rb_decay(depths, survival);
        return py::make_tuple(f.a, f.p, f.b);
      },
      py::arg("depths"), py::arg("survival"), "Returns (A, p, B) of A p^m + B");
  m.def(
      "grover_ideal",
      [](const std::string& target, int iterations) {
        const RVec p = grover(target, iterations, CircuitMode::ideal);
        return std::vector<double>(p.data(), p.data() + p.size());
      },
      py::arg("target") = "111", py::arg("iterations") = 2, "Outcome distribution over |000>..|111>");
  m.def("optimal_grover_iterations", &optimal_grover_iterations, py::arg("n_items"));
}
