#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "paritygate/app.hpp"
#include "paritygate/config.hpp"
#include "paritygate/gates.hpp"
#include "paritygate/model.hpp"
#include "paritygate/noise.hpp"

namespace py = pybind11;
using namespace paritygate;

namespace {

// Returns (exit_code, summary_line, summary_json, files).
py::tuple run(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::optional<int> shots, int threads, bool no_vdw,
              bool no_stark, const std::vector<std::string>& errors, bool curves) {
  RunRequest req;
  req.subcommand = subcommand;
  req.config = load_config(config_path);
  req.out_dir = out_dir;
  req.seed = seed;
  req.shots = shots;
  req.threads = threads;
  req.no_vdw = no_vdw;
  req.no_stark = no_stark;
  req.errors = errors;
  req.curves = curves;
  RunReport r;
  {
    py::gil_scoped_release release;
    r = run_subcommand(req);
  }
  return py::make_tuple(r.exit_code, r.summary_line, json_text(r.summary), r.files);
}

double no_noise_fidelity(const std::string& gate_name, double omega_c_mhz, double omega_f_mhz, double alpha,
                         bool include_vdw) {
  SystemConfig system;
  const ParityGate gate = named_gate(gate_name);
  system.parity = gate.parity;
  system.omega_c = mhz(omega_c_mhz);
  system.include_vdw = include_vdw;
  TargetPulse pulse;
  pulse.omega_f = mhz(omega_f_mhz);
  pulse.alpha = alpha;
  pulse.rotation = gate.rotation;
  py::gil_scoped_release release;
  const ShotResult s = run_shot(system, pulse, gate, NoiseDraw{}, EnsembleOptions{});
  if (s.aborted) throw std::runtime_error(s.error);
  return s.fidelity;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parity-controlled Rydberg gate simulator";
  m.attr("version") = kToolVersion;
  m.attr("subcommands") = kSubcommands;

  m.def("run", &run, py::arg("subcommand"), py::arg("config"), py::arg("out_dir") = "",
        py::arg("seed") = py::none(), py::arg("shots") = py::none(), py::arg("threads") = 0,
        py::arg("no_vdw") = false, py::arg("no_stark") = false, py::arg("errors") = std::vector<std::string>{},
        py::arg("curves") = false);

  m.def("single_qubit_unitary",
        [](double gamma, double theta, double phi) { return single_qubit_unitary({gamma, theta, phi}); },
        py::arg("gamma"), py::arg("theta"), py::arg("phi"));
  m.def(
      "gate_unitary", [](const std::string& name) -> Eigen::MatrixXcd { return named_gate(name).unitary; },
      py::arg("name"), "8x8 unitary on |c1 c2 t>, c1 most significant");
  m.def(
      "parity_gate",
      [](const std::string& parity, double gamma, double theta, double phi) -> Eigen::MatrixXcd {
        return parity_gate(parse_parity(parity), {gamma, theta, phi}).unitary;
      },
      py::arg("parity"), py::arg("gamma"), py::arg("theta"), py::arg("phi"));

  m.def(
      "dipole_coupling_mhz",
      [](double c3_ghz_um3, double polar_angle, double distance_um) {
        return to_mhz(dipole_coupling(ghz_um(c3_ghz_um3), polar_angle, distance_um));
      },
      py::arg("c3_ghz_um3"), py::arg("polar_angle"), py::arg("distance_um"));
  m.def(
      "vdw_coupling_mhz",
      [](double c6_ghz_um6, double distance_um) { return to_mhz(vdw_coupling(ghz_um(c6_ghz_um6), distance_um)); },
      py::arg("c6_ghz_um6"), py::arg("distance_um"));

  m.def("no_noise_fidelity", &no_noise_fidelity, py::arg("gate"), py::arg("omega_c_mhz"), py::arg("omega_f_mhz"),
        py::arg("alpha"), py::arg("include_vdw") = true,
        "Endpoint fidelity of one noise-free trajectory (J = Delta = 2pi x 86 MHz, tau = 3 us).");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EnsembleAborted>(m, "EnsembleAborted", PyExc_RuntimeError);
  py::register_exception<StabilityError>(m, "StabilityError", PyExc_RuntimeError);
}
