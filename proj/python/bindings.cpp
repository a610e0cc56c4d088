#include "ffkyp/cli.hpp"
#include "ffkyp/enlargement.hpp"
#include "ffkyp/gramians.hpp"
#include "ffkyp/lmi.hpp"
#include "ffkyp/reports.hpp"
#include "ffkyp/simulation.hpp"
#include "ffkyp/system_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ffkyp;

namespace {

// Systems cross the boundary as JSON text or the name "example1".
LpvSystem system_of(const std::string& spec) {
  if (spec == "example1") return example1_system();
  if (spec == "example1_consistent") return example1_consistent_system();
  return system_from_json(Json::parse(spec));
}

std::string analyze(const std::string& system, const std::string& range, const std::string& mode, double tol) {
  GammaOptions o;
  o.bisect_tol = tol;
  return to_json(min_gamma(system_of(system), FrequencyRange::parse(range), parse_mode(mode), o)).dump();
}

std::string enlarge(const std::string& system, const std::string& range, const std::string& stability,
                    std::optional<double> c1, std::optional<double> c2, double c3) {
  EnlargementOptions o;
  o.mode = parse_stability_mode(stability);
  o.c1 = c1;
  o.c2 = c2;
  o.c3 = c3;
  return to_json(recommend_range(system_of(system), FrequencyRange::parse(range), o)).dump();
}

std::string certify_uas(const std::string& system, double c3, std::optional<double> c1, std::optional<double> c2) {
  UasOptions o;
  o.c1 = c1;
  o.c2 = c2;
  return to_json(uas_certificate(system_of(system), c3, o)).dump();
}

py::dict simulate_py(const std::string& system, const std::string& signal, double t_end, double step,
                     const std::vector<std::string>& ranges) {
  const LpvSystem sys = system_of(system);
  const SimulationResult r =
      simulate(sys, default_schedule(sys.box()), BandLimitedSignal::parse(signal), t_end, step);
  py::dict out;
  out["t"] = r.times;
  out["u"] = r.u;
  out["x"] = r.x;
  out["y"] = r.y;
  out["gamma_R"] = performance_ratio(r);
  py::dict iqc;
  for (const auto& s : ranges) iqc[py::str(s)] = iqc_value(r, frequency_weight(FrequencyRange::parse(s))).final_value;
  out["iqc"] = iqc;
  return out;
}

py::tuple run(const std::vector<std::string>& args) {
  std::vector<std::string> full{"ffkyp"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = run_cli(full, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_ffkyp, m) {
  m.doc() = "Finite-frequency performance analysis of LTI and LPV systems";

  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  m.def("analyze", &analyze, py::arg("system"), py::arg("range") = "low:1", py::arg("mode") = "lpv_ff",
        py::arg("tol") = 1e-4, "Minimum certified gain as a JSON string.");
  m.def("enlarge", &enlarge, py::arg("system"), py::arg("range") = "low:1", py::arg("stability") = "uas",
        py::arg("c1") = py::none(), py::arg("c2") = py::none(), py::arg("c3") = 7.4);
  m.def("certify_uas", &certify_uas, py::arg("system"), py::arg("c3") = 7.4, py::arg("c1") = py::none(),
        py::arg("c2") = py::none());
  m.def("simulate", &simulate_py, py::arg("system"), py::arg("signal") = "cos:1:8,cos:1:10,cos:1:20",
        py::arg("t_end") = 60.0, py::arg("step") = 1e-3, py::arg("ranges") = std::vector<std::string>{"low:1"});
  m.def("gramian", [](const Matrix& A, const Matrix& B, const std::string& range, bool classical, int nodes) {
        GramianOptions o;
        o.classical_normalization = classical;
        o.quad_nodes = nodes;
        return gramian_lti_ff(A, B, FrequencyRange::parse(range), o);
      },
      py::arg("A"), py::arg("B"), py::arg("range"), py::arg("classical") = false, py::arg("nodes") = 201);
  m.def("delta_squared", [](double gap, double trace_w_p, double trace_w_dot_p, double trace_w_hat_p,
                            const std::string& stability) {
        return delta_squared(gap, {trace_w_p, trace_w_hat_p, trace_w_dot_p}, parse_stability_mode(stability));
      },
      py::arg("gap"), py::arg("trace_w_p"), py::arg("trace_w_dot_p"), py::arg("trace_w_hat_p") = 0.0,
      py::arg("stability") = "uas");
  m.def("enlarge_range", [](const std::string& range, double delta_sq) {
        return enlarge_range(FrequencyRange::parse(range), delta_sq).range.to_string();
      },
      py::arg("range"), py::arg("delta_squared"));
  m.def("gap_squared", [](const std::string& system, const std::string& range) {
        return gap_squared(system_of(system), FrequencyRange::parse(range));
      },
      py::arg("system"), py::arg("range"));
  m.def("uniform_spectral_radius", [](const std::string& system) { return uniform_spectral_radius(system_of(system)); },
        py::arg("system"));
  m.def("run_cli", &run, py::arg("args"), "Runs the command line in-process; returns (code, stdout, stderr).");
}
