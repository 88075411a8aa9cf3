// Python bindings for the latchsim core. The module exposes the file-level
// operations (run, validate) plus the small pure functions that are useful
// for analysis scripts: thruster allocation, the latch gate, and the dipole
// field helpers. Structured data crosses the boundary as JSON text; the
// Python package wraps it with json.loads so the C++ side never depends on
// Python containers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latchsim/allocation.hpp"
#include "latchsim/control.hpp"
#include "latchsim/funnel.hpp"
#include "latchsim/scenario.hpp"
#include "latchsim/sensors.hpp"
#include "latchsim/sim.hpp"

namespace py = pybind11;
using namespace latchsim;

namespace {

/// Owns one finished run; string accessors render the artifacts on demand.
struct RunHandle {
    std::string scenario_name;
    uint64_t seed = 0;
    RunResult result;

    std::string metrics_json() const {
        return result.metrics.to_json(scenario_name, seed).dump(2);
    }
    std::string csv() const { return trajectory_csv(result); }
    std::string jsonl() const { return trajectory_jsonl(result); }
    std::string events() const { return result.log.to_jsonl(); }
};

RunHandle run_file(const std::string& path, std::optional<uint64_t> seed) {
    Scenario scn = load_scenario(path);
    if (seed) {
        scn.seed = *seed;
        scn.disturbance.seed = *seed;
    }
    RunHandle h;
    h.scenario_name = scn.name;
    h.seed = scn.seed;
    h.result = run(scn);
    return h;
}

std::string validate_file(const std::string& path) {
    Scenario scn = load_scenario(path);
    return scenario_to_json(scn).dump(2);
}

std::vector<double> py_wrench_to_forces(double fx, double fy, double mz) {
    ThrusterForces u = wrench_to_forces(AllocationModel{}, Vec3{fx, fy, mz});
    return {u[0], u[1], u[2], u[3]};
}

py::tuple py_forces_to_wrench(const std::vector<double>& forces) {
    if (forces.size() != 4)
        throw std::invalid_argument("forces_to_wrench expects exactly 4 thruster forces");
    ThrusterForces u{forces[0], forces[1], forces[2], forces[3]};
    Vec3 tau = forces_to_wrench(AllocationModel{}, u);
    return py::make_tuple(tau.x, tau.y, tau.z);
}

bool py_latch_gate(double d_x_mm, double d_y_mm, double yaw_rel_deg) {
    return latch_gate(d_x_mm, d_y_mm, yaw_rel_deg, ControllerThresholds{});
}

}  // namespace

PYBIND11_MODULE(_latchsim, m) {
    m.doc() = "Deterministic planar latching simulator (C++ core)";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SolverFault>(m, "SolverFault", PyExc_RuntimeError);

    py::class_<RunHandle>(m, "RunResult")
        .def_readonly("scenario_name", &RunHandle::scenario_name)
        .def_readonly("seed", &RunHandle::seed)
        .def("metrics_json", &RunHandle::metrics_json,
             "Run metrics as a JSON document (schema_version 1).")
        .def("trajectory_csv", &RunHandle::csv,
             "Trajectory table as CSV text (schema v1).")
        .def("trajectory_jsonl", &RunHandle::jsonl,
             "Trajectory table as JSON lines, one object per control tick.")
        .def("events_jsonl", &RunHandle::events,
             "Full event log as JSON lines.");

    m.def("run_file", &run_file, py::arg("path"), py::arg("seed") = py::none(),
          py::call_guard<py::gil_scoped_release>(),
          "Load a scenario file (.toml or .json), run it to completion, and "
          "return a RunResult. `seed` overrides both the scenario seed and "
          "the disturbance seed.");

    m.def("validate_file", &validate_file, py::arg("path"),
          "Load and validate a scenario file, returning the normalized "
          "scenario as a JSON document. Raises ValidationError on bad input.");

    m.def("wrench_to_forces", &py_wrench_to_forces,
          py::arg("fx"), py::arg("fy"), py::arg("mz"),
          "Minimum-norm thruster forces [f1..f4] for a body wrench, scaled "
          "uniformly if any thruster would exceed its limit.");

    m.def("forces_to_wrench", &py_forces_to_wrench, py::arg("forces"),
          "Body wrench (fx, fy, mz) produced by four thruster forces.");

    m.def("latch_gate", &py_latch_gate,
          py::arg("d_x_mm"), py::arg("d_y_mm"), py::arg("yaw_rel_deg"),
          "True when the relative pose is inside the default capture gate.");

    m.def("calibrate_moment", &calibrate_moment,
          py::arg("distance_m"), py::arg("field_ut"),
          "Dipole moment that produces `field_ut` on-axis at `distance_m`.");

    m.def("on_axis_field_ut", &on_axis_field_ut,
          py::arg("moment"), py::arg("distance_m"),
          "On-axis field magnitude in microtesla at `distance_m`.");

    m.def("acceptance_area_mm2",
          []() { return FunnelGeometry{}.acceptance_area_mm2(); },
          "Mouth acceptance area of the default funnel geometry.");
}
