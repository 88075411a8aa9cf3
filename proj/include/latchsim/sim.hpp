#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "latchsim/joint.hpp"
#include "latchsim/metrics.hpp"
#include "latchsim/scenario.hpp"

namespace latchsim {

/// Constraint solver lost the joint (positional error beyond 50 mm in one
/// step). Reported as exit code 3 by the CLI.
struct SolverFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajRow {
    double t = 0.0;
    std::vector<double> values;  ///< aligned with RunResult::traj_columns[1..n-2]
    std::string phase;
};

struct RunResult {
    EventLog log;
    Metrics metrics;
    std::vector<std::string> traj_columns;  ///< "t_s", per-body pose/vel, forces, apertures, "phase"
    std::vector<TrajRow> rows;
};

/// Runs one scenario to completion. Deterministic: same scenario + seed give
/// a bit-identical result. Throws SolverFault on joint instability.
RunResult run(const Scenario& scn);

/// Renders the trajectory table as CSV (schema v1) or JSON lines.
std::string trajectory_csv(const RunResult& r);
std::string trajectory_jsonl(const RunResult& r);

}  // namespace latchsim
