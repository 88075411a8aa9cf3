#pragma once

#include <string>

#include "latchsim/sim.hpp"

namespace latchsim {

/// Writes trajectory/metrics/events for one finished run into out_dir.
/// format is "csv" or "jsonl" (trajectory encoding). Files are written to a
/// temp name and renamed, so readers never see partial output.
void write_run_outputs(const RunResult& result, const Scenario& scn,
                       const std::string& out_dir, const std::string& format);

/// Digests a directory of run outputs: returns a plain-text summary table
/// and writes <name>_plot.csv (t, d_x, d_y, psi, phase, offset) and
/// <name>_phases.csv (phase bands) next to the inputs.
/// Throws ValidationError when the directory holds no run outputs.
std::string report_dir(const std::string& dir);

void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace latchsim
