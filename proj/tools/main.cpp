#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "latchsim/report.hpp"
#include "latchsim/sim.hpp"
#include "latchsim/toml_lite.hpp"

using namespace latchsim;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("LATCHSIM_LOG");
    if (!env) return LogLevel::info;
    std::string v(env);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
}

std::mutex g_out_mutex;

void say(LogLevel at_least, const std::string& msg) {
    if (log_level() < at_least) return;
    std::lock_guard<std::mutex> lock(g_out_mutex);
    std::cerr << msg << "\n";
}

void fail(const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_out_mutex);
    std::cerr << "error: " << msg << "\n";
}

/// Runs one scenario file end to end. Returns the per-scenario exit code.
int run_one(const std::string& path, const std::string& out_dir,
            std::optional<uint64_t> seed_override, const std::string& format) {
    std::string name = path;
    try {
        Scenario scn = load_scenario(path);
        if (seed_override) {
            scn.seed = *seed_override;
            scn.disturbance.seed = *seed_override;
        }
        name = scn.name;
        say(LogLevel::debug, name + ": loaded from " + path + ", seed " + std::to_string(scn.seed));

        RunResult res = run(scn);
        write_run_outputs(res, scn, out_dir, format);

        std::string latch = res.metrics.latched
                                ? "latched at " + std::to_string(res.metrics.time_to_latch_s) + " s"
                                : "not latched";
        say(LogLevel::info, name + ": " + latch + ", " + std::to_string(res.metrics.steps) + " steps");
        return 0;
    } catch (const ParseError& e) {
        fail(path + ": " + e.what());
        return 2;
    } catch (const ValidationError& e) {
        fail(path + ": " + e.what());
        return 2;
    } catch (const SolverFault& e) {
        fail(name + ": solver fault: " + e.what());
        return 3;
    } catch (const std::exception& e) {
        fail(path + ": " + e.what());
        return 2;
    }
}

int cmd_run(const std::vector<std::string>& paths, const std::string& out_dir,
            std::optional<uint64_t> seed_override, unsigned jobs, const std::string& format) {
    if (jobs == 0) jobs = 1;
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(paths.size()));

    std::vector<int> codes(paths.size(), 0);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < paths.size(); i = next.fetch_add(1))
            codes[i] = run_one(paths[i], out_dir, seed_override, format);
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int exit_code = 0;
    for (int c : codes)
        if (c == 3 || (c == 2 && exit_code != 3)) exit_code = c;
    return exit_code;
}

int cmd_validate(const std::string& path) {
    try {
        Scenario scn = load_scenario(path);
        std::cout << scenario_to_json(scn).dump(2) << "\n";
        return 0;
    } catch (const ParseError& e) {
        fail(path + ": " + e.what());
        return 2;
    } catch (const std::exception& e) {
        fail(path + ": " + e.what());
        return 2;
    }
}

int cmd_report(const std::string& dir) {
    try {
        std::cout << report_dir(dir);
        return 0;
    } catch (const std::exception& e) {
        fail(e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar latching/towing simulator for autonomous surface robots"};
    app.require_subcommand(1);

    std::vector<std::string> scenario_paths;
    std::string out_dir = "out";
    std::string format = "csv";
    std::optional<uint64_t> seed_override;
    unsigned jobs = 1;

    auto* run_cmd = app.add_subcommand("run", "Simulate one or more scenario files");
    run_cmd->add_option("scenarios", scenario_paths, "Scenario files (.toml or .json)")
        ->required()
        ->expected(-1);
    run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run_cmd->add_option("--seed", seed_override, "Override the scenario seed");
    run_cmd->add_option("--jobs", jobs, "Parallel workers for batch runs")->capture_default_str();
    run_cmd->add_option("--format", format, "Trajectory encoding")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario, print its normalized form");
    validate_cmd->add_option("scenario", validate_path, "Scenario file")->required();

    std::string report_path;
    auto* report_cmd = app.add_subcommand("report", "Summarize a directory of run outputs and write plot data");
    report_cmd->add_option("dir", report_path, "Directory holding run outputs")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return cmd_run(scenario_paths, out_dir, seed_override, jobs, format);
    if (validate_cmd->parsed()) return cmd_validate(validate_path);
    return cmd_report(report_path);
}
