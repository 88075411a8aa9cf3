#include "latchsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace latchsim {

void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

void write_run_outputs(const RunResult& result, const Scenario& scn,
                       const std::string& out_dir, const std::string& format) {
    fs::create_directories(out_dir);
    fs::path base = fs::path(out_dir) / scn.name;

    if (format == "jsonl")
        write_text_atomic(base.string() + "_trajectory.jsonl", trajectory_jsonl(result));
    else
        write_text_atomic(base.string() + "_trajectory.csv", trajectory_csv(result));

    write_text_atomic(base.string() + "_metrics.json",
                      result.metrics.to_json(scn.name, scn.seed).dump(2) + "\n");
    write_text_atomic(base.string() + "_events.jsonl", result.log.to_jsonl());
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct RunFiles {
    std::string name;
    nlohmann::json metrics;
    std::vector<nlohmann::json> events;
};

RunFiles load_run(const fs::path& metrics_path) {
    RunFiles r;
    std::string fname = metrics_path.filename().string();
    r.name = fname.substr(0, fname.size() - std::string("_metrics.json").size());

    std::ifstream min(metrics_path);
    r.metrics = nlohmann::json::parse(min);

    fs::path events_path = metrics_path.parent_path() / (r.name + "_events.jsonl");
    std::ifstream ein(events_path);
    if (!ein) throw std::runtime_error("missing '" + events_path.string() + "'");
    std::string line;
    while (std::getline(ein, line)) {
        if (line.empty()) continue;
        r.events.push_back(nlohmann::json::parse(line));
    }
    return r;
}

}  // namespace

std::string report_dir(const std::string& dir) {
    if (!fs::is_directory(dir))
        throw ValidationError("dir", "not a directory: '" + dir + "'");

    std::vector<fs::path> metric_files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string f = e.path().filename().string();
        if (f.size() > 13 && f.ends_with("_metrics.json")) metric_files.push_back(e.path());
    }
    std::sort(metric_files.begin(), metric_files.end());
    if (metric_files.empty())
        throw ValidationError("dir", "no run outputs (*_metrics.json) in '" + dir + "'");

    std::ostringstream table;
    table << "run                    latched  t_latch_s  missed  offset_err_deg  lat_dev_mm\n";

    for (const auto& mp : metric_files) {
        RunFiles run = load_run(mp);

        // per-tick realized towing offset, keyed by timestamp
        std::map<double, double> offset_at;
        for (const auto& ev : run.events)
            if (ev.value("type", "") == "towing_sample")
                offset_at[ev.value("t", 0.0)] = ev.value("realized_deg", 0.0);

        std::ostringstream plot;
        plot << "t_s,dx_mm,dy_mm,psi_deg,phase,offset_deg\n";
        for (const auto& ev : run.events) {
            if (ev.value("type", "") != "observation") continue;
            double t = ev.value("t", 0.0);
            plot << fmt(t) << "," << fmt(ev.value("dx_mm", 0.0)) << ","
                 << fmt(ev.value("dy_mm", 0.0)) << "," << fmt(ev.value("psi_deg", 0.0)) << ","
                 << ev.value("phase", "");
            auto it = offset_at.find(t);
            plot << "," << (it == offset_at.end() ? std::string() : fmt(it->second)) << "\n";
        }

        std::ostringstream bands;
        bands << "start_s,end_s,phase\n";
        double band_start = 0.0;
        std::string band_phase;
        double t_end = 0.0;
        for (const auto& ev : run.events) {
            std::string type = ev.value("type", "");
            double t = ev.value("t", 0.0);
            t_end = std::max(t_end, t);
            if (type == "observation" && band_phase.empty()) {
                band_phase = ev.value("phase", "");
                band_start = t;
            } else if (type == "phase") {
                if (!band_phase.empty())
                    bands << fmt(band_start) << "," << fmt(t) << "," << band_phase << "\n";
                band_phase = ev.value("to", "");
                band_start = t;
            }
        }
        if (!band_phase.empty())
            bands << fmt(band_start) << "," << fmt(t_end) << "," << band_phase << "\n";

        fs::path parent = mp.parent_path();
        write_text_atomic((parent / (run.name + "_plot.csv")).string(), plot.str());
        write_text_atomic((parent / (run.name + "_phases.csv")).string(), bands.str());

        const auto& m = run.metrics;
        char row[256];
        std::string t_latch = m.value("latched", false)
                                  ? fmt(m.value("time_to_latch_s", 0.0)) : std::string("-");
        std::string off_err = "-";
        if (m.contains("towing") && !m["towing"].is_null())
            off_err = fmt(m["towing"].value("mean_abs_error_deg", 0.0));
        std::string lat_dev = "-";
        if (m.contains("rigid_hold") && !m["rigid_hold"].is_null())
            lat_dev = fmt(m["rigid_hold"].value("max_lateral_dev_mm", 0.0));
        std::snprintf(row, sizeof(row), "%-22s %-8s %-10s %-7d %-15s %s\n",
                      run.name.c_str(), m.value("latched", false) ? "yes" : "no",
                      t_latch.c_str(), m.value("missed_target_count", 0),
                      off_err.c_str(), lat_dev.c_str());
        table << row;
    }
    return table.str();
}

}  // namespace latchsim
