#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace latchsim {

struct Event {
    double t = 0.0;
    std::string type;
    nlohmann::ordered_json data;
};

/// Time-ordered record of everything a run produced. Replayable: the metrics
/// are a pure function of this log.
struct EventLog {
    std::vector<Event> events;

    void add(double t, std::string type, nlohmann::ordered_json data = nlohmann::ordered_json::object()) {
        events.push_back({t, std::move(type), std::move(data)});
    }
    std::string to_jsonl() const;
};

struct Metrics {
    bool latched = false;
    double time_to_latch_s = std::numeric_limits<double>::infinity();
    double latch_dx_mm = 0.0, latch_dy_mm = 0.0, latch_yaw_deg = 0.0;
    int missed_target_count = 0;

    bool has_towing = false;
    double towing_commanded_deg = 0.0;
    double towing_mean_realized_deg = 0.0;
    double towing_mean_abs_err_deg = 0.0;
    double towing_window_s = 0.0;

    bool has_hold = false;
    double hold_max_lateral_dev_mm = 0.0;
    double hold_max_yaw_drift_deg = 0.0;
    double hold_window_s = 0.0;

    bool has_attenuation = false;
    double atten_input_amp_deg = 0.0;
    double atten_output_amp_deg = 0.0;
    double atten_ratio = 0.0;

    bool has_guiding = false;
    double guide_min_axis_mm = 0.0;
    double guide_final_axis_mm = 0.0;

    uint64_t steps = 0;
    double sim_duration_s = 0.0;

    nlohmann::ordered_json to_json(const std::string& scenario_name, uint64_t seed) const;
};

/// Folds a complete event log into the run metrics.
Metrics compute_metrics(const EventLog& log);

}  // namespace latchsim
