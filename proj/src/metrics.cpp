#include "latchsim/metrics.hpp"

#include <cmath>
#include <sstream>

namespace latchsim {

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : events) {
        nlohmann::ordered_json line;
        line["t"] = e.t;
        line["type"] = e.type;
        for (auto it = e.data.begin(); it != e.data.end(); ++it) line[it.key()] = it.value();
        out << line.dump() << "\n";
    }
    return out.str();
}

Metrics compute_metrics(const EventLog& log) {
    Metrics m;
    double tow_sum = 0.0, tow_abs_err = 0.0, tow_t0 = 0.0, tow_t1 = 0.0;
    uint64_t tow_n = 0;
    double hold_t0 = 0.0, hold_t1 = 0.0;
    bool saw_hold = false;
    double atten_in = 0.0, atten_out = 0.0;
    bool saw_atten = false;

    for (const auto& e : log.events) {
        if (e.type == "latch") {
            m.latched = true;
            m.time_to_latch_s = e.t;
            m.latch_dx_mm = e.data.value("dx_mm", 0.0);
            m.latch_dy_mm = e.data.value("dy_mm", 0.0);
            m.latch_yaw_deg = e.data.value("yaw_rel_deg", 0.0);
        } else if (e.type == "miss") {
            ++m.missed_target_count;
        } else if (e.type == "towing_sample") {
            double realized = e.data.value("realized_deg", 0.0);
            double commanded = e.data.value("commanded_deg", 0.0);
            m.towing_commanded_deg = commanded;
            tow_sum += realized;
            tow_abs_err += std::abs(realized - commanded);
            if (tow_n == 0) tow_t0 = e.t;
            tow_t1 = e.t;
            ++tow_n;
        } else if (e.type == "hold_sample") {
            double dev = std::abs(e.data.value("lateral_dev_mm", 0.0));
            double drift = std::abs(e.data.value("yaw_drift_deg", 0.0));
            if (!saw_hold) hold_t0 = e.t;
            hold_t1 = e.t;
            saw_hold = true;
            m.hold_max_lateral_dev_mm = std::max(m.hold_max_lateral_dev_mm, dev);
            m.hold_max_yaw_drift_deg = std::max(m.hold_max_yaw_drift_deg, drift);
        } else if (e.type == "attenuation_sample") {
            saw_atten = true;
            atten_in = std::max(atten_in, std::abs(e.data.value("pitch_in_deg", 0.0)));
            atten_out = std::max(atten_out, std::abs(e.data.value("pitch_out_deg", 0.0)));
        } else if (e.type == "guide_sample") {
            double axis = e.data.value("axis_dist_mm", 0.0);
            if (!m.has_guiding) m.guide_min_axis_mm = axis;
            m.has_guiding = true;
            m.guide_min_axis_mm = std::min(m.guide_min_axis_mm, axis);
            m.guide_final_axis_mm = axis;
        } else if (e.type == "end") {
            m.steps = e.data.value("steps", uint64_t{0});
            m.sim_duration_s = e.t;
        }
    }

    if (tow_n > 0) {
        m.has_towing = true;
        m.towing_mean_realized_deg = tow_sum / static_cast<double>(tow_n);
        m.towing_mean_abs_err_deg = tow_abs_err / static_cast<double>(tow_n);
        m.towing_window_s = tow_t1 - tow_t0;
    }
    if (saw_hold) {
        m.has_hold = true;
        m.hold_window_s = hold_t1 - hold_t0;
    }
    if (saw_atten && atten_in > 0.0) {
        m.has_attenuation = true;
        m.atten_input_amp_deg = atten_in;
        m.atten_output_amp_deg = atten_out;
        m.atten_ratio = atten_out / atten_in;
    }
    return m;
}

nlohmann::ordered_json Metrics::to_json(const std::string& scenario_name, uint64_t seed) const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["trajectory_schema"] = "v1";
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["latched"] = latched;
    if (latched) {
        j["time_to_latch_s"] = time_to_latch_s;
        j["latch_dx_mm"] = latch_dx_mm;
        j["latch_dy_mm"] = latch_dy_mm;
        j["latch_yaw_deg"] = latch_yaw_deg;
    } else {
        j["time_to_latch_s"] = nullptr;  // no-latch sentinel
        j["latch_dx_mm"] = nullptr;
        j["latch_dy_mm"] = nullptr;
        j["latch_yaw_deg"] = nullptr;
    }
    j["missed_target_count"] = missed_target_count;
    if (has_towing) {
        j["towing"] = {{"commanded_offset_deg", towing_commanded_deg},
                       {"mean_realized_offset_deg", towing_mean_realized_deg},
                       {"mean_abs_error_deg", towing_mean_abs_err_deg},
                       {"window_s", towing_window_s}};
    } else {
        j["towing"] = nullptr;
    }
    if (has_hold) {
        j["rigid_hold"] = {{"max_lateral_dev_mm", hold_max_lateral_dev_mm},
                           {"max_rel_yaw_drift_deg", hold_max_yaw_drift_deg},
                           {"window_s", hold_window_s}};
    } else {
        j["rigid_hold"] = nullptr;
    }
    if (has_attenuation) {
        j["attenuation"] = {{"input_amplitude_deg", atten_input_amp_deg},
                            {"output_amplitude_deg", atten_output_amp_deg},
                            {"ratio", atten_ratio},
                            {"validating", false}};
    } else {
        j["attenuation"] = nullptr;
    }
    if (has_guiding) {
        j["guiding"] = {{"min_axis_dist_mm", guide_min_axis_mm},
                        {"final_axis_dist_mm", guide_final_axis_mm}};
    } else {
        j["guiding"] = nullptr;
    }
    j["steps"] = steps;
    j["sim_duration_s"] = sim_duration_s;
    return j;
}

}  // namespace latchsim
