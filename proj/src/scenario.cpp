#include "latchsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "latchsim/toml_lite.hpp"

namespace latchsim {

namespace {

using nlohmann::json;

/// Reads one config table, tracking which keys were consumed so that typos
/// and unknown fields are rejected with the field name.
class TableReader {
public:
    TableReader(json obj, std::string prefix) : obj_(std::move(obj)), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) throw ValidationError(prefix_, "expected a table");
    }

    double number(const std::string& key, double def) {
        if (!obj_.contains(key)) return def;
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_number()) throw ValidationError(path(key), "expected a number");
        return v.get<double>();
    }

    double required_number(const std::string& key) {
        if (!obj_.contains(key)) throw ValidationError(path(key), "missing required field");
        return number(key, 0.0);
    }

    long long integer(const std::string& key, long long def) {
        if (!obj_.contains(key)) return def;
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) throw ValidationError(path(key), "expected an integer");
        return v.get<long long>();
    }

    std::string str(const std::string& key, const std::string& def) {
        if (!obj_.contains(key)) return def;
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_string()) throw ValidationError(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::string required_str(const std::string& key) {
        if (!obj_.contains(key)) throw ValidationError(path(key), "missing required field");
        return str(key, "");
    }

    bool boolean(const std::string& key, bool def) {
        if (!obj_.contains(key)) return def;
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_boolean()) throw ValidationError(path(key), "expected a boolean");
        return v.get<bool>();
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        mark(key);
        return obj_.at(key);
    }

    /// Call after all reads: any unconsumed key is a schema violation.
    void finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!used_.count(it.key()))
                throw ValidationError(path(it.key()), "unknown field");
    }

private:
    void mark(const std::string& key) { used_.insert(key); }
    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    json obj_;
    std::string prefix_;
    std::set<std::string> used_;
};

BodyKind parse_kind(const std::string& s, const std::string& field) {
    if (s == "robot") return BodyKind::robot;
    if (s == "dummy") return BodyKind::dummy;
    if (s == "dock") return BodyKind::dock;
    throw ValidationError(field, "unknown body kind '" + s + "'");
}

Mission parse_mission(const std::string& s, const std::string& field) {
    if (s == "latch") return Mission::latch;
    if (s == "latch_tow_straight") return Mission::latch_tow_straight;
    if (s == "latch_tow_offset") return Mission::latch_tow_offset;
    if (s == "guide_only") return Mission::guide_only;
    throw ValidationError(field, "unknown mission '" + s + "'");
}

BodySpec parse_body(const json& obj, size_t idx) {
    std::string prefix = "body[" + std::to_string(idx) + "]";
    TableReader r(obj, prefix);
    BodySpec b;
    b.id = r.required_str("id");
    b.kind = parse_kind(r.str("kind", "dummy"), prefix + ".kind");
    b.pose.p = {r.number("x_mm", 0.0) / 1000.0, r.number("y_mm", 0.0) / 1000.0};
    b.pose.yaw = deg2rad(r.number("yaw_deg", 0.0));
    b.velocity_body = {r.number("u_mmps", 0.0) / 1000.0, r.number("v_mmps", 0.0) / 1000.0};
    b.yaw_rate = deg2rad(r.number("r_degps", 0.0));
    b.params.mass = r.number("mass_kg", 35.0);
    b.params.yaw_inertia = r.number("yaw_inertia_kgm2", 3.0);
    b.params.linear_drag = {r.number("drag_u_nspm", 20.0), r.number("drag_v_nspm", 40.0)};
    b.params.yaw_drag = r.number("yaw_drag_nms", 5.0);
    b.params.hull_dims_mm = {r.number("hull_x_mm", 1000.0), r.number("hull_y_mm", 500.0),
                             r.number("hull_z_mm", 250.0)};
    r.finish();
    try {
        b.params.validate();
    } catch (const std::exception& e) {
        throw ValidationError(prefix, e.what());
    }
    return b;
}

}  // namespace

const char* to_string(Mission m) {
    switch (m) {
        case Mission::latch: return "latch";
        case Mission::latch_tow_straight: return "latch_tow_straight";
        case Mission::latch_tow_offset: return "latch_tow_offset";
        case Mission::guide_only: return "guide_only";
    }
    return "?";
}

const char* to_string(BodyKind k) {
    switch (k) {
        case BodyKind::robot: return "robot";
        case BodyKind::dummy: return "dummy";
        case BodyKind::dock: return "dock";
    }
    return "?";
}

int Scenario::body_index(const std::string& id) const {
    for (size_t i = 0; i < bodies.size(); ++i)
        if (bodies[i].id == id) return static_cast<int>(i);
    return -1;
}

Scenario scenario_from_json(const json& tree) {
    if (!tree.is_object()) throw ValidationError("", "config root must be a table");
    for (auto it = tree.begin(); it != tree.end(); ++it) {
        static const std::set<std::string> known = {
            "scenario", "disturbance", "body", "robot", "funnel", "compliance",
            "thresholds", "gains", "allocation", "tag", "pin", "magnet", "latch_pair",
            "towing", "capture"};
        if (!known.count(it.key())) throw ValidationError(it.key(), "unknown table");
    }

    Scenario s;
    {
        TableReader r(tree.value("scenario", json::object()), "scenario");
        s.name = r.required_str("name");
        s.duration_s = r.number("duration_s", 30.0);
        s.dt_s = r.number("dt_s", 1e-3);
        s.control_dt_s = r.number("control_dt_s", 0.05);
        s.seed = static_cast<uint64_t>(r.integer("seed", 0));
        s.mission = parse_mission(r.str("mission", "latch"), "scenario.mission");
        r.finish();
    }
    if (!(s.duration_s >= 0.0)) throw ValidationError("scenario.duration_s", "must be >= 0");
    if (!(s.dt_s > 0.0)) throw ValidationError("scenario.dt_s", "must be > 0");
    if (!(s.control_dt_s > 0.0)) throw ValidationError("scenario.control_dt_s", "must be > 0");
    double ratio = s.control_dt_s / s.dt_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
        throw ValidationError("scenario.control_dt_s", "physics dt_s must divide control_dt_s");

    {
        TableReader r(tree.value("disturbance", json::object()), "disturbance");
        s.disturbance.wave_amplitude_pos_m = r.number("wave_amplitude_pos_mm", 0.0) / 1000.0;
        s.disturbance.wave_amplitude_pitch_roll_deg = r.number("wave_amplitude_pitch_roll_deg", 0.0);
        s.disturbance.wave_period_s = r.number("wave_period_s", 6.0);
        s.rpy_coupling = r.number("rpy_coupling", 0.6);
        r.finish();
        s.disturbance.seed = s.seed;
        try {
            s.disturbance.validate();
        } catch (const std::exception& e) {
            throw ValidationError("disturbance", e.what());
        }
    }

    if (!tree.contains("body") || !tree.at("body").is_array() || tree.at("body").empty())
        throw ValidationError("body", "at least one [[body]] required");
    for (size_t i = 0; i < tree.at("body").size(); ++i)
        s.bodies.push_back(parse_body(tree.at("body")[i], i));

    std::set<std::string> ids;
    for (const auto& b : s.bodies)
        if (!ids.insert(b.id).second)
            throw ValidationError("body.id", "duplicate body id '" + b.id + "'");

    {
        TableReader r(tree.value("robot", json::object()), "robot");
        s.robot.body = r.str("body", "");
        s.robot.camera_enabled = r.boolean("camera_enabled", true);
        s.robot.camera.mount_offset_m = {r.number("camera_offset_x_mm", 500.0) / 1000.0,
                                         r.number("camera_offset_y_mm", 0.0) / 1000.0};
        s.robot.camera.fov_half_angle_deg = r.number("camera_fov_half_deg", 30.0);
        s.robot.camera.max_range_mm = r.number("camera_max_range_mm", 10000.0);
        s.robot.camera.noise_pos_mm = r.number("camera_noise_pos_mm", 0.0);
        s.robot.camera.noise_ang_deg = r.number("camera_noise_ang_deg", 0.0);
        s.robot.socket_offset_m = {r.number("socket_offset_x_mm", 500.0) / 1000.0,
                                   r.number("socket_offset_y_mm", 0.0) / 1000.0};
        s.robot.mag_sensor_offset_m = {r.number("mag_sensor_offset_x_mm", 500.0) / 1000.0,
                                       r.number("mag_sensor_offset_y_mm", 0.0) / 1000.0};
        std::string mode = r.str("funnel_mode", "one_dof");
        if (mode == "one_dof") s.robot.funnel_mode = FunnelMode::one_dof;
        else if (mode == "two_dof") s.robot.funnel_mode = FunnelMode::two_dof;
        else throw ValidationError("robot.funnel_mode", "must be one_dof or two_dof");
        r.finish();
    }

    {
        TableReader r(tree.value("funnel", json::object()), "funnel");
        s.robot.funnel_geom.cone_height_mm = r.number("cone_height_mm", 110.0);
        s.robot.funnel_geom.mouth_radius_mm = r.number("mouth_radius_mm", 40.0);
        s.robot.funnel_geom.stud_radius_mm = r.number("stud_radius_mm", 9.0);
        r.finish();
        try {
            s.robot.funnel_geom.validate();
        } catch (const std::exception& e) {
            throw ValidationError("funnel", e.what());
        }
    }

    {
        TableReader r(tree.value("compliance", json::object()), "compliance");
        auto& c = s.robot.compliance;
        c.M_s = r.number("m_s_kg", 0.5);
        c.M_s_p = r.number("m_s_p_kg", c.M_s);
        c.M_us = r.number("m_us_kg", 0.2);
        c.M_us_p = r.number("m_us_p_kg", c.M_us);
        c.k_s = r.number("k_s_npm", 2000.0);
        c.b_s = r.number("b_s_nspm", 40.0);
        c.k_t = r.number("k_t_npm", 8000.0);
        c.force_as_velocity_input = r.boolean("force_as_velocity_input", true);
        r.finish();
        try {
            c.validate();
        } catch (const std::exception& e) {
            throw ValidationError("compliance", e.what());
        }
    }

    {
        TableReader r(tree.value("thresholds", json::object()), "thresholds");
        auto& t = s.robot.thresholds;
        t.guiding_activation_d_mm = r.number("guiding_activation_d_mm", 125.0);
        t.mag_threshold_ut = r.number("mag_threshold_ut", 50.0);
        t.dy_tol_mm = r.number("dy_tol_mm", 10.0);
        t.psi_tol_deg = r.number("psi_tol_deg", 2.0);
        t.retry_backoff_m = r.number("retry_backoff_mm", 1000.0) / 1000.0;
        t.latch_gate_dx_mm = r.number("latch_gate_dx_mm", 900.0);
        t.latch_gate_dy_mm = r.number("latch_gate_dy_mm", 40.0);
        t.latch_gate_yaw_deg = r.number("latch_gate_yaw_deg", 27.5);
        t.invalid_obs_timeout_s = r.number("invalid_obs_timeout_s", 5.0);
        r.finish();
        try {
            t.validate();
        } catch (const std::exception& e) {
            throw ValidationError("thresholds", e.what());
        }
    }

    {
        TableReader r(tree.value("gains", json::object()), "gains");
        auto& g = s.robot.gains;
        g.kp_dy = r.number("kp_dy", g.kp_dy);
        g.kd_dy = r.number("kd_dy", g.kd_dy);
        g.kp_dx = r.number("kp_dx", g.kp_dx);
        g.kd_dx = r.number("kd_dx", g.kd_dx);
        g.kp_psi = r.number("kp_psi", g.kp_psi);
        g.kd_psi = r.number("kd_psi", g.kd_psi);
        g.ap_alpha = r.number("ap_alpha", g.ap_alpha);
        g.ap_beta = r.number("ap_beta", g.ap_beta);
        g.ap_dx_ref_mm = r.number("ap_dx_ref_mm", g.ap_dx_ref_mm);
        g.kp_pos = r.number("kp_pos", g.kp_pos);
        g.kd_pos = r.number("kd_pos", g.kd_pos);
        g.kp_yaw = r.number("kp_yaw", g.kp_yaw);
        g.kd_yaw = r.number("kd_yaw", g.kd_yaw);
        r.finish();
        try {
            g.validate();
        } catch (const std::exception& e) {
            throw ValidationError("gains", e.what());
        }
    }

    {
        TableReader r(tree.value("allocation", json::object()), "allocation");
        s.robot.allocation.a = r.number("a_mm", 400.0) / 1000.0;
        s.robot.allocation.b = r.number("b_mm", 900.0) / 1000.0;
        s.robot.allocation.f_max = r.number("f_max_n", 30.0);
        r.finish();
        try {
            s.robot.allocation.validate();
        } catch (const std::exception& e) {
            throw ValidationError("allocation", e.what());
        }
    }

    if (tree.contains("tag")) {
        TableReader r(tree.at("tag"), "tag");
        s.tag.body = r.required_str("body");
        s.tag.offset_m = {r.number("offset_x_mm", 0.0) / 1000.0, r.number("offset_y_mm", 0.0) / 1000.0};
        s.tag.yaw_rad = deg2rad(r.number("yaw_deg", 0.0));
        s.tag.id = static_cast<int>(r.integer("id", -1));
        r.finish();
    }

    if (tree.contains("pin")) {
        TableReader r(tree.at("pin"), "pin");
        s.pin.body = r.required_str("body");
        s.pin.tip_offset_m = {r.number("tip_offset_x_mm", 650.0) / 1000.0,
                              r.number("tip_offset_y_mm", 0.0) / 1000.0};
        r.finish();
    }

    if (tree.contains("magnet")) {
        const json& arr = tree.at("magnet");
        if (!arr.is_array()) throw ValidationError("magnet", "expected [[magnet]] tables");
        for (size_t i = 0; i < arr.size(); ++i) {
            TableReader r(arr[i], "magnet[" + std::to_string(i) + "]");
            MagnetSpec m;
            m.body = r.required_str("body");
            m.offset_m = {r.number("offset_x_mm", 0.0) / 1000.0, r.number("offset_y_mm", 0.0) / 1000.0};
            m.heading_rad = deg2rad(r.number("heading_deg", 0.0));
            m.moment = r.number("moment_a_m2", 1.953125);
            std::string kind = r.str("kind", "permanent");
            if (kind == "permanent") m.kind = MagnetKind::permanent;
            else if (kind == "electromagnet") m.kind = MagnetKind::electromagnet;
            else throw ValidationError("magnet.kind", "must be permanent or electromagnet");
            m.powered = r.boolean("powered", true);
            r.finish();
            if (!(m.moment > 0.0)) throw ValidationError("magnet.moment_a_m2", "must be > 0");
            s.magnets.push_back(m);
        }
    }

    {
        TableReader r(tree.value("latch_pair", json::object()), "latch_pair");
        s.latch_robot = r.required_str("robot");
        s.latch_target = r.required_str("target");
        r.finish();
    }

    {
        TableReader r(tree.value("towing", json::object()), "towing");
        s.towing.desired_offset_deg = r.number("desired_offset_deg", 0.0);
        s.towing.cruise_force_n = r.number("cruise_force_n", 10.0);
        s.towing.max_offset_deg = r.number("max_offset_deg", 10.0);
        s.towing.engage_rate_deg_s = r.number("engage_rate_deg_s", 20.0);
        r.finish();
    }

    {
        TableReader r(tree.value("capture", json::object()), "capture");
        s.capture_depth_mm = r.number("depth_mm", 20.0);
        r.finish();
    }

    // cross-references
    if (s.body_index(s.latch_robot) < 0)
        throw ValidationError("latch_pair.robot", "no body with id '" + s.latch_robot + "'");
    if (s.body_index(s.latch_target) < 0)
        throw ValidationError("latch_pair.target", "no body with id '" + s.latch_target + "'");
    if (s.latch_robot == s.latch_target)
        throw ValidationError("latch_pair", "robot and target must differ");
    if (s.bodies[s.body_index(s.latch_robot)].kind != BodyKind::robot)
        throw ValidationError("latch_pair.robot", "body '" + s.latch_robot + "' is not a robot");

    if (s.robot.body.empty()) s.robot.body = s.latch_robot;
    if (s.robot.body != s.latch_robot)
        throw ValidationError("robot.body", "must match latch_pair.robot");

    bool needs_tag = s.mission != Mission::guide_only;
    if (needs_tag) {
        if (s.tag.body.empty()) throw ValidationError("tag", "latching missions require a [tag]");
        if (s.tag.id < 0) throw ValidationError("tag.id", "missing required field");
        if (s.body_index(s.tag.body) < 0)
            throw ValidationError("tag.body", "no body with id '" + s.tag.body + "'");
        if (s.pin.body.empty()) throw ValidationError("pin", "latching missions require a [pin]");
        if (s.body_index(s.pin.body) < 0)
            throw ValidationError("pin.body", "no body with id '" + s.pin.body + "'");
    }
    if (s.mission == Mission::guide_only && s.magnets.empty())
        throw ValidationError("magnet", "guide_only missions require a [[magnet]]");
    for (const auto& m : s.magnets)
        if (s.body_index(m.body) < 0)
            throw ValidationError("magnet.body", "no body with id '" + m.body + "'");

    if (s.mission == Mission::latch_tow_offset) {
        if (s.robot.funnel_mode != FunnelMode::two_dof)
            throw ValidationError("robot.funnel_mode", "latch_tow_offset requires two_dof");
        if (std::abs(s.towing.desired_offset_deg) > s.towing.max_offset_deg)
            throw ValidationError("towing.desired_offset_deg", "exceeds towing.max_offset_deg");
    }
    if (s.mission == Mission::latch_tow_straight && s.towing.desired_offset_deg != 0.0)
        throw ValidationError("towing.desired_offset_deg", "must be 0 for straight towing");

    // crude overlap check: bounding circles from the hull diagonals
    for (size_t i = 0; i < s.bodies.size(); ++i)
        for (size_t j = i + 1; j < s.bodies.size(); ++j) {
            const auto& a = s.bodies[i];
            const auto& b = s.bodies[j];
            double ra = 0.5 * std::hypot(a.params.hull_dims_mm.x, a.params.hull_dims_mm.y) / 1000.0;
            double rb = 0.5 * std::hypot(b.params.hull_dims_mm.x, b.params.hull_dims_mm.y) / 1000.0;
            if ((a.pose.p - b.pose.p).norm() < 0.8 * (ra + rb))
                throw ValidationError("body", "bodies '" + a.id + "' and '" + b.id + "' overlap at start");
        }

    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("file", "cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    json tree;
    bool looks_json = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        looks_json = (c == '{');
        break;
    }
    if (looks_json || path.ends_with(".json")) {
        try {
            tree = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError("file", std::string("JSON parse error: ") + e.what());
        }
    } else {
        tree = parse_toml_lite(text);
    }
    return scenario_from_json(tree);
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json out;
    out["scenario"] = {{"name", s.name},          {"duration_s", s.duration_s},
                       {"dt_s", s.dt_s},          {"control_dt_s", s.control_dt_s},
                       {"seed", s.seed},          {"mission", to_string(s.mission)}};
    out["disturbance"] = {{"wave_amplitude_pos_mm", s.disturbance.wave_amplitude_pos_m * 1000.0},
                          {"wave_amplitude_pitch_roll_deg", s.disturbance.wave_amplitude_pitch_roll_deg},
                          {"wave_period_s", s.disturbance.wave_period_s},
                          {"rpy_coupling", s.rpy_coupling}};
    out["body"] = nlohmann::ordered_json::array();
    for (const auto& b : s.bodies) {
        out["body"].push_back({{"id", b.id},
                               {"kind", to_string(b.kind)},
                               {"x_mm", b.pose.p.x * 1000.0},
                               {"y_mm", b.pose.p.y * 1000.0},
                               {"yaw_deg", rad2deg(b.pose.yaw)},
                               {"u_mmps", b.velocity_body.x * 1000.0},
                               {"v_mmps", b.velocity_body.y * 1000.0},
                               {"r_degps", rad2deg(b.yaw_rate)},
                               {"mass_kg", b.params.mass},
                               {"yaw_inertia_kgm2", b.params.yaw_inertia}});
    }
    out["robot"] = {{"body", s.robot.body},
                    {"funnel_mode", s.robot.funnel_mode == FunnelMode::one_dof ? "one_dof" : "two_dof"},
                    {"camera_enabled", s.robot.camera_enabled},
                    {"socket_offset_x_mm", s.robot.socket_offset_m.x * 1000.0}};
    out["latch_pair"] = {{"robot", s.latch_robot}, {"target", s.latch_target}};
    if (!s.tag.body.empty())
        out["tag"] = {{"body", s.tag.body},
                      {"offset_x_mm", s.tag.offset_m.x * 1000.0},
                      {"offset_y_mm", s.tag.offset_m.y * 1000.0},
                      {"yaw_deg", rad2deg(s.tag.yaw_rad)},
                      {"id", s.tag.id}};
    if (!s.pin.body.empty())
        out["pin"] = {{"body", s.pin.body},
                      {"tip_offset_x_mm", s.pin.tip_offset_m.x * 1000.0},
                      {"tip_offset_y_mm", s.pin.tip_offset_m.y * 1000.0}};
    if (!s.magnets.empty()) {
        out["magnet"] = nlohmann::ordered_json::array();
        for (const auto& m : s.magnets)
            out["magnet"].push_back({{"body", m.body},
                                     {"offset_x_mm", m.offset_m.x * 1000.0},
                                     {"offset_y_mm", m.offset_m.y * 1000.0},
                                     {"heading_deg", rad2deg(m.heading_rad)},
                                     {"moment_a_m2", m.moment}});
    }
    out["towing"] = {{"desired_offset_deg", s.towing.desired_offset_deg},
                     {"cruise_force_n", s.towing.cruise_force_n},
                     {"max_offset_deg", s.towing.max_offset_deg}};
    out["capture"] = {{"depth_mm", s.capture_depth_mm}};
    return out;
}

}  // namespace latchsim
