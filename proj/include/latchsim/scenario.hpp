#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "latchsim/allocation.hpp"
#include "latchsim/control.hpp"
#include "latchsim/dynamics.hpp"
#include "latchsim/funnel.hpp"
#include "latchsim/sensors.hpp"

namespace latchsim {

/// Config rejection: carries the offending field for the CLI diagnostics.
struct ValidationError : std::runtime_error {
    std::string field;
    ValidationError(const std::string& field_, const std::string& msg)
        : std::runtime_error(field_ + ": " + msg), field(field_) {}
};

enum class BodyKind { robot, dummy, dock };

struct BodySpec {
    std::string id;
    BodyKind kind = BodyKind::dummy;
    Pose2 pose;                    ///< SI; files carry mm / degrees
    Vec2 velocity_body;
    double yaw_rate = 0.0;
    BodyParams params;
};

struct TagSpec {
    std::string body;
    Vec2 offset_m;
    double yaw_rad = 0.0;  ///< relative to the carrying body
    int id = -1;
};

struct PinSpec {
    std::string body;
    Vec2 tip_offset_m{0.65, 0.0};
};

struct MagnetSpec {
    std::string body;
    Vec2 offset_m;
    double heading_rad = 0.0;
    double moment = 1.953125;  ///< A m^2; default calibrated for 200 uT at 125 mm
    MagnetKind kind = MagnetKind::permanent;
    bool powered = true;
};

struct RobotSpec {
    std::string body;
    bool camera_enabled = true;
    CameraModel camera;
    Vec2 socket_offset_m{0.5, 0.0};
    Vec2 mag_sensor_offset_m{0.5, 0.0};
    FunnelMode funnel_mode = FunnelMode::one_dof;
    FunnelGeometry funnel_geom;
    ComplianceParams compliance;
    ControllerThresholds thresholds;
    PdGains gains;
    AllocationModel allocation;
};

enum class Mission { latch, latch_tow_straight, latch_tow_offset, guide_only };

const char* to_string(Mission m);
const char* to_string(BodyKind k);

struct TowingSpec {
    double desired_offset_deg = 0.0;
    double cruise_force_n = 10.0;
    double max_offset_deg = 10.0;
    double engage_rate_deg_s = 20.0;
};

struct Scenario {
    std::string name;
    double duration_s = 30.0;
    double dt_s = 1e-3;
    double control_dt_s = 0.05;
    uint64_t seed = 0;
    Mission mission = Mission::latch;

    DisturbanceSignal disturbance;
    double rpy_coupling = 0.6;

    std::vector<BodySpec> bodies;
    RobotSpec robot;
    TagSpec tag;
    PinSpec pin;
    std::vector<MagnetSpec> magnets;
    std::string latch_robot, latch_target;
    TowingSpec towing;
    double capture_depth_mm = 20.0;

    int body_index(const std::string& id) const;
};

/// Builds + validates a scenario from the decoded config tree.
Scenario scenario_from_json(const nlohmann::json& tree);

/// Loads a .toml or .json scenario file. Throws ParseError or ValidationError.
Scenario load_scenario(const std::string& path);

/// Canonical file-unit form of the scenario, for `validate` output.
nlohmann::ordered_json scenario_to_json(const Scenario& s);

}  // namespace latchsim
