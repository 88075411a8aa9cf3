#pragma once

#include <optional>

#include "latchsim/dynamics.hpp"
#include "latchsim/funnel.hpp"
#include "latchsim/geometry.hpp"
#include "latchsim/sensors.hpp"

namespace latchsim {

struct ControllerThresholds {
    double guiding_activation_d_mm = 125.0;
    double mag_threshold_ut = 50.0;
    double dy_tol_mm = 10.0;
    double psi_tol_deg = 2.0;
    double retry_backoff_m = 1.0;
    double latch_gate_dx_mm = 900.0;
    double latch_gate_dy_mm = 40.0;
    double latch_gate_yaw_deg = 27.5;
    double invalid_obs_timeout_s = 5.0;

    void validate() const;
};

/// Gains for every controller channel. The latching stack runs four PD loops
/// (d_y, d_x, psi, aperture); the driving controller reuses the pos/yaw pairs.
struct PdGains {
    double kp_dy = 0.05;     ///< N per mm
    double kd_dy = 0.002;    ///< N per mm/s
    double kp_dx = 0.012;    ///< N per mm
    double kd_dx = 0.0006;
    double kp_psi = 0.25;    ///< N m per deg
    double kd_psi = 0.01;
    double ap_alpha = 0.5;   ///< aperture blend weight on d_x / d_x_ref
    double ap_beta = 0.5;    ///< aperture blend weight on |d_y| / dy_tol
    double ap_dx_ref_mm = 1000.0;

    double kp_pos = 25.0;    ///< N per m (driving)
    double kd_pos = 30.0;    ///< N per m/s
    double kp_yaw = 4.0;     ///< N m per rad
    double kd_yaw = 2.0;     ///< N m per rad/s

    void validate() const;
};

enum class LatchPhase { align, approach, backoff, retry, latched };

const char* to_string(LatchPhase p);

struct LatchControllerState {
    LatchPhase phase = LatchPhase::align;
    int flag_missed_target = 0;
    double aperture_cmd = 1.0;       ///< funnel command memory
    double backoff_target_mm = 0.0;  ///< stand-off distance captured on entering backoff
    bool backoff_armed = false;
    double t = 0.0;
    double last_valid_obs_t = 0.0;
    double prev_dy_mm = 0.0, prev_psi_deg = 0.0, prev_dx_mm = 0.0;
    bool have_prev = false;
};

struct LatchCommand {
    Vec3 wrench;
    double aperture_cmd = 1.0;
    LatchControllerState state;
};

/// One control tick of the hybrid latching state machine. Pure transition
/// function of (observation, state): replaying a logged observation sequence
/// reproduces the command log bit-exactly.
LatchCommand latching_step(const TagObservation& obs, const LatchControllerState& st,
                           const ControllerThresholds& th, const PdGains& g, double dt_control);

/// Notification that the receptor trapped the stud; the controller holds
/// position from here on.
LatchControllerState latching_notify_latched(const LatchControllerState& st);

/// Capture permission: all three strict inequalities must hold.
bool latch_gate(double d_x_mm, double d_y_mm, double yaw_rel_deg, const ControllerThresholds& th);

/// Waypoint PD in the world frame, mapped to a body wrench.
Vec3 driving_step(const BoatState& self, const Pose2& goal, const PdGains& g);

enum class GuidingMode { inactive, move_towards, find };

struct GuidingCommand {
    Vec3 wrench;
    GuidingMode mode = GuidingMode::inactive;
};

/// Near-field magnetic homing. Inactive beyond the activation distance.
/// Above the field threshold it slides toward the field source using the
/// lateral field component; below it, it sweeps sideways to find the field
/// (the sweep needs wall-clock phase, hence the t parameter). When a peer
/// heading is given, a yaw correction keeps the vessels parallel.
GuidingCommand guiding_step(const MagnetometerReading& reading, double d_estimate_mm,
                            const ControllerThresholds& th, double t,
                            double self_heading_deg,
                            std::optional<double> peer_heading_deg = std::nullopt);

struct TowingCommand {
    Vec3 wrench;
    double aperture_left = 0.0;
    double aperture_right = 0.0;
};

/// Post-latch towing. one_dof clamps the funnel shut for a rigid center
/// hold; two_dof realizes the desired heading offset through asymmetric
/// apertures, trimmed by the observed tag angle.
TowingCommand towing_step(FunnelMode mode, const TagObservation& obs, double desired_offset_deg,
                          const FunnelState& funnel, double max_offset_deg = 10.0,
                          double cruise_force_n = 10.0);

}  // namespace latchsim
