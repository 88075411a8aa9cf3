#include "latchsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latchsim {

namespace {
constexpr double kFyLimitN = 60.0;
constexpr double kFxLimitN = 20.0;
constexpr double kMzLimitNm = 24.0;
constexpr double kRetryReverseN = 6.0;

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

void ControllerThresholds::validate() const {
    for (double v : {guiding_activation_d_mm, mag_threshold_ut, dy_tol_mm, psi_tol_deg,
                     retry_backoff_m, latch_gate_dx_mm, latch_gate_dy_mm, latch_gate_yaw_deg,
                     invalid_obs_timeout_s})
        if (!(v > 0.0)) throw std::invalid_argument("ControllerThresholds: all fields must be > 0");
}

void PdGains::validate() const {
    for (double v : {kp_dy, kd_dy, kp_dx, kd_dx, kp_psi, kd_psi, ap_alpha, ap_beta,
                     kp_pos, kd_pos, kp_yaw, kd_yaw})
        if (v < 0.0) throw std::invalid_argument("PdGains: gains must be >= 0");
    if (!(ap_dx_ref_mm > 0.0)) throw std::invalid_argument("PdGains: ap_dx_ref_mm must be > 0");
}

const char* to_string(LatchPhase p) {
    switch (p) {
        case LatchPhase::align: return "align";
        case LatchPhase::approach: return "approach";
        case LatchPhase::backoff: return "backoff";
        case LatchPhase::retry: return "retry";
        case LatchPhase::latched: return "latched";
    }
    return "?";
}

bool latch_gate(double d_x_mm, double d_y_mm, double yaw_rel_deg, const ControllerThresholds& th) {
    return d_x_mm < th.latch_gate_dx_mm &&
           std::abs(d_y_mm) < th.latch_gate_dy_mm &&
           std::abs(yaw_rel_deg) < th.latch_gate_yaw_deg;
}

LatchCommand latching_step(const TagObservation& obs, const LatchControllerState& st,
                           const ControllerThresholds& th, const PdGains& g, double dt_control) {
    th.validate();
    g.validate();
    if (!(dt_control > 0.0)) throw std::invalid_argument("latching_step: dt_control must be > 0");

    LatchCommand out;
    out.state = st;
    LatchControllerState& n = out.state;
    n.t = st.t + dt_control;

    if (st.phase == LatchPhase::latched) {
        out.aperture_cmd = st.aperture_cmd;
        return out;
    }

    double fx = 0.0, fy = 0.0, mz = 0.0;

    // Missed-target detection runs on the raw longitudinal distance: once the
    // tag plane is behind the camera the observation can no longer be valid,
    // so the flag must not depend on the valid bit.
    if (n.flag_missed_target == 0 && obs.d_x_mm <= 0.0) {
        n.flag_missed_target = 1;
        n.phase = LatchPhase::retry;
        n.have_prev = false;
        n.backoff_armed = false;
    }

    if (n.flag_missed_target == 1) {
        n.phase = LatchPhase::retry;
        fx = -kRetryReverseN;
        n.aperture_cmd = 1.0;
        n.have_prev = false;
        if (obs.valid) {
            n.last_valid_obs_t = n.t;
            if (obs.d_x_mm > th.retry_backoff_m * 1000.0) {
                n.flag_missed_target = 0;
                n.phase = LatchPhase::align;
            }
        }
    } else if (obs.valid) {
        n.last_valid_obs_t = n.t;
        double ddy = 0.0, dpsi = 0.0, ddx = 0.0;
        if (st.have_prev) {
            ddy = (obs.d_y_mm - st.prev_dy_mm) / dt_control;
            dpsi = (obs.psi_deg - st.prev_psi_deg) / dt_control;
            ddx = (obs.d_x_mm - st.prev_dx_mm) / dt_control;
        }
        n.prev_dy_mm = obs.d_y_mm;
        n.prev_psi_deg = obs.psi_deg;
        n.prev_dx_mm = obs.d_x_mm;
        n.have_prev = true;

        // Controls I and III: always minimize d_y and psi.
        fy = std::clamp(g.kp_dy * obs.d_y_mm + g.kd_dy * ddy, -kFyLimitN, kFyLimitN);
        mz = std::clamp(-(g.kp_psi * obs.psi_deg + g.kd_psi * dpsi), -kMzLimitNm, kMzLimitNm);

        if (std::abs(obs.d_y_mm) < th.dy_tol_mm || std::abs(obs.psi_deg) < th.psi_tol_deg) {
            n.phase = LatchPhase::approach;
            n.backoff_armed = false;
            fx = std::clamp(g.kp_dx * obs.d_x_mm + g.kd_dx * ddx, -kFxLimitN, kFxLimitN);
        } else {
            if (!n.backoff_armed) {
                n.backoff_target_mm = obs.d_x_mm + th.retry_backoff_m * 1000.0;
                n.backoff_armed = true;
            }
            n.phase = LatchPhase::backoff;
            fx = std::clamp(g.kp_dx * (obs.d_x_mm - n.backoff_target_mm), -kFxLimitN, kFxLimitN);
        }

        double law = clip01(g.ap_alpha * obs.d_x_mm / g.ap_dx_ref_mm +
                            g.ap_beta * std::abs(obs.d_y_mm) / th.dy_tol_mm);
        if (n.phase == LatchPhase::backoff)
            n.aperture_cmd = std::max(law, st.aperture_cmd);  // never close while backing off
        else if (n.phase == LatchPhase::approach && obs.d_x_mm < 200.0)
            n.aperture_cmd = std::min(law, st.aperture_cmd);  // never reopen on final approach
        else
            n.aperture_cmd = law;
    } else {
        // No usable observation and no miss flag: hold, then give up and back out.
        n.have_prev = false;
        if (st.phase == LatchPhase::retry ||
            n.t - n.last_valid_obs_t > th.invalid_obs_timeout_s) {
            n.phase = LatchPhase::retry;
            fx = -kRetryReverseN;
            n.aperture_cmd = 1.0;
        }
    }

    out.wrench = {fx, fy, mz};
    out.aperture_cmd = n.aperture_cmd;
    return out;
}

LatchControllerState latching_notify_latched(const LatchControllerState& st) {
    LatchControllerState n = st;
    n.phase = LatchPhase::latched;
    return n;
}

Vec3 driving_step(const BoatState& self, const Pose2& goal, const PdGains& g) {
    g.validate();
    if (!finite(goal.p) || !finite(goal.yaw)) throw std::invalid_argument("driving_step: non-finite goal");
    Vec2 err_body = (goal.p - self.position).rotated(-self.yaw);
    double fx = g.kp_pos * err_body.x - g.kd_pos * self.velocity_body.x;
    double fy = g.kp_pos * err_body.y - g.kd_pos * self.velocity_body.y;
    double mz = g.kp_yaw * wrap_angle(goal.yaw - self.yaw) - g.kd_yaw * self.yaw_rate;
    return {std::clamp(fx, -kFyLimitN, kFyLimitN),
            std::clamp(fy, -kFyLimitN, kFyLimitN),
            std::clamp(mz, -kMzLimitNm, kMzLimitNm)};
}

GuidingCommand guiding_step(const MagnetometerReading& reading, double d_estimate_mm,
                            const ControllerThresholds& th, double t,
                            double self_heading_deg,
                            std::optional<double> peer_heading_deg) {
    th.validate();
    GuidingCommand cmd;
    if (d_estimate_mm > th.guiding_activation_d_mm) return cmd;

    double bxy = std::hypot(reading.b_x_ut, reading.b_y_ut);
    if (bxy >= th.mag_threshold_ut) {
        cmd.mode = GuidingMode::move_towards;
        double d = d_estimate_mm;
        // Creep in from far out, brake hard inside the stand-off so the
        // sensor never reaches the field singularity.
        double surge = 1.5 * clip01((d - 60.0) / 65.0) - 6.0 * clip01((60.0 - d) / 60.0);
        // The lateral field component flips sign across the source equator;
        // b_x tells which regime we are in.
        double side = reading.b_x_ut <= 0.0 ? 1.0 : -1.0;
        double sway = -5.0 * (reading.b_y_ut / bxy) * side;
        cmd.wrench = {surge, sway, 0.0};
    } else {
        cmd.mode = GuidingMode::find;
        cmd.wrench = {0.0, 2.0 * std::sin(2.0 * kPi * t / 8.0), 0.0};
    }
    if (peer_heading_deg)
        cmd.wrench.z += 0.07 * wrap_deg(*peer_heading_deg - self_heading_deg);
    return cmd;
}

TowingCommand towing_step(FunnelMode mode, const TagObservation& obs, double desired_offset_deg,
                          const FunnelState& funnel, double max_offset_deg, double cruise_force_n) {
    if (funnel.receptor != ReceptorState::closed_trapped)
        throw std::logic_error("towing_step: nothing trapped to tow");
    TowingCommand cmd;
    cmd.wrench = {cruise_force_n, 0.0, 0.0};
    if (mode == FunnelMode::one_dof) {
        if (desired_offset_deg != 0.0)
            throw std::invalid_argument("towing_step: one_dof mode cannot hold a heading offset");
        cmd.aperture_left = 0.0;
        cmd.aperture_right = 0.0;
        return cmd;
    }
    if (std::abs(desired_offset_deg) > max_offset_deg)
        throw std::invalid_argument("towing_step: desired offset exceeds max_offset");

    double left = 0.5 + desired_offset_deg / (2.0 * max_offset_deg);
    double right = 0.5 - desired_offset_deg / (2.0 * max_offset_deg);
    if (obs.valid) {
        double trim = std::clamp(0.02 * (desired_offset_deg - obs.psi_deg), -0.2, 0.2);
        left += trim;
        right -= trim;
    }
    cmd.aperture_left = clip01(left);
    cmd.aperture_right = clip01(right);
    return cmd;
}

}  // namespace latchsim
