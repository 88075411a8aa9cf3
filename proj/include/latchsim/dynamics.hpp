#pragma once

#include <cstdint>

#include "latchsim/geometry.hpp"

namespace latchsim {

/// Planar pose and body-frame velocities of one floating body.
struct BoatState {
    Vec2 position;            ///< meters, world frame
    double yaw = 0.0;         ///< radians, normalized to (-pi, pi]
    Vec2 velocity_body;       ///< m/s: surge u (x), sway v (y)
    double yaw_rate = 0.0;    ///< rad/s
};

struct BodyParams {
    double mass = 35.0;                   ///< kg
    double yaw_inertia = 3.0;             ///< kg m^2
    Vec2 linear_drag{20.0, 40.0};         ///< N s/m per body axis
    double yaw_drag = 5.0;                ///< N m s/rad
    Vec3 hull_dims_mm{1000.0, 500.0, 250.0};

    void validate() const;
};

/// Seeded wave disturbance. A pure function of (seed, t): the same signal
/// every run, no generator state.
struct DisturbanceSignal {
    double wave_amplitude_pos_m = 0.0;
    double wave_amplitude_pitch_roll_deg = 0.0;
    double wave_period_s = 6.0;
    uint64_t seed = 0;

    void validate() const;
};

struct DisturbanceSample {
    Vec3 force;            ///< N, N, N m in the world frame
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

/// Advances one body by dt with semi-implicit Euler. Drag is handled
/// implicitly, so kinetic energy never grows under zero applied force and a
/// constant force settles exactly at the F/d terminal velocity.
/// `body_force` and `disturbance_force` are both in the body frame.
BoatState step_body(const BoatState& state, const BodyParams& params,
                    const Vec3& body_force, const Vec3& disturbance_force, double dt);

/// Samples the wave field at time t. pitch/roll are bounded output signals;
/// they never feed back into the planar dynamics.
DisturbanceSample sample_disturbance(const DisturbanceSignal& sig, double t);

inline double kinetic_energy(const BoatState& s, const BodyParams& p) {
    return 0.5 * p.mass * s.velocity_body.dot(s.velocity_body)
         + 0.5 * p.yaw_inertia * s.yaw_rate * s.yaw_rate;
}

}  // namespace latchsim
