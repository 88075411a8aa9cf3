#include "latchsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "latchsim/rng.hpp"

namespace latchsim {

void BodyParams::validate() const {
    if (!(mass > 0.0) || !(yaw_inertia > 0.0))
        throw std::invalid_argument("BodyParams: mass and yaw_inertia must be > 0");
    if (linear_drag.x < 0.0 || linear_drag.y < 0.0 || yaw_drag < 0.0)
        throw std::invalid_argument("BodyParams: drag coefficients must be >= 0");
}

void DisturbanceSignal::validate() const {
    if (wave_amplitude_pos_m < 0.0 || wave_amplitude_pitch_roll_deg < 0.0)
        throw std::invalid_argument("DisturbanceSignal: amplitudes must be >= 0");
    if (!(wave_period_s > 0.0))
        throw std::invalid_argument("DisturbanceSignal: period must be > 0");
}

BoatState step_body(const BoatState& s, const BodyParams& p,
                    const Vec3& body_force, const Vec3& disturbance_force, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step_body: dt must be > 0");
    if (!finite(s.position) || !finite(s.velocity_body) || !finite(s.yaw) || !finite(s.yaw_rate))
        throw std::invalid_argument("step_body: non-finite state");
    if (!finite(body_force) || !finite(disturbance_force))
        throw std::invalid_argument("step_body: non-finite force");

    double fx = body_force.x + disturbance_force.x;
    double fy = body_force.y + disturbance_force.y;
    double mz = body_force.z + disturbance_force.z;

    BoatState n = s;
    n.velocity_body.x = (s.velocity_body.x + fx / p.mass * dt) / (1.0 + p.linear_drag.x / p.mass * dt);
    n.velocity_body.y = (s.velocity_body.y + fy / p.mass * dt) / (1.0 + p.linear_drag.y / p.mass * dt);
    n.yaw_rate = (s.yaw_rate + mz / p.yaw_inertia * dt) / (1.0 + p.yaw_drag / p.yaw_inertia * dt);
    n.position += n.velocity_body.rotated(s.yaw) * dt;
    n.yaw = wrap_angle(s.yaw + n.yaw_rate * dt);
    return n;
}

namespace {

struct WaveComponent {
    double freq_factor;
    double weight;
};

// Six components spread around the base frequency stand in for a filtered
// noise spectrum while keeping the signal a closed-form function of t.
constexpr WaveComponent kComponents[6] = {
    {0.7, 0.35}, {1.0, 0.30}, {1.3, 0.15}, {1.9, 0.10}, {2.6, 0.06}, {3.4, 0.04},
};

constexpr double kNominalMass = 35.0;

}  // namespace

DisturbanceSample sample_disturbance(const DisturbanceSignal& sig, double t) {
    sig.validate();
    DisturbanceSample out;
    if (sig.wave_amplitude_pos_m == 0.0 && sig.wave_amplitude_pitch_roll_deg == 0.0)
        return out;

    // Fixed draw order: per component (freq jitter, phase x, phase y, phase z),
    // then two pitch phases, two roll phases.
    Rng rng(Rng::derive(sig.seed, 0x7a4eull));
    double w0 = 2.0 * kPi / sig.wave_period_s;
    double force_amp = sig.wave_amplitude_pos_m * w0 * w0 * kNominalMass;

    for (const auto& c : kComponents) {
        double w = w0 * c.freq_factor * (1.0 + 0.08 * (rng.uniform01() - 0.5));
        double px = rng.uniform(0.0, 2.0 * kPi);
        double py = rng.uniform(0.0, 2.0 * kPi);
        double pz = rng.uniform(0.0, 2.0 * kPi);
        out.force.x += force_amp * c.weight * std::sin(w * t + px);
        out.force.y += force_amp * c.weight * std::sin(w * t + py);
        out.force.z += 0.1 * force_amp * c.weight * std::sin(w * t + pz);
    }

    double a = sig.wave_amplitude_pitch_roll_deg;
    double p1 = rng.uniform(0.0, 2.0 * kPi), p2 = rng.uniform(0.0, 2.0 * kPi);
    double r1 = rng.uniform(0.0, 2.0 * kPi), r2 = rng.uniform(0.0, 2.0 * kPi);
    out.pitch_deg = a * (0.8 * std::sin(w0 * t + p1) + 0.2 * std::sin(2.3 * w0 * t + p2));
    out.roll_deg = a * (0.8 * std::sin(1.1 * w0 * t + r1) + 0.2 * std::sin(2.9 * w0 * t + r2));
    return out;
}

}  // namespace latchsim
