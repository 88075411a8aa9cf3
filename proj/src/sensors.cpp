#include "latchsim/sensors.hpp"

#include <cmath>
#include <stdexcept>

namespace latchsim {

namespace {
constexpr double kMu0Over4Pi = 1e-7;  // T m / A
}

void MagnetSource::validate() const {
    if (!(moment > 0.0)) throw std::invalid_argument("MagnetSource: moment must be > 0");
}

TagObservation observe_tag(const BoatState& camera_body, const CameraModel& cam,
                           const Pose2& tag_pose, int tag_id, Rng* noise) {
    if (!finite(camera_body.position) || !finite(camera_body.yaw) ||
        !finite(tag_pose.p) || !finite(tag_pose.yaw))
        throw std::invalid_argument("observe_tag: non-finite pose");

    Vec2 cam_pos = camera_body.position + cam.mount_offset_m.rotated(camera_body.yaw);
    Vec2 local = (tag_pose.p - cam_pos).rotated(-camera_body.yaw);

    TagObservation obs;
    obs.tag_id = tag_id;
    obs.d_x_mm = local.x * 1000.0;
    obs.d_y_mm = local.y * 1000.0;
    obs.psi_deg = rad2deg(wrap_angle(camera_body.yaw - tag_pose.yaw - kPi));

    double bearing_deg = rad2deg(std::atan2(local.y, local.x));
    double range_mm = local.norm() * 1000.0;
    obs.valid = obs.d_x_mm > 0.0 && std::abs(bearing_deg) <= cam.fov_half_angle_deg &&
                range_mm <= cam.max_range_mm;

    if (noise) {
        obs.d_x_mm += noise->gaussian(0.0, cam.noise_pos_mm);
        obs.d_y_mm += noise->gaussian(0.0, cam.noise_pos_mm);
        obs.psi_deg += noise->gaussian(0.0, cam.noise_ang_deg);
    }
    return obs;
}

MagnetometerReading field_at(const Vec2& sensor_pos, double sensor_frame_rad,
                             const std::vector<MagnetSource>& sources) {
    Vec2 b_world;  // tesla
    for (const auto& src : sources) {
        src.validate();
        if (!src.is_powered()) continue;
        Vec2 r = sensor_pos - src.position;
        double dist = r.norm();
        if (dist < 1e-3)
            throw std::domain_error("field_at: sensor within 1 mm of a source");
        Vec2 rhat = r * (1.0 / dist);
        Vec2 m{src.moment * std::cos(src.heading_rad), src.moment * std::sin(src.heading_rad)};
        double m_dot_r = m.dot(rhat);
        double inv_d3 = 1.0 / (dist * dist * dist);
        b_world += (rhat * (3.0 * m_dot_r) - m) * (kMu0Over4Pi * inv_d3);
    }
    Vec2 b_sensor = b_world.rotated(-sensor_frame_rad);
    MagnetometerReading out;
    out.b_x_ut = b_sensor.x * 1e6;
    out.b_y_ut = b_sensor.y * 1e6;
    out.b_z_ut = 0.0;
    return out;
}

double observe_heading(const BoatState& state, double noise_deg_std, Rng* noise) {
    if (!finite(state.yaw)) throw std::invalid_argument("observe_heading: non-finite yaw");
    double deg = rad2deg(state.yaw);
    if (noise) deg += noise->gaussian(0.0, noise_deg_std);
    return wrap_deg(deg);
}

double on_axis_field_ut(double moment, double distance_m) {
    return 2.0 * kMu0Over4Pi * moment / (distance_m * distance_m * distance_m) * 1e6;
}

double calibrate_moment(double distance_m, double field_ut) {
    return field_ut * 1e-6 * distance_m * distance_m * distance_m / (2.0 * kMu0Over4Pi);
}

}  // namespace latchsim
