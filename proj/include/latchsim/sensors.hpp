#pragma once

#include <vector>

#include "latchsim/dynamics.hpp"
#include "latchsim/geometry.hpp"
#include "latchsim/rng.hpp"

namespace latchsim {

/// Relative pose of a marker as seen by a camera. d_x runs along the camera
/// axis, d_y is the tag position's lateral coordinate in the camera frame,
/// psi is the relative yaw (0 when camera and tag face each other dead-on).
struct TagObservation {
    double d_x_mm = 0.0;
    double d_y_mm = 0.0;
    double psi_deg = 0.0;
    int tag_id = -1;
    bool valid = false;
};

struct CameraModel {
    Vec2 mount_offset_m{0.5, 0.0};  ///< camera position in the body frame
    double fov_half_angle_deg = 30.0;
    double max_range_mm = 10000.0;
    double noise_pos_mm = 0.0;      ///< std-dev on d_x, d_y
    double noise_ang_deg = 0.0;     ///< std-dev on psi
};

enum class MagnetKind { permanent, electromagnet };

struct MagnetSource {
    Vec2 position;             ///< m, world frame
    double heading_rad = 0.0;  ///< dipole axis direction
    double moment = 1.0;       ///< A m^2
    MagnetKind kind = MagnetKind::permanent;
    bool powered = true;       ///< permanent magnets are always powered
    double pull_strength_n = 75.5;  ///< datasheet metadata; not used by the field model

    bool is_powered() const { return kind == MagnetKind::permanent || powered; }
    void validate() const;
};

struct MagnetometerReading {
    double b_x_ut = 0.0;
    double b_y_ut = 0.0;
    double b_z_ut = 0.0;  ///< always 0 in the planar model, kept for format fidelity
    double sample_rate_hz = 20.0;
};

/// Exact relative-pose observation plus optional Gaussian noise. Validity
/// (d_x > 0, within fov and range) is decided on the noise-free geometry.
TagObservation observe_tag(const BoatState& camera_body, const CameraModel& cam,
                           const Pose2& tag_pose, int tag_id, Rng* noise = nullptr);

/// Sum of point-dipole fields from all powered sources, expressed in the
/// sensor frame in microtesla. Throws if the sensor is within 1 mm of a
/// source (interpenetration upstream).
MagnetometerReading field_at(const Vec2& sensor_pos, double sensor_frame_rad,
                             const std::vector<MagnetSource>& sources);

/// IMU heading in degrees, normalized to (-180, 180].
double observe_heading(const BoatState& state, double noise_deg_std, Rng* noise = nullptr);

/// Dipole moment that produces `field_ut` on-axis at `distance_m`.
double calibrate_moment(double distance_m, double field_ut);

/// On-axis field in microtesla at `distance_m` from a dipole of `moment`.
double on_axis_field_ut(double moment, double distance_m);

}  // namespace latchsim
