#pragma once

#include "latchsim/dynamics.hpp"
#include "latchsim/geometry.hpp"

namespace latchsim {

enum class JointMode { free_spherical, rigid_hold, offset_hold };

/// Ball-socket coupling created by a latch. Anchors are body-frame points
/// that the solver keeps coincident; the yaw channel engages only in the
/// hold modes.
struct JointConstraint {
    int parent_body = -1;  ///< the towing robot
    int child_body = -1;   ///< the towed platform
    Vec2 parent_anchor_m;  ///< socket, parent body frame
    Vec2 child_anchor_m;   ///< pin tip, child body frame
    JointMode mode = JointMode::free_spherical;

    /// Commanded relative yaw child-vs-parent for the hold modes; the solver
    /// ramps yaw_target_rel toward it at yaw_rate_limit.
    double offset_deg = 0.0;
    double yaw_target_rel = kPi;  ///< current ramped target, radians
    bool engaged = false;         ///< true once yaw_target_rel reached the command
    double yaw_rate_limit = deg2rad(20.0);
};

struct JointResult {
    BoatState parent;
    BoatState child;
    Vec3 constraint_force;  ///< on the child, world frame (Fx, Fy) + yaw impulse moment
    JointConstraint joint;
    bool solver_fault = false;  ///< positional error beyond 50 mm in one step
};

/// One projection + impulse pass: moves both bodies so the anchors coincide
/// (inverse-mass weighted), exchanges equal and opposite velocity impulses,
/// and in the hold modes drives the relative yaw to the ramped target.
/// free_spherical leaves the yaw channel untouched.
JointResult apply_joint(const BoatState& parent, const BodyParams& parent_params,
                        const BoatState& child, const BodyParams& child_params,
                        const JointConstraint& joint, double dt);

}  // namespace latchsim
