#include "latchsim/joint.hpp"

#include <cmath>

namespace latchsim {

namespace {
constexpr double kFaultThreshold_m = 0.05;

double commanded_rel_yaw(const JointConstraint& j) {
    // Anti-parallel hold; a positive steering offset swings the child nose so
    // the observed tag angle reads +offset.
    return wrap_angle(kPi - deg2rad(j.offset_deg));
}
}  // namespace

JointResult apply_joint(const BoatState& parent, const BodyParams& parent_params,
                        const BoatState& child, const BodyParams& child_params,
                        const JointConstraint& joint, double dt) {
    JointResult out{parent, child, {}, joint, false};
    BoatState& P = out.parent;
    BoatState& C = out.child;
    JointConstraint& J = out.joint;

    Vec2 pa = P.position + J.parent_anchor_m.rotated(P.yaw);
    Vec2 ca = C.position + J.child_anchor_m.rotated(C.yaw);
    Vec2 err = ca - pa;
    if (err.norm() > kFaultThreshold_m) {
        out.solver_fault = true;
        return out;
    }

    double mp = parent_params.mass, mc = child_params.mass;
    double wp = (1.0 / mp) / (1.0 / mp + 1.0 / mc);
    double wc = 1.0 - wp;
    P.position += err * wp;
    C.position += err * (-wc);

    // Equal and opposite impulses equalize the COM velocities, conserving
    // linear momentum exactly.
    Vec2 vp = P.velocity_body.rotated(P.yaw);
    Vec2 vc = C.velocity_body.rotated(C.yaw);
    Vec2 rel = vc - vp;
    double mu = 1.0 / (1.0 / mp + 1.0 / mc);
    Vec2 impulse = rel * mu;
    vp += impulse * (1.0 / mp);
    vc += impulse * (-1.0 / mc);
    out.constraint_force.x = -impulse.x / dt;
    out.constraint_force.y = -impulse.y / dt;

    if (J.mode != JointMode::free_spherical) {
        double cmd = commanded_rel_yaw(J);
        double to_cmd = wrap_angle(cmd - J.yaw_target_rel);
        double max_step = J.yaw_rate_limit * dt;
        if (std::abs(to_cmd) <= max_step) {
            J.yaw_target_rel = cmd;
            J.engaged = true;
        } else {
            J.yaw_target_rel = wrap_angle(J.yaw_target_rel + (to_cmd > 0 ? max_step : -max_step));
            J.engaged = false;
        }

        double ip = parent_params.yaw_inertia, ic = child_params.yaw_inertia;
        double wip = (1.0 / ip) / (1.0 / ip + 1.0 / ic);
        double wic = 1.0 - wip;
        double rel_yaw = wrap_angle(C.yaw - P.yaw);
        double yaw_err = wrap_angle(J.yaw_target_rel - rel_yaw);
        C.yaw = wrap_angle(C.yaw + yaw_err * wic);
        P.yaw = wrap_angle(P.yaw - yaw_err * wip);

        double rel_rate = C.yaw_rate - P.yaw_rate;
        double mu_i = 1.0 / (1.0 / ip + 1.0 / ic);
        double ang_impulse = rel_rate * mu_i;
        P.yaw_rate += ang_impulse / ip;
        C.yaw_rate -= ang_impulse / ic;
        out.constraint_force.z = -ang_impulse / dt;
    }

    P.velocity_body = vp.rotated(-P.yaw);
    C.velocity_body = vc.rotated(-C.yaw);
    return out;
}

}  // namespace latchsim
