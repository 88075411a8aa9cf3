#include "latchsim/sim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "latchsim/allocation.hpp"
#include "latchsim/control.hpp"
#include "latchsim/funnel.hpp"
#include "latchsim/rng.hpp"
#include "latchsim/sensors.hpp"

namespace latchsim {

namespace {

struct Engine {
    const Scenario& scn;
    std::vector<BoatState> states;
    int robot_i, target_i;

    Rng rng_cam;
    FunnelState funnel;
    ComplianceState comp;
    bool comp_active = false;
    LatchControllerState lc;
    JointConstraint joint;
    bool latched = false;
    bool engaged_logged = false;
    double engage_t = 0.0;
    Pose2 latch_hold_goal;
    Pose2 towline;
    double hold_heading_ref = 0.0;

    Vec3 wrench_applied;
    ThrusterForces forces{};

    EventLog log;
    std::vector<TrajRow> rows;

    explicit Engine(const Scenario& s)
        : scn(s), rng_cam(Rng::derive(s.seed, 0xca11)) {
        for (const auto& b : s.bodies) {
            BoatState st;
            st.position = b.pose.p;
            st.yaw = b.pose.yaw;
            st.velocity_body = b.velocity_body;
            st.yaw_rate = b.yaw_rate;
            states.push_back(st);
        }
        robot_i = s.body_index(s.latch_robot);
        target_i = s.body_index(s.latch_target);
        funnel.mode = s.robot.funnel_mode;
    }

    Pose2 tag_world() const {
        const BoatState& b = states[scn.body_index(scn.tag.body)];
        return {b.position + scn.tag.offset_m.rotated(b.yaw), wrap_angle(b.yaw + scn.tag.yaw_rad)};
    }

    Vec2 pin_tip_world() const {
        const BoatState& b = states[scn.body_index(scn.pin.body)];
        return b.position + scn.pin.tip_offset_m.rotated(b.yaw);
    }

    Vec2 socket_world() const {
        const BoatState& r = states[robot_i];
        return r.position + scn.robot.socket_offset_m.rotated(r.yaw);
    }

    std::vector<MagnetSource> magnets_world() const {
        std::vector<MagnetSource> out;
        for (const auto& m : scn.magnets) {
            const BoatState& b = states[scn.body_index(m.body)];
            MagnetSource src;
            src.position = b.position + m.offset_m.rotated(b.yaw);
            src.heading_rad = wrap_angle(b.yaw + m.heading_rad);
            src.moment = m.moment;
            src.kind = m.kind;
            src.powered = m.powered;
            out.push_back(src);
        }
        return out;
    }

    /// Stud tip relative to the socket, robot frame, mm: x along the funnel
    /// axis, y lateral.
    Vec2 stud_rel_mm() const {
        Vec2 rel = (pin_tip_world() - socket_world()).rotated(-states[robot_i].yaw);
        return {rel.x * 1000.0, rel.y * 1000.0};
    }

    TagObservation true_tag_obs() const {
        CameraModel exact = scn.robot.camera;
        exact.noise_pos_mm = 0.0;
        exact.noise_ang_deg = 0.0;
        return observe_tag(states[robot_i], exact, tag_world(), scn.tag.id, nullptr);
    }

    void control_tick(double t) {
        const auto& th = scn.robot.thresholds;
        const auto& g = scn.robot.gains;
        const BoatState& robot = states[robot_i];

        TagObservation obs;
        bool has_tag = !scn.tag.body.empty();
        if (scn.robot.camera_enabled && has_tag) {
            obs = observe_tag(robot, scn.robot.camera, tag_world(), scn.tag.id, &rng_cam);
            log.add(t, "observation",
                    {{"dx_mm", obs.d_x_mm}, {"dy_mm", obs.d_y_mm}, {"psi_deg", obs.psi_deg},
                     {"valid", obs.valid}, {"tag_id", obs.tag_id},
                     {"phase", to_string(lc.phase)}});
        } else {
            // No camera (or no tag): the blank observation must not look like
            // a crossed tag plane — d_x <= 0 is the miss detector, which
            // intentionally ignores the valid bit.
            obs.d_x_mm = std::numeric_limits<double>::infinity();
        }

        Vec3 wrench;
        if (latched) {
            if (scn.mission == Mission::latch) {
                wrench = driving_step(robot, latch_hold_goal, g);
            } else {
                double desired = scn.mission == Mission::latch_tow_offset
                                     ? scn.towing.desired_offset_deg : 0.0;
                TowingCommand tc = towing_step(funnel.mode, obs, desired, funnel,
                                               scn.towing.max_offset_deg, scn.towing.cruise_force_n);
                funnel = set_aperture(funnel, tc.aperture_left, tc.aperture_right);
                joint.offset_deg = steering_offset(funnel, scn.towing.max_offset_deg);
                wrench = tc.wrench;
                wrench.z += std::clamp(g.kp_yaw * wrap_angle(hold_heading_ref - robot.yaw)
                                           - g.kd_yaw * robot.yaw_rate, -24.0, 24.0);
            }
        } else if (scn.mission == Mission::guide_only) {
            auto sources = magnets_world();
            const MagnetSource& src = sources.front();
            Vec2 sensor = robot.position + scn.robot.mag_sensor_offset_m.rotated(robot.yaw);
            Vec2 rel = sensor - src.position;
            double d_mm = rel.norm() * 1000.0;
            Vec2 axis{std::cos(src.heading_rad), std::sin(src.heading_rad)};
            Vec2 perp = rel - axis * rel.dot(axis);
            double axis_mm = perp.norm() * 1000.0;

            MagnetometerReading reading = field_at(sensor, robot.yaw, sources);
            double heading_deg = observe_heading(robot, 0.0, nullptr);
            GuidingCommand gc = guiding_step(reading, d_mm, th, t, heading_deg);
            double yaw_goal = std::atan2(src.position.y - robot.position.y,
                                         src.position.x - robot.position.x);
            if (gc.mode == GuidingMode::inactive) {
                // aim the sensor, not the hull center, at a spot just short
                // of the source so the field guiding can take over
                Vec2 dir = (src.position - robot.position);
                double dist = dir.norm();
                double stop = 0.1 + scn.robot.mag_sensor_offset_m.norm();
                Vec2 goal_p = dist > stop ? src.position - dir * (stop / dist) : robot.position;
                wrench = driving_step(robot, {goal_p, yaw_goal}, g);
            } else {
                wrench = gc.wrench;
                wrench.z += std::clamp(g.kp_yaw * wrap_angle(yaw_goal - robot.yaw)
                                           - g.kd_yaw * robot.yaw_rate, -24.0, 24.0);
            }
            const char* mode = gc.mode == GuidingMode::inactive ? "inactive"
                               : gc.mode == GuidingMode::move_towards ? "move_towards" : "find";
            log.add(t, "guide_sample",
                    {{"d_mm", d_mm}, {"axis_dist_mm", axis_mm},
                     {"b_xy_ut", std::hypot(reading.b_x_ut, reading.b_y_ut)}, {"mode", mode}});
        } else {
            LatchCommand cmd = latching_step(obs, lc, th, g, scn.control_dt_s);
            if (cmd.state.flag_missed_target == 1 && lc.flag_missed_target == 0)
                log.add(t, "miss", {{"dx_mm", obs.d_x_mm}});
            if (cmd.state.phase != lc.phase)
                log.add(t, "phase", {{"from", to_string(lc.phase)}, {"to", to_string(cmd.state.phase)},
                                     {"flag", cmd.state.flag_missed_target}});
            lc = cmd.state;
            wrench = cmd.wrench;
            funnel = set_aperture(funnel, cmd.aperture_cmd, cmd.aperture_cmd);
        }

        forces = wrench_to_forces(scn.robot.allocation, wrench);
        wrench_applied = forces_to_wrench(scn.robot.allocation, forces);
        log.add(t, "command",
                {{"wrench", {wrench.x, wrench.y, wrench.z}},
                 {"forces", {forces[0], forces[1], forces[2], forces[3]}},
                 {"aperture", {funnel.aperture_left, funnel.aperture_right}}});

        record_row(t);
        sample_metrics(t);
    }

    void record_row(double t) {
        TrajRow row;
        row.t = t;
        for (const auto& st : states) {
            row.values.push_back(st.position.x * 1000.0);
            row.values.push_back(st.position.y * 1000.0);
            row.values.push_back(rad2deg(st.yaw));
            row.values.push_back(st.velocity_body.x * 1000.0);
            row.values.push_back(st.velocity_body.y * 1000.0);
            row.values.push_back(rad2deg(st.yaw_rate));
        }
        for (double f : forces) row.values.push_back(f);
        row.values.push_back(funnel.aperture_left);
        row.values.push_back(funnel.aperture_right);
        row.phase = to_string(lc.phase);
        rows.push_back(std::move(row));
    }

    void sample_metrics(double t) {
        if (latched && engaged_logged && t >= engage_t + 0.5) {
            const BoatState& robot = states[robot_i];
            const BoatState& child = states[target_i];
            double rel_yaw = wrap_angle(child.yaw - robot.yaw);
            if (scn.mission == Mission::latch_tow_straight || scn.mission == Mission::latch) {
                Vec2 dir{std::cos(towline.yaw), std::sin(towline.yaw)};
                Vec2 rel = child.position - towline.p;
                double lateral = rel.y * dir.x - rel.x * dir.y;
                log.add(t, "hold_sample",
                        {{"lateral_dev_mm", lateral * 1000.0},
                         {"yaw_drift_deg", rad2deg(wrap_angle(rel_yaw - kPi))}});
            } else if (scn.mission == Mission::latch_tow_offset) {
                double realized = rad2deg(wrap_angle(robot.yaw - child.yaw - kPi));
                log.add(t, "towing_sample",
                        {{"realized_deg", realized},
                         {"commanded_deg", scn.towing.desired_offset_deg}});
            }
        }
        if (latched && scn.disturbance.wave_amplitude_pitch_roll_deg > 0.0) {
            DisturbanceSample ds = sample_disturbance(scn.disturbance, t);
            log.add(t, "attenuation_sample",
                    {{"pitch_in_deg", ds.pitch_deg},
                     {"pitch_out_deg", scn.rpy_coupling * ds.pitch_deg},
                     {"roll_in_deg", ds.roll_deg},
                     {"roll_out_deg", scn.rpy_coupling * ds.roll_deg}});
        }
        if (comp_active)
            log.add(t, "compliance_sample",
                    {{"x_s_mm", comp.x_s * 1000.0}, {"x_us_mm", comp.x_us * 1000.0},
                     {"r_mm", comp.r_input * 1000.0}});
    }

    void physics_step(double t) {
        DisturbanceSample ds = sample_disturbance(scn.disturbance, t);
        for (size_t i = 0; i < states.size(); ++i) {
            if (scn.bodies[i].kind == BodyKind::dock) continue;
            Vec3 bf = static_cast<int>(i) == robot_i ? wrench_applied : Vec3{};
            Vec2 f_body = Vec2{ds.force.x, ds.force.y}.rotated(-states[i].yaw);
            states[i] = step_body(states[i], scn.bodies[i].params, bf,
                                  {f_body.x, f_body.y, ds.force.z}, scn.dt_s);
        }

        if (latched) {
            // docks never move: give them effectively infinite inertia so the
            // whole joint correction lands on the robot
            BodyParams child_params = scn.bodies[target_i].params;
            bool fixed_child = scn.bodies[target_i].kind == BodyKind::dock;
            if (fixed_child) {
                child_params.mass *= 1e12;
                child_params.yaw_inertia *= 1e12;
            }
            JointResult jr = apply_joint(states[robot_i], scn.bodies[robot_i].params,
                                         states[target_i], child_params, joint, scn.dt_s);
            if (jr.solver_fault) {
                log.add(t, "fault", {{"what", "joint constraint diverged"}});
                throw SolverFault("joint constraint diverged at t=" + std::to_string(t));
            }
            states[robot_i] = jr.parent;
            if (!fixed_child) states[target_i] = jr.child;
            joint = jr.joint;
            if (joint.engaged && !engaged_logged) {
                engaged_logged = true;
                engage_t = t;
                towline = {states[robot_i].position, states[robot_i].yaw};
                hold_heading_ref = states[robot_i].yaw;
                log.add(t, "engage",
                        {{"mode", joint.mode == JointMode::rigid_hold ? "rigid_hold" : "offset_hold"}});
            }
        }

        if (scn.mission != Mission::guide_only) {
            Vec2 rel = stud_rel_mm();
            comp_active = latched || (rel.x > 0.0 && rel.x <= scn.robot.funnel_geom.cone_height_mm);
            if (!latched && std::abs(rel.x) <= scn.capture_depth_mm)
                try_capture(t, rel);
            if (comp_active) {
                double r_in = latched ? 0.0 : rel.y / 1000.0;
                comp = step_compliance(scn.robot.compliance, comp, r_in, 0.0, 0.0, scn.dt_s);
            }
        }
    }

    void try_capture(double t, const Vec2& rel_mm) {
        bool accepted = acceptance_check(scn.robot.funnel_geom, funnel, {rel_mm.y, 0.0});
        TagObservation exact = true_tag_obs();
        bool permitted = latch_gate(exact.d_x_mm, exact.d_y_mm, exact.psi_deg, scn.robot.thresholds);
        if (!accepted || !permitted || funnel.receptor != ReceptorState::open) return;

        ReceptorResult rr = receptor_event(funnel, true);
        funnel = rr.state;
        if (!rr.latch_event) return;

        latched = true;
        std::string prev_phase = to_string(lc.phase);
        lc = latching_notify_latched(lc);
        log.add(t, "phase", {{"from", prev_phase}, {"to", "latched"}, {"flag", lc.flag_missed_target}});
        log.add(t, "latch",
                {{"dx_mm", exact.d_x_mm}, {"dy_mm", exact.d_y_mm}, {"yaw_rel_deg", exact.psi_deg},
                 {"stud_axial_mm", rel_mm.x}, {"stud_lateral_mm", rel_mm.y},
                 {"accepted", accepted}, {"gate", permitted}, {"receptor_was_open", true}});

        joint = JointConstraint{};
        joint.parent_body = robot_i;
        joint.child_body = target_i;
        joint.parent_anchor_m = scn.robot.socket_offset_m;
        joint.child_anchor_m = scn.pin.tip_offset_m;
        joint.mode = scn.mission == Mission::latch_tow_offset ? JointMode::offset_hold
                                                              : JointMode::rigid_hold;
        joint.offset_deg = 0.0;
        joint.yaw_target_rel = wrap_angle(states[target_i].yaw - states[robot_i].yaw);
        joint.yaw_rate_limit = deg2rad(scn.towing.engage_rate_deg_s);

        latch_hold_goal = {states[robot_i].position, states[robot_i].yaw};
        hold_heading_ref = states[robot_i].yaw;
    }

    RunResult finish() {
        RunResult out;
        out.traj_columns.push_back("t_s");
        for (const auto& b : scn.bodies) {
            for (const char* c : {"x_mm", "y_mm", "yaw_deg", "u_mmps", "v_mmps", "r_degps"})
                out.traj_columns.push_back(b.id + "_" + c);
        }
        for (const char* c : {"f1_n", "f2_n", "f3_n", "f4_n", "ap_left", "ap_right", "phase"})
            out.traj_columns.push_back(c);
        out.rows = std::move(rows);
        out.log = std::move(log);
        out.metrics = compute_metrics(out.log);
        return out;
    }
};

}  // namespace

RunResult run(const Scenario& scn) {
    Engine eng(scn);

    auto steps_total = static_cast<long long>(std::llround(scn.duration_s / scn.dt_s));
    auto ctrl_every = static_cast<long long>(std::llround(scn.control_dt_s / scn.dt_s));

    for (long long step = 0; step < steps_total; ++step) {
        double t = static_cast<double>(step) * scn.dt_s;
        if (step % ctrl_every == 0) eng.control_tick(t);
        eng.physics_step(t);
    }
    eng.record_row(scn.duration_s);
    eng.log.add(scn.duration_s, "end", {{"steps", static_cast<uint64_t>(steps_total)}});
    return eng.finish();
}

namespace {
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}
}  // namespace

std::string trajectory_csv(const RunResult& r) {
    std::ostringstream out;
    for (size_t i = 0; i < r.traj_columns.size(); ++i) {
        if (i) out << ",";
        out << r.traj_columns[i];
    }
    out << "\n";
    for (const auto& row : r.rows) {
        out << fmt(row.t);
        for (double v : row.values) out << "," << fmt(v);
        out << "," << row.phase << "\n";
    }
    return out.str();
}

std::string trajectory_jsonl(const RunResult& r) {
    std::ostringstream out;
    for (const auto& row : r.rows) {
        nlohmann::ordered_json j;
        j["t_s"] = row.t;
        for (size_t i = 0; i < row.values.size(); ++i)
            j[r.traj_columns[i + 1]] = row.values[i];
        j["phase"] = row.phase;
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace latchsim
