#include "latchsim/funnel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latchsim {

void FunnelGeometry::validate() const {
    if (!(cone_height_mm > 0.0) || !(mouth_radius_mm > 0.0) || !(stud_radius_mm > 0.0))
        throw std::invalid_argument("FunnelGeometry: dimensions must be > 0");
    if (!(stud_radius_mm < mouth_radius_mm))
        throw std::invalid_argument("FunnelGeometry: stud must fit the mouth (bs_r < r)");
}

double aperture_effective_radius(const FunnelGeometry& geom, double aperture) {
    geom.validate();
    double a = std::clamp(aperture, 0.0, 1.0);
    return geom.stud_radius_mm + a * (geom.mouth_radius_mm - geom.stud_radius_mm);
}

bool acceptance_check(const FunnelGeometry& geom, const FunnelState& state, const Vec2& stud_offset_mm) {
    double aperture = stud_offset_mm.x >= 0.0 ? state.aperture_left : state.aperture_right;
    double clearance = aperture_effective_radius(geom, aperture) - geom.stud_radius_mm;
    return stud_offset_mm.norm() <= clearance;
}

FunnelState set_aperture(const FunnelState& state, double left, double right) {
    if (!(left >= 0.0 && left <= 1.0) || !(right >= 0.0 && right <= 1.0))
        throw std::out_of_range("set_aperture: fractions must be in [0, 1]");
    FunnelState n = state;
    if (state.mode == FunnelMode::one_dof) {
        // single actuator, all arms follow
        n.aperture_left = left;
        n.aperture_right = left;
    } else {
        n.aperture_left = left;
        n.aperture_right = right;
    }
    return n;
}

ReceptorResult receptor_event(const FunnelState& state, bool stud_at_socket) {
    ReceptorResult r{state, false, false};
    if (!stud_at_socket) return r;
    switch (state.receptor) {
        case ReceptorState::open:
            r.state.receptor = ReceptorState::closed_trapped;
            r.latch_event = true;
            break;
        case ReceptorState::closed_trapped:
            break;  // already holding it
        case ReceptorState::closed_empty:
            r.fault = true;  // a stud cannot arrive through a closed socket
            break;
    }
    return r;
}

FunnelState receptor_release(const FunnelState& state) {
    FunnelState n = state;
    n.receptor = ReceptorState::open;
    return n;
}

double steering_offset(const FunnelState& state, double max_offset_deg) {
    if (state.mode == FunnelMode::one_dof) return 0.0;
    return (state.aperture_left - state.aperture_right) * max_offset_deg;
}

void ComplianceParams::validate() const {
    if (!(M_s > 0.0) || !(M_s_p > 0.0) || !(M_us > 0.0) || !(M_us_p > 0.0))
        throw std::invalid_argument("ComplianceParams: masses must be > 0");
    if (!(k_s > 0.0) || !(k_t > 0.0) || b_s < 0.0)
        throw std::invalid_argument("ComplianceParams: k_s, k_t > 0 and b_s >= 0 required");
}

namespace {

struct Accel {
    double a_s, a_us;
};

Accel accel_one_side(const ComplianceParams& p, double M_s, double M_us,
                     double x_s, double v_s, double x_us, double v_us, double r, double f) {
    if (p.force_as_velocity_input) {
        double a_s = (-p.k_s * (x_s - x_us) - p.b_s * (v_s - f)) / M_s;
        double a_us = (p.k_s * (x_s - x_us) - p.b_s * (f - v_s) - p.k_t * (x_us - r)) / M_us;
        return {a_s, a_us};
    }
    double rel = v_s - v_us;
    double a_s = (-p.k_s * (x_s - x_us) - p.b_s * rel + f) / M_s;
    double a_us = (p.k_s * (x_s - x_us) + p.b_s * rel - p.k_t * (x_us - r) - f) / M_us;
    return {a_s, a_us};
}

}  // namespace

ComplianceState step_compliance(const ComplianceParams& p, const ComplianceState& s,
                                double r_input, double f, double f_p, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step_compliance: dt must be > 0");
    for (double v : {s.x_s, s.v_s, s.x_us, s.v_us, s.x_s_p, s.v_s_p, s.x_us_p, s.v_us_p, r_input, f, f_p})
        if (!std::isfinite(v)) throw std::invalid_argument("step_compliance: non-finite input");

    ComplianceState n = s;
    n.r_input = r_input;
    n.f = f;
    n.f_p = f_p;

    Accel a = accel_one_side(p, p.M_s, p.M_us, s.x_s, s.v_s, s.x_us, s.v_us, r_input, f);
    n.v_s = s.v_s + a.a_s * dt;
    n.v_us = s.v_us + a.a_us * dt;
    n.x_s = s.x_s + n.v_s * dt;
    n.x_us = s.x_us + n.v_us * dt;

    Accel ap = accel_one_side(p, p.M_s_p, p.M_us_p, s.x_s_p, s.v_s_p, s.x_us_p, s.v_us_p, r_input, f_p);
    n.v_s_p = s.v_s_p + ap.a_s * dt;
    n.v_us_p = s.v_us_p + ap.a_us * dt;
    n.x_s_p = s.x_s_p + n.v_s_p * dt;
    n.x_us_p = s.x_us_p + n.v_us_p * dt;
    return n;
}

double compliance_energy(const ComplianceParams& p, const ComplianceState& s, double r) {
    auto side = [&](double M_s, double M_us, double x_s, double v_s, double x_us, double v_us) {
        return 0.5 * M_s * v_s * v_s + 0.5 * M_us * v_us * v_us +
               0.5 * p.k_s * (x_s - x_us) * (x_s - x_us) +
               0.5 * p.k_t * (x_us - r) * (x_us - r);
    };
    return side(p.M_s, p.M_us, s.x_s, s.v_s, s.x_us, s.v_us) +
           side(p.M_s_p, p.M_us_p, s.x_s_p, s.v_s_p, s.x_us_p, s.v_us_p);
}

}  // namespace latchsim
