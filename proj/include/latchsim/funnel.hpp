#pragma once

#include "latchsim/geometry.hpp"

namespace latchsim {

struct FunnelGeometry {
    double cone_height_mm = 110.0;
    double mouth_radius_mm = 40.0;
    double stud_radius_mm = 9.0;

    double acceptance_area_mm2() const { return kPi * mouth_radius_mm * mouth_radius_mm; }
    void validate() const;
};

enum class FunnelMode { one_dof, two_dof };
enum class ReceptorState { open, closed_empty, closed_trapped };

struct FunnelState {
    FunnelMode mode = FunnelMode::one_dof;
    double aperture_left = 1.0;   ///< 0 = arms closed onto the stud, 1 = fully open
    double aperture_right = 1.0;
    ReceptorState receptor = ReceptorState::open;
};

/// Mouth radius presented by one side at a given aperture: bs_r when closed
/// (zero clearance), the full mouth radius when open.
double aperture_effective_radius(const FunnelGeometry& geom, double aperture);

/// True when the stud center fits through the effective mouth on its side.
/// stud_offset_mm is radial, perpendicular to the funnel axis; its first
/// component picks the side (>= 0 left).
bool acceptance_check(const FunnelGeometry& geom, const FunnelState& state, const Vec2& stud_offset_mm);

/// Sets the aperture command. one_dof mode drives both sides from `left`
/// (the single actuator); two_dof sets the sides independently.
FunnelState set_aperture(const FunnelState& state, double left, double right);

struct ReceptorResult {
    FunnelState state;
    bool latch_event = false;
    bool fault = false;  ///< capture while closed_empty: mechanical contradiction
};

/// Push-lock transition: an open receptor traps an arriving stud.
ReceptorResult receptor_event(const FunnelState& state, bool stud_at_socket);

/// Commanded release: a trapped stud is freed, the receptor reopens.
FunnelState receptor_release(const FunnelState& state);

/// Commanded heading offset of the trapped pin. Proportional to the aperture
/// asymmetry: full asymmetry (1, 0) maps to +max_offset_deg. one_dof mode
/// cannot steer and returns 0.
double steering_offset(const FunnelState& state, double max_offset_deg = 10.0);

/// Quarter-car style two-mass suspension pair of the funnel arms.
struct ComplianceParams {
    double M_s = 0.5;     ///< kg, sprung
    double M_s_p = 0.5;   ///< kg, sprung (primed side)
    double M_us = 0.2;    ///< kg, unsprung
    double M_us_p = 0.2;
    double k_s = 2000.0;  ///< N/m
    double b_s = 40.0;    ///< N s/m
    double k_t = 8000.0;  ///< N/m

    /// The printed equations put the control input f inside the damper terms
    /// b_s(x_s' - f), which reads f as a velocity. true keeps that form; false
    /// switches the damper to the relative velocity and applies f as a force.
    bool force_as_velocity_input = true;

    void validate() const;
};

struct ComplianceState {
    double x_s = 0.0, v_s = 0.0;
    double x_us = 0.0, v_us = 0.0;
    double x_s_p = 0.0, v_s_p = 0.0;
    double x_us_p = 0.0, v_us_p = 0.0;
    double r_input = 0.0;  ///< m, pin offset driving the tire spring
    double f = 0.0, f_p = 0.0;
};

/// One semi-implicit Euler step of both equation sets.
ComplianceState step_compliance(const ComplianceParams& params, const ComplianceState& state,
                                double r_input, double f, double f_p, double dt);

/// Spring energy + kinetic energy of one side, measured about the
/// displaced equilibrium for input r (for the conservation checks).
double compliance_energy(const ComplianceParams& params, const ComplianceState& state, double r_input);

}  // namespace latchsim
