#pragma once

#include <array>

#include "latchsim/geometry.hpp"

namespace latchsim {

/// Four-thruster layout: f1/f2 push along the body x axis at lateral arms
/// +-a/2, f3/f4 push along the body y axis at longitudinal arms +-b/2.
struct AllocationModel {
    double a = 0.4;      ///< m, lateral separation of the surge pair
    double b = 0.9;      ///< m, longitudinal separation of the sway pair
    double f_max = 30.0; ///< N, symmetric per-thruster limit

    void validate() const;

    /// The 3x4 mixing matrix rows: (1,1,0,0), (0,0,1,1), (a/2,-a/2,b/2,-b/2).
    std::array<std::array<double, 4>, 3> matrix() const;
};

using ThrusterForces = std::array<double, 4>;

/// tau = B u. Rejects commands that exceed f_max (a controller bug upstream).
Vec3 forces_to_wrench(const AllocationModel& model, const ThrusterForces& u);

/// Minimum-norm inverse u = B^T (B B^T)^-1 tau. If any thruster exceeds
/// f_max the whole vector is scaled down uniformly, preserving the wrench
/// direction.
ThrusterForces wrench_to_forces(const AllocationModel& model, const Vec3& tau);

}  // namespace latchsim
