#include "latchsim/allocation.hpp"

#include <cmath>
#include <stdexcept>

namespace latchsim {

void AllocationModel::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(f_max > 0.0))
        throw std::invalid_argument("AllocationModel: a, b, f_max must be > 0");
}

std::array<std::array<double, 4>, 3> AllocationModel::matrix() const {
    return {{{1.0, 1.0, 0.0, 0.0},
             {0.0, 0.0, 1.0, 1.0},
             {a / 2.0, -a / 2.0, b / 2.0, -b / 2.0}}};
}

Vec3 forces_to_wrench(const AllocationModel& model, const ThrusterForces& u) {
    model.validate();
    for (double f : u) {
        if (!std::isfinite(f)) throw std::invalid_argument("forces_to_wrench: non-finite command");
        if (std::abs(f) > model.f_max * (1.0 + 1e-12))
            throw std::invalid_argument("forces_to_wrench: command exceeds f_max");
    }
    auto B = model.matrix();
    Vec3 tau;
    tau.x = B[0][0] * u[0] + B[0][1] * u[1] + B[0][2] * u[2] + B[0][3] * u[3];
    tau.y = B[1][0] * u[0] + B[1][1] * u[1] + B[1][2] * u[2] + B[1][3] * u[3];
    tau.z = B[2][0] * u[0] + B[2][1] * u[1] + B[2][2] * u[2] + B[2][3] * u[3];
    return tau;
}

ThrusterForces wrench_to_forces(const AllocationModel& model, const Vec3& tau) {
    model.validate();
    if (!finite(tau)) throw std::invalid_argument("wrench_to_forces: non-finite wrench");

    auto B = model.matrix();
    Mat3 bbt;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += B[r][k] * B[c][k];
            bbt.at(r, c) = s;
        }
    Vec3 lam = bbt.inverse() * tau;

    ThrusterForces u{};
    for (int k = 0; k < 4; ++k)
        u[k] = B[0][k] * lam.x + B[1][k] * lam.y + B[2][k] * lam.z;

    double peak = 0.0;
    for (double f : u) peak = std::max(peak, std::abs(f));
    if (peak > model.f_max) {
        double s = model.f_max / peak;
        for (double& f : u) f *= s;
    }
    return u;
}

}  // namespace latchsim
