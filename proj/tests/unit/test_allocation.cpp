#include <doctest.h>

#include <cmath>

#include "latchsim/allocation.hpp"
#include "latchsim/rng.hpp"

using namespace latchsim;

namespace {

// Oracle kept deliberately dumb: explicit row-by-row products, no shared
// code with the implementation.
Vec3 oracle_wrench(double a, double b, const ThrusterForces& u) {
    Vec3 tau;
    tau.x = 1.0 * u[0] + 1.0 * u[1] + 0.0 * u[2] + 0.0 * u[3];
    tau.y = 0.0 * u[0] + 0.0 * u[1] + 1.0 * u[2] + 1.0 * u[3];
    tau.z = (a / 2.0) * u[0] - (a / 2.0) * u[1] + (b / 2.0) * u[2] - (b / 2.0) * u[3];
    return tau;
}

double rel_err(const Vec3& got, const Vec3& want) {
    double scale = std::max({1.0, std::abs(want.x), std::abs(want.y), std::abs(want.z)});
    return (std::abs(got.x - want.x) + std::abs(got.y - want.y) + std::abs(got.z - want.z)) / scale;
}

}  // namespace

TEST_CASE("mixing matrix layout") {
    AllocationModel m;
    auto B = m.matrix();
    CHECK(B[0][0] == 1.0); CHECK(B[0][1] == 1.0); CHECK(B[0][2] == 0.0); CHECK(B[0][3] == 0.0);
    CHECK(B[1][0] == 0.0); CHECK(B[1][1] == 0.0); CHECK(B[1][2] == 1.0); CHECK(B[1][3] == 1.0);
    CHECK(B[2][0] == doctest::Approx(0.2));
    CHECK(B[2][1] == doctest::Approx(-0.2));
    CHECK(B[2][2] == doctest::Approx(0.45));
    CHECK(B[2][3] == doctest::Approx(-0.45));
}

TEST_CASE("forces_to_wrench equals the oracle") {
    AllocationModel m;
    Rng rng(101);
    for (int i = 0; i < 10000; ++i) {
        ThrusterForces u;
        for (double& f : u) f = rng.uniform(-m.f_max, m.f_max);
        Vec3 got = forces_to_wrench(m, u);
        Vec3 want = oracle_wrench(m.a, m.b, u);
        CHECK(rel_err(got, want) <= 1e-12);
    }
}

TEST_CASE("round trip is the identity for feasible wrenches") {
    AllocationModel m;
    Rng rng(102);
    for (int i = 0; i < 10000; ++i) {
        Vec3 tau{rng.uniform(-25, 25), rng.uniform(-25, 25), rng.uniform(-8, 8)};
        ThrusterForces u = wrench_to_forces(m, tau);
        bool saturated = false;
        for (double f : u)
            if (std::abs(f) > m.f_max * (1.0 - 1e-9)) saturated = true;
        if (saturated) continue;
        Vec3 back = forces_to_wrench(m, u);
        CHECK(rel_err(back, tau) <= 1e-9);
    }
}

TEST_CASE("inverse is minimum-norm") {
    AllocationModel m;
    // the null space of B is spanned by (1, -1, -a/b, a/b); the min-norm
    // solution must have no component along it
    Rng rng(103);
    double n0 = 1.0, n1 = -1.0, n2 = -m.a / m.b, n3 = m.a / m.b;
    for (int i = 0; i < 200; ++i) {
        Vec3 tau{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-5, 5)};
        ThrusterForces u = wrench_to_forces(m, tau);
        double along = u[0] * n0 + u[1] * n1 + u[2] * n2 + u[3] * n3;
        CHECK(std::abs(along) < 1e-9);
    }
}

TEST_CASE("saturation scales uniformly and preserves direction") {
    AllocationModel m;
    Vec3 tau{500.0, -300.0, 40.0};
    ThrusterForces u = wrench_to_forces(m, tau);
    double peak = 0.0;
    for (double f : u) peak = std::max(peak, std::abs(f));
    CHECK(peak == doctest::Approx(m.f_max).epsilon(1e-12));

    Vec3 achieved = forces_to_wrench(m, u);
    // achieved wrench is a positive multiple of the request
    double k = achieved.x / tau.x;
    CHECK(k > 0.0);
    CHECK(k < 1.0);
    CHECK(achieved.y == doctest::Approx(k * tau.y).epsilon(1e-9));
    CHECK(achieved.z == doctest::Approx(k * tau.z).epsilon(1e-9));
}

TEST_CASE("zero wrench maps to zero forces") {
    AllocationModel m;
    ThrusterForces u = wrench_to_forces(m, {0, 0, 0});
    for (double f : u) CHECK(f == 0.0);
}

TEST_CASE("forces beyond the limit are rejected") {
    AllocationModel m;
    CHECK_THROWS_AS((void)forces_to_wrench(m, {31.0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)forces_to_wrench(m, {0, 0, 0, -30.5}), std::invalid_argument);
    CHECK_NOTHROW((void)forces_to_wrench(m, {30.0, -30.0, 30.0, -30.0}));
}

TEST_CASE("model validation") {
    AllocationModel bad;
    bad.a = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = AllocationModel{};
    bad.f_max = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
