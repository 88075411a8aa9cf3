#include <doctest.h>

#include <array>
#include <cmath>

#include "latchsim/funnel.hpp"

using namespace latchsim;

namespace {

// Independent reference: the same two equation sets integrated with RK4 at a
// 1000x finer step. State: x_s, v_s, x_us, v_us.
using Y = std::array<double, 4>;

Y deriv(const ComplianceParams& p, const Y& y, double r, double f) {
    double x_s = y[0], v_s = y[1], x_us = y[2], v_us = y[3];
    double a_s, a_us;
    if (p.force_as_velocity_input) {
        a_s = (-p.k_s * (x_s - x_us) - p.b_s * (v_s - f)) / p.M_s;
        a_us = (p.k_s * (x_s - x_us) - p.b_s * (f - v_s) - p.k_t * (x_us - r)) / p.M_us;
    } else {
        a_s = (-p.k_s * (x_s - x_us) - p.b_s * (v_s - v_us) + f) / p.M_s;
        a_us = (p.k_s * (x_s - x_us) + p.b_s * (v_s - v_us) - p.k_t * (x_us - r) - f) / p.M_us;
    }
    return {v_s, a_s, v_us, a_us};
}

Y rk4_run(const ComplianceParams& p, Y y, double r, double f, double t_end, double dt) {
    auto add = [](const Y& a, const Y& b, double s) {
        Y o;
        for (int i = 0; i < 4; ++i) o[i] = a[i] + b[i] * s;
        return o;
    };
    long n = std::lround(t_end / dt);
    for (long i = 0; i < n; ++i) {
        Y k1 = deriv(p, y, r, f);
        Y k2 = deriv(p, add(y, k1, dt / 2), r, f);
        Y k3 = deriv(p, add(y, k2, dt / 2), r, f);
        Y k4 = deriv(p, add(y, k3, dt), r, f);
        for (int j = 0; j < 4; ++j)
            y[j] += dt / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return y;
}

ComplianceState run_steps(const ComplianceParams& p, ComplianceState s, double r, double f,
                          double t_end, double dt) {
    long n = std::lround(t_end / dt);
    for (long i = 0; i < n; ++i) s = step_compliance(p, s, r, f, f, dt);
    return s;
}

}  // namespace

TEST_CASE("step response matches the fine-step reference (printed equations)") {
    ComplianceParams p;  // force_as_velocity_input = true
    double dt = 1e-3, r = 0.01, t_end = 2.0;

    ComplianceState s = run_steps(p, ComplianceState{}, r, 0.0, t_end, dt);
    Y ref = rk4_run(p, {0, 0, 0, 0}, r, 0.0, t_end, dt / 1000.0);

    CHECK(std::abs(s.x_s - ref[0]) <= 0.01 * std::max(std::abs(ref[0]), 1e-3));
    CHECK(std::abs(s.x_us - ref[2]) <= 0.01 * std::max(std::abs(ref[2]), 1e-3));
    CHECK(std::abs(s.v_s - ref[1]) <= 0.01 * std::max(std::abs(ref[1]), 1e-3));
    CHECK(std::abs(s.v_us - ref[3]) <= 0.01 * std::max(std::abs(ref[3]), 1e-3));
}

TEST_CASE("step response matches the fine-step reference (relative-velocity damper)") {
    ComplianceParams p;
    p.force_as_velocity_input = false;
    double dt = 1e-3, r = 0.01, t_end = 2.0;

    ComplianceState s = run_steps(p, ComplianceState{}, r, 0.0, t_end, dt);
    Y ref = rk4_run(p, {0, 0, 0, 0}, r, 0.0, t_end, dt / 1000.0);

    CHECK(std::abs(s.x_s - ref[0]) <= 0.01 * std::max(std::abs(ref[0]), 1e-3));
    CHECK(std::abs(s.x_us - ref[2]) <= 0.01 * std::max(std::abs(ref[2]), 1e-3));
}

TEST_CASE("both modes settle with the pin offset") {
    for (bool mode : {true, false}) {
        ComplianceParams p;
        p.force_as_velocity_input = mode;
        double r = 0.012;
        ComplianceState s = run_steps(p, ComplianceState{}, r, 0.0, 10.0, 1e-4);
        CHECK(s.x_s == doctest::Approx(r).epsilon(1e-4));
        CHECK(s.x_us == doctest::Approx(r).epsilon(1e-4));
        CHECK(std::abs(s.v_s) < 1e-9);
        CHECK(std::abs(s.v_us) < 1e-9);
        // primed side sees the same input
        CHECK(s.x_s_p == doctest::Approx(r).epsilon(1e-4));
    }
}

TEST_CASE("constant actuation offsets the closed-form equilibrium") {
    // printed form: f acts as a velocity bias, static offset b_s f / k_s
    {
        ComplianceParams p;
        double f = 0.02;
        ComplianceState s = run_steps(p, ComplianceState{}, 0.0, f, 10.0, 1e-4);
        CHECK(s.x_us == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(s.x_s == doctest::Approx(p.b_s * f / p.k_s).epsilon(1e-3));
    }
    // force form: spring compression f / k_s
    {
        ComplianceParams p;
        p.force_as_velocity_input = false;
        double f = 0.5;
        ComplianceState s = run_steps(p, ComplianceState{}, 0.0, f, 10.0, 1e-4);
        CHECK(s.x_us == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(s.x_s == doctest::Approx(f / p.k_s).epsilon(1e-3));
    }
}

TEST_CASE("undamped energy is conserved within 1% over 10 s") {
    ComplianceParams p;
    p.b_s = 0.0;
    ComplianceState s;
    s.x_s = 0.005;
    s.x_s_p = 0.005;
    double e0 = compliance_energy(p, s, 0.0);
    REQUIRE(e0 > 0.0);

    double dt = 1e-4;
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        s = step_compliance(p, s, 0.0, 0.0, 0.0, dt);
        worst = std::max(worst, std::abs(compliance_energy(p, s, 0.0) - e0) / e0);
    }
    CHECK(worst < 0.01);
}

TEST_CASE("relative-velocity damping dissipates") {
    ComplianceParams p;
    p.force_as_velocity_input = false;
    ComplianceState s;
    s.x_s = 0.008;
    s.x_s_p = 0.008;
    double e = compliance_energy(p, s, 0.0);
    double e0 = e;
    for (int i = 0; i < 50000; ++i) {
        s = step_compliance(p, s, 0.0, 0.0, 0.0, 1e-4);
        double e2 = compliance_energy(p, s, 0.0);
        CHECK(e2 <= e * (1.0 + 1e-9) + 1e-15);
        e = e2;
    }
    CHECK(e < 0.01 * e0);
}

TEST_CASE("primed side follows its own masses") {
    ComplianceParams p;
    p.M_s_p = 1.0;
    p.M_us_p = 0.4;
    ComplianceState s = run_steps(p, ComplianceState{}, 0.01, 0.0, 0.3, 1e-4);

    ComplianceParams swapped;
    swapped.M_s = 1.0;
    swapped.M_us = 0.4;
    ComplianceState t = run_steps(swapped, ComplianceState{}, 0.01, 0.0, 0.3, 1e-4);

    CHECK(s.x_s_p == doctest::Approx(t.x_s).epsilon(1e-12));
    CHECK(s.x_us_p == doctest::Approx(t.x_us).epsilon(1e-12));
}

TEST_CASE("input validation") {
    ComplianceParams p;
    ComplianceState s;
    CHECK_THROWS_AS((void)step_compliance(p, s, 0, 0, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)step_compliance(p, s, std::nan(""), 0, 0, 1e-3), std::invalid_argument);
    ComplianceParams bad;
    bad.k_s = 0.0;
    CHECK_THROWS_AS((void)step_compliance(bad, s, 0, 0, 0, 1e-3), std::invalid_argument);
}
