#include <doctest.h>

#include <cmath>

#include "latchsim/dynamics.hpp"
#include "latchsim/rng.hpp"

using namespace latchsim;

namespace {

BodyParams nominal() { return BodyParams{}; }

}  // namespace

TEST_CASE("one step from rest matches the closed form") {
    BoatState s;
    BodyParams p = nominal();
    double dt = 0.01, F = 12.0;
    BoatState n = step_body(s, p, {F, 0, 0}, {}, dt);
    double expect = (F / p.mass * dt) / (1.0 + p.linear_drag.x / p.mass * dt);
    CHECK(n.velocity_body.x == doctest::Approx(expect).epsilon(1e-14));
    CHECK(n.position.x == doctest::Approx(expect * dt).epsilon(1e-14));
    CHECK(n.velocity_body.y == 0.0);
    CHECK(n.yaw == 0.0);
}

TEST_CASE("constant force settles at terminal velocity F/d") {
    BoatState s;
    BodyParams p = nominal();
    double F = 10.0;
    for (int i = 0; i < 60000; ++i) s = step_body(s, p, {F, 0, 0}, {}, 0.001);
    CHECK(s.velocity_body.x == doctest::Approx(F / p.linear_drag.x).epsilon(1e-9));

    // the terminal velocity is an exact fixed point of the update
    BoatState t = s;
    t.velocity_body.x = F / p.linear_drag.x;
    BoatState u = step_body(t, p, {F, 0, 0}, {}, 0.001);
    CHECK(u.velocity_body.x == doctest::Approx(F / p.linear_drag.x).epsilon(1e-14));
}

TEST_CASE("kinetic energy never grows without applied force") {
    BoatState s;
    s.velocity_body = {0.8, -0.3};
    s.yaw_rate = 0.5;
    BodyParams p = nominal();
    double e = kinetic_energy(s, p);
    for (int i = 0; i < 5000; ++i) {
        s = step_body(s, p, {}, {}, 0.002);
        double e2 = kinetic_energy(s, p);
        CHECK(e2 <= e * (1.0 + 1e-12));
        e = e2;
    }
    CHECK(e < 0.01 * kinetic_energy({{0, 0}, 0.0, {0.8, -0.3}, 0.5}, p));
}

TEST_CASE("position integrates with the pre-step heading") {
    BoatState s;
    s.velocity_body = {1.0, 0.0};
    BodyParams p = nominal();
    // a huge yaw moment changes heading within the step; displacement must
    // still follow the old heading
    BoatState n = step_body(s, p, {0, 0, 50.0}, {}, 0.01);
    CHECK(n.yaw > 0.0);
    CHECK(n.position.y == doctest::Approx(0.0));
    CHECK(n.position.x > 0.0);
}

TEST_CASE("yaw stays normalized") {
    BoatState s;
    s.yaw = 3.0;
    s.yaw_rate = 2.0;
    BodyParams p = nominal();
    for (int i = 0; i < 2000; ++i) {
        s = step_body(s, p, {0, 0, 10.0}, {}, 0.01);
        CHECK(s.yaw > -kPi - 1e-12);
        CHECK(s.yaw <= kPi + 1e-12);
    }
}

TEST_CASE("step_body rejects bad input") {
    BoatState s;
    BodyParams p = nominal();
    CHECK_THROWS_AS((void)step_body(s, p, {}, {}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)step_body(s, p, {}, {}, -1e-3), std::invalid_argument);
    CHECK_THROWS_AS((void)step_body(s, p, {std::nan(""), 0, 0}, {}, 1e-3), std::invalid_argument);
    s.yaw = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)step_body(s, p, {}, {}, 1e-3), std::invalid_argument);
    BodyParams bad = p;
    bad.mass = 0.0;
    CHECK_THROWS_AS((void)step_body(BoatState{}, bad, {}, {}, 1e-3), std::invalid_argument);
}

TEST_CASE("integrator converges at first order") {
    auto simulate = [](double dt) {
        BoatState s;
        BodyParams p;
        for (double t = 0.0; t < 2.0 - dt / 2; t += dt) {
            Vec3 f{8.0 * std::sin(2.0 * t), 3.0 * std::cos(3.0 * t), 1.5 * std::sin(t)};
            s = step_body(s, p, f, {}, dt);
        }
        return s;
    };
    BoatState ref = simulate(1e-6);
    auto err = [&](const BoatState& s) {
        return std::abs(s.position.x - ref.position.x) + std::abs(s.position.y - ref.position.y) +
               std::abs(s.yaw - ref.yaw);
    };
    double e1 = err(simulate(4e-3));
    double e2 = err(simulate(2e-3));
    CHECK(e1 / e2 > 1.6);
    CHECK(e1 / e2 < 2.6);
}

TEST_CASE("disturbance is a pure function of seed and time") {
    DisturbanceSignal sig;
    sig.wave_amplitude_pos_m = 0.03;
    sig.wave_amplitude_pitch_roll_deg = 1.5;
    sig.wave_period_s = 4.0;
    sig.seed = 11;

    DisturbanceSample a = sample_disturbance(sig, 1.75);
    DisturbanceSample b = sample_disturbance(sig, 1.75);
    CHECK(a.force.x == b.force.x);
    CHECK(a.force.y == b.force.y);
    CHECK(a.force.z == b.force.z);
    CHECK(a.pitch_deg == b.pitch_deg);
    CHECK(a.roll_deg == b.roll_deg);

    DisturbanceSignal other = sig;
    other.seed = 12;
    DisturbanceSample c = sample_disturbance(other, 1.75);
    CHECK(a.force.x != c.force.x);
}

TEST_CASE("disturbance amplitude bounds") {
    DisturbanceSignal sig;
    sig.wave_amplitude_pos_m = 0.02;
    sig.wave_amplitude_pitch_roll_deg = 2.0;
    sig.wave_period_s = 5.0;
    sig.seed = 3;
    double w0 = 2.0 * kPi / sig.wave_period_s;
    double f_bound = sig.wave_amplitude_pos_m * w0 * w0 * 35.0;  // weights sum to 1
    for (int i = 0; i < 2000; ++i) {
        double t = 0.01 * i;
        DisturbanceSample d = sample_disturbance(sig, t);
        CHECK(std::abs(d.force.x) <= f_bound * (1.0 + 1e-9));
        CHECK(std::abs(d.force.y) <= f_bound * (1.0 + 1e-9));
        CHECK(std::abs(d.pitch_deg) <= sig.wave_amplitude_pitch_roll_deg + 1e-9);
        CHECK(std::abs(d.roll_deg) <= sig.wave_amplitude_pitch_roll_deg + 1e-9);
    }
}

TEST_CASE("zero-amplitude disturbance is exactly zero") {
    DisturbanceSignal sig;
    sig.seed = 77;
    DisturbanceSample d = sample_disturbance(sig, 12.3);
    CHECK(d.force.x == 0.0);
    CHECK(d.force.y == 0.0);
    CHECK(d.force.z == 0.0);
    CHECK(d.pitch_deg == 0.0);
    CHECK(d.roll_deg == 0.0);
}

TEST_CASE("disturbance validation") {
    DisturbanceSignal sig;
    sig.wave_period_s = 0.0;
    CHECK_THROWS_AS((void)sample_disturbance(sig, 0.0), std::invalid_argument);
    DisturbanceSignal neg;
    neg.wave_amplitude_pos_m = -1.0;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}
