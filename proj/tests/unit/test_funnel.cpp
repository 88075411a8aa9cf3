#include <doctest.h>

#include "latchsim/funnel.hpp"

using namespace latchsim;

TEST_CASE("acceptance area of the default mouth") {
    FunnelGeometry g;
    CHECK(g.acceptance_area_mm2() == doctest::Approx(5026.55).epsilon(0.01 / 5026.55));
}

TEST_CASE("effective radius tracks the aperture") {
    FunnelGeometry g;
    CHECK(aperture_effective_radius(g, 0.0) == doctest::Approx(9.0));
    CHECK(aperture_effective_radius(g, 1.0) == doctest::Approx(40.0));
    CHECK(aperture_effective_radius(g, 0.5) == doctest::Approx(24.5));
    // clamped outside [0, 1]
    CHECK(aperture_effective_radius(g, 1.5) == doctest::Approx(40.0));
    CHECK(aperture_effective_radius(g, -0.5) == doctest::Approx(9.0));
}

TEST_CASE("acceptance boundary at full opening") {
    FunnelGeometry g;
    FunnelState open;
    CHECK(acceptance_check(g, open, {31.0, 0.0}));
    CHECK_FALSE(acceptance_check(g, open, {32.0, 0.0}));
    CHECK(acceptance_check(g, open, {0.0, 31.0}));
    CHECK(acceptance_check(g, open, {0.0, -31.0}));
    CHECK_FALSE(acceptance_check(g, open, {22.7, 22.7}));  // norm 32.1
    CHECK(acceptance_check(g, open, {21.9, 21.9}));        // norm 31.0
}

TEST_CASE("closed arms accept only a centered stud") {
    FunnelGeometry g;
    FunnelState closed;
    closed.aperture_left = 0.0;
    closed.aperture_right = 0.0;
    CHECK(acceptance_check(g, closed, {0.0, 0.0}));
    CHECK_FALSE(acceptance_check(g, closed, {0.5, 0.0}));
}

TEST_CASE("offset sign picks the side in two_dof mode") {
    FunnelGeometry g;
    FunnelState s;
    s.mode = FunnelMode::two_dof;
    s.aperture_left = 1.0;
    s.aperture_right = 0.0;
    CHECK(acceptance_check(g, s, {10.0, 0.0}));        // left side, open
    CHECK_FALSE(acceptance_check(g, s, {-10.0, 0.0})); // right side, shut
    CHECK(acceptance_check(g, s, {0.0, 5.0}));         // x == 0 counts as left
}

TEST_CASE("one_dof aperture command drives both sides") {
    FunnelState s;
    s.mode = FunnelMode::one_dof;
    FunnelState n = set_aperture(s, 0.3, 0.9);
    CHECK(n.aperture_left == doctest::Approx(0.3));
    CHECK(n.aperture_right == doctest::Approx(0.3));

    s.mode = FunnelMode::two_dof;
    n = set_aperture(s, 0.3, 0.9);
    CHECK(n.aperture_left == doctest::Approx(0.3));
    CHECK(n.aperture_right == doctest::Approx(0.9));
}

TEST_CASE("set_aperture rejects out-of-range commands") {
    FunnelState s;
    CHECK_THROWS_AS((void)set_aperture(s, -0.1, 0.5), std::out_of_range);
    CHECK_THROWS_AS((void)set_aperture(s, 0.5, 1.1), std::out_of_range);
}

TEST_CASE("receptor state machine") {
    FunnelState s;

    // open + stud -> trapped, one latch event
    ReceptorResult r = receptor_event(s, true);
    CHECK(r.latch_event);
    CHECK_FALSE(r.fault);
    CHECK(r.state.receptor == ReceptorState::closed_trapped);

    // trapped + stud again -> no new event
    ReceptorResult r2 = receptor_event(r.state, true);
    CHECK_FALSE(r2.latch_event);
    CHECK_FALSE(r2.fault);
    CHECK(r2.state.receptor == ReceptorState::closed_trapped);

    // open + nothing -> no-op
    ReceptorResult r3 = receptor_event(s, false);
    CHECK_FALSE(r3.latch_event);
    CHECK(r3.state.receptor == ReceptorState::open);

    // closed_empty + stud -> mechanical contradiction
    FunnelState ce;
    ce.receptor = ReceptorState::closed_empty;
    ReceptorResult r4 = receptor_event(ce, true);
    CHECK(r4.fault);
    CHECK_FALSE(r4.latch_event);

    // release reopens
    FunnelState freed = receptor_release(r.state);
    CHECK(freed.receptor == ReceptorState::open);
}

TEST_CASE("steering offset from aperture asymmetry") {
    FunnelState s;
    s.mode = FunnelMode::two_dof;
    s.aperture_left = 1.0;
    s.aperture_right = 0.0;
    CHECK(steering_offset(s, 10.0) == doctest::Approx(10.0));
    s.aperture_left = 0.2;
    s.aperture_right = 0.8;
    CHECK(steering_offset(s, 10.0) == doctest::Approx(-6.0));
    s.aperture_left = 0.5;
    s.aperture_right = 0.5;
    CHECK(steering_offset(s, 10.0) == doctest::Approx(0.0));

    s.mode = FunnelMode::one_dof;
    s.aperture_left = 1.0;
    s.aperture_right = 0.0;
    CHECK(steering_offset(s, 10.0) == 0.0);
}

TEST_CASE("geometry validation") {
    FunnelGeometry g;
    g.stud_radius_mm = 40.0;  // stud as large as mouth
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = FunnelGeometry{};
    g.cone_height_mm = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
