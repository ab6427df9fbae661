#include "evsizer/errors.hpp"
#include "evsizer/motor.hpp"
#include "support.hpp"

using namespace evsizer;
using testing::rel_close;

TEST_CASE("identity scaling reproduces the reference machine exactly") {
    const ReferenceMachine ref;
    const ScalingVector one;
    const auto g = scale_geometry(ref, one);
    CHECK(g.d_mw == ref.d_mw0);
    CHECK(g.d_ml == ref.d_ml0);
    CHECK(g.d_sd == ref.d_sd0);
    CHECK(g.d_tw == ref.d_tw0);
    const auto l = loading_factors(one, ref);
    CHECK(l.lambda_B == 1.0);
    CHECK(l.lambda_A == 1.0);
    const MotorModel m(ref, one);
    CHECK(m.peak_torque() == ref.T_max0);
    CHECK(m.base_speed() == ref.w_base0);
    CHECK(m.max_speed() == ref.w_max0);
}

TEST_CASE("geometry scaling") {
    const ReferenceMachine ref;
    ScalingVector k;
    k.k_rad = 1.10;
    k.k_mw = 1.05;
    CHECK(rel_close(scale_geometry(ref, k).d_mw, 1.155 * ref.d_mw0, 1e-9));

    ScalingVector p;
    p.k_rad = 1.03;
    const auto g = scale_geometry(ref, p);
    CHECK(rel_close(g.d_mw, 1.03 * ref.d_mw0, 1e-12));
    CHECK(rel_close(g.d_ml, 1.03 * ref.d_ml0, 1e-12));
    CHECK(rel_close(g.d_sd, 1.03 * ref.d_sd0, 1e-12));
    CHECK(rel_close(g.d_tw, 1.03 * ref.d_tw0, 1e-12));
}

TEST_CASE("loading factor oracles") {
    const ReferenceMachine ref;
    ScalingVector k;
    k.k_mw = 1.05;
    k.k_ml = 0.92;
    k.k_tw = 0.90;
    const double gain = 0.92 * 1.2 / (0.92 + 0.2);
    CHECK(gain == doctest::Approx(0.9857).epsilon(1e-4));
    CHECK(rel_close(loading_factors(k, ref).lambda_B, std::min(1.05 * gain, 1.1 * 0.9), 1e-12));
    CHECK(loading_factors(k, ref).lambda_B == doctest::Approx(0.99).epsilon(1e-12));

    ScalingVector s;
    s.k_sd = 0.95;
    s.k_tw = 0.90;
    CHECK(rel_close(loading_factors(s, ref).lambda_A, 1.045, 1e-9));
}

TEST_CASE("out-of-bounds factors are rejected") {
    const ReferenceMachine ref;
    ScalingVector k;
    k.k_rad = 1.3;
    CHECK_THROWS_AS(scale_geometry(ref, k), DomainError);
    CHECK_THROWS_AS(MotorModel(ref, k), DomainError);
    try {
        loading_factors(k, ref);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("k_rad") != std::string::npos);
    }
}

TEST_CASE("envelope scaling laws") {
    const ReferenceMachine ref;
    ScalingVector ax;
    ax.k_ax = 0.8;
    const MotorModel m(ref, ax);
    CHECK(rel_close(m.peak_torque(), 0.8 * ref.T_max0, 1e-12));
    CHECK(rel_close(m.base_speed(), ref.w_base0 / 0.8, 1e-12));
    CHECK(rel_close(m.peak_torque() * m.base_speed(), ref.rated_power(), 1e-12));

    ScalingVector rad;
    rad.k_rad = 1.2;
    const MotorModel r(ref, rad);
    CHECK(rel_close(r.peak_torque(), 1.728 * ref.T_max0, 1e-12));
    CHECK(rel_close(r.max_speed(), ref.w_max0 / 1.2, 1e-12));
}

TEST_CASE("torque envelope shape") {
    const MotorModel m(ReferenceMachine{}, ScalingVector{});
    CHECK(m.torque_limit(0.0) == 280.0);
    CHECK(m.torque_limit(430.0) == 280.0);
    CHECK(m.torque_limit(860.0) == doctest::Approx(140.0));
    CHECK(m.torque_limit(1100.0) == doctest::Approx(280.0 * 430.0 / 1100.0));
    CHECK(m.torque_limit(1100.1) == 0.0);
    CHECK(m.in_envelope(-280.0, 100.0));
    CHECK_FALSE(m.in_envelope(281.0, 100.0));
    CHECK_THROWS_AS(m.losses(300.0, 10.0), InfeasiblePointError);
}

TEST_CASE("loss map") {
    const ReferenceMachine ref;
    const MotorModel m(ref, ScalingVector{});
    CHECK(m.losses(0.0, 0.0) == 0.0);
    CHECK(m.input_power(0.0, 0.0) == 0.0);

    const auto rated = m.loss_breakdown(ref.T_max0, ref.w_base0);
    CHECK(rel_close(rated.copper, ref.c_cu, 1e-12));
    CHECK(rel_close(rated.iron, ref.c_hys + ref.c_eddy, 1e-12));
    CHECK(rel_close(rated.mechanical, ref.c_mech, 1e-12));
    CHECK(rel_close(rated.total(), ref.c_cu + ref.c_hys + ref.c_eddy + ref.c_mech, 1e-12));

    ScalingVector k;
    k.k_ax = 0.9;
    k.k_sd = 1.05;
    const MotorModel s(ref, k);
    const double c1 = s.loss_breakdown(50.0, 300.0).copper;
    const double c2 = s.loss_breakdown(100.0, 300.0).copper;
    CHECK(rel_close(c2, 4.0 * c1, 1e-12));
    CHECK(s.loss_breakdown(-100.0, 300.0).copper == c2);

    CHECK(rel_close(m.input_power(100.0, 200.0), 100.0 * 200.0 + m.losses(100.0, 200.0), 1e-15));
}

TEST_CASE("reference machine validation") {
    ReferenceMachine ref;
    CHECK_NOTHROW(ref.validate());
    ref.c_cu = 0.0;
    ref.c_hys = 0.0;
    CHECK_NOTHROW(ref.validate());
    ref = {};
    ref.w_base0 = 2000.0;
    CHECK_THROWS_AS(ref.validate(), ValidationError);
    ref = {};
    ref.b_sat = 1.0;
    CHECK_THROWS_AS(ref.validate(), ValidationError);
}
