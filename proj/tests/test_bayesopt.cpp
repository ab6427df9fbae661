#include "evsizer/bayesopt.hpp"
#include "evsizer/errors.hpp"
#include "evsizer/sim.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace evsizer;

TEST_CASE("expected improvement closed form") {
    CHECK(expected_improvement(2.0, 0.0, 2.0) == 0.0);
    CHECK(expected_improvement(1.5, 0.0, 2.0) == doctest::Approx(0.5));
    CHECK(expected_improvement(0.0, 1.0, 0.0) == doctest::Approx(0.39894).epsilon(1e-4));
    CHECK(std::abs(expected_improvement(0.0, 1.0, 0.0) - 0.39894) < 1e-4);
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
    CHECK(normal_cdf(0.0) == 0.5);
    for (double mean : {-3.0, -0.5, 0.99}) CHECK(expected_improvement(mean, 0.3, 1.0) > 0.0);
    CHECK(expected_improvement(50.0, 1.0, 0.0) >= 0.0);
}

TEST_CASE("rng conversion is fixed") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(1);
    for (int i = 0; i < 100; ++i) CHECK(c.index(7) < 7);
}

TEST_CASE("latin hypercube puts one point per stratum") {
    Rng rng(3);
    const auto pts = latin_hypercube(8, 3, rng);
    REQUIRE(pts.size() == 8);
    for (std::size_t d = 0; d < 3; ++d) {
        std::set<int> strata;
        for (const auto& p : pts) strata.insert(static_cast<int>(p[d] * 8));
        CHECK(strata.size() == 8);
    }
}

TEST_CASE("halton sequence") {
    const auto h1 = halton(1, 2);
    CHECK(h1[0] == 0.5);
    CHECK(h1[1] == doctest::Approx(1.0 / 3.0));
    const auto h2 = halton(2, 2);
    CHECK(h2[0] == 0.25);
    CHECK(h2[1] == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(halton(1, 17), ArgumentError);
}

TEST_CASE("nelder-mead stays in the box and finds an interior minimum") {
    auto f = [](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.8) * (x[1] - 0.8); };
    const auto r = nelder_mead(f, {0.5, 0.5}, 0.1, 400);
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(0.8).epsilon(1e-3));
    auto edge = [](std::span<const double> x) { return x[0]; };
    const auto e = nelder_mead(edge, {0.5}, 0.2, 200);
    CHECK(e.x[0] >= 0.0);
    CHECK(e.x[0] < 1e-3);
}

TEST_CASE("degenerate model proposes the most distant region") {
    const std::vector<std::vector<double>> x{{0.0, 0.0}, {0.1, 0.1}, {0.0, 0.2}};
    const auto gp = fit_gp(x, {1.0, 1.0, 1.0});
    Rng rng(5);
    const auto p = propose(gp, 1.0, rng);
    CHECK(p.exploration);
    CHECK(p.ei == 0.0);
    for (const auto& xi : x) {
        const double d = std::hypot(p.x[0] - xi[0], p.x[1] - xi[1]);
        CHECK(d > 0.5);
    }
}

TEST_CASE("same seed, same proposal") {
    const std::vector<std::vector<double>> x{{0.1, 0.4}, {0.5, 0.9}, {0.8, 0.2}, {0.3, 0.7}};
    const auto gp = fit_gp(x, {2.0, 1.0, 3.0, 0.5});
    Rng a(11), b(11);
    const auto pa = propose(gp, 0.5, a);
    const auto pb = propose(gp, 0.5, b);
    CHECK(pa.x == pb.x);
    CHECK(pa.ei == pb.ei);
    CHECK(pa.ei > 0.0);
}

TEST_CASE("1-D quadratic: proposal lands near the minimizer within 10 iterations") {
    const double target = 0.37;
    const UnitObjective f = [&](std::size_t, std::span<const double> x) {
        return Observation{(x[0] - target) * (x[0] - target), 0.0};
    };
    const auto trace = minimize_unit_box(1, f, 10, 4, {});
    REQUIRE(trace.x.size() == trace.n_init + 10);
    REQUIRE(trace.best);
    CHECK(std::abs(trace.x[*trace.best][0] - target) < 0.05);
    CHECK(std::abs(trace.x.back()[0] - target) < 0.05);
}

TEST_CASE("3-D sphere reaches within 1 percent of its minimum") {
    const std::array<Interval, 3> box{Interval{0.8, 1.2}, Interval{0.8, 1.2}, Interval{1.0, 10.0}};
    const std::array<double, 3> centre{0.93, 1.11, 5.5};
    const UnitObjective f = [&](std::size_t, std::span<const double> u) {
        double s = 1.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double x = box[i].lo + u[i] * box[i].width();
            const double z = (x - centre[i]) / box[i].width();
            s += z * z;
        }
        return Observation{s, 0.0};
    };
    const auto trace = minimize_unit_box(3, f, 50, 1, {});
    REQUIRE(trace.best);
    CHECK(*trace.observations[*trace.best].value <= 1.01);
}

TEST_CASE("penalized targets never rank an infeasible point below the best feasible one") {
    std::vector<Observation> obs{{std::nullopt, 0.5}, {10.0, 0.0}, {std::nullopt, 1e-9}, {4.0, 0.0}, {-3.0, 0.0},
                                 {std::nullopt, 3.0}};
    const auto y = penalized_targets(obs, 1e7);
    const double best = -3.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i].feasible()) {
            CHECK(y[i] == *obs[i].value);
        } else {
            CHECK(y[i] > best);
        }
    }
    // nothing feasible yet: the fallback scale applies
    const auto y0 = penalized_targets({{std::nullopt, 0.2}, {std::nullopt, 0.4}}, 1e7);
    CHECK(y0[0] >= 1e7);
    CHECK(y0[1] > y0[0]);

    // worst feasible is negative: penalties still sit above every feasible value
    const auto yn = penalized_targets({{-5.0, 0.0}, {-2.0, 0.0}, {std::nullopt, 0.1}}, 1e7);
    CHECK(yn[2] > -2.0);
}

TEST_CASE("unit-box minimization is deterministic and seed-sensitive") {
    const UnitObjective f = [](std::size_t, std::span<const double> x) {
        return Observation{std::sin(5 * x[0]) + std::cos(3 * x[1]), 0.0};
    };
    const auto a = minimize_unit_box(2, f, 8, 9, {});
    const auto b = minimize_unit_box(2, f, 8, 9, {});
    const auto c = minimize_unit_box(2, f, 8, 10, {});
    CHECK(a.x == b.x);
    CHECK(a.x != c.x);
    CHECK(a.n_init == 5);
    CHECK(a.ei.size() == a.x.size());
    for (std::size_t i = 0; i < a.n_init; ++i) CHECK_FALSE(a.ei[i]);
    for (std::size_t i = a.n_init; i < a.x.size(); ++i) CHECK(a.ei[i]);
}

TEST_CASE("concurrent initial batch matches the sequential one") {
    const UnitObjective f = [](std::size_t, std::span<const double> x) {
        return Observation{(x[0] - 0.2) * (x[0] - 0.2) + x[1], 0.0};
    };
    BoOptions par;
    par.threads = 4;
    const auto a = minimize_unit_box(2, f, 5, 3, {});
    const auto b = minimize_unit_box(2, f, 5, 3, par);
    CHECK(a.x == b.x);
}

TEST_CASE("proportional runs pin the internal factors") {
    const EvalContext ctx{testing::wltc(), {}, {}, {}, {}};
    const DesignEvaluator eval = [&](const DesignVector& d) { return evaluate(d, ctx); };
    const auto run = optimize(eval, ScalingMode::Proportional, 5, 2);
    CHECK(run.n_init == 6);
    CHECK(run.history.size() == 11);
    for (const auto& r : run.history) {
        CHECK(r.design.mode == ScalingMode::Proportional);
        CHECK(r.design.k.internal_factors_unity());
    }
    const auto comb = optimize(eval, ScalingMode::Combined, 1, 2);
    CHECK(comb.n_init == 14);
    CHECK(comb.history.size() == 15);
}
