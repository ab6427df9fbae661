#include "evsizer/bayesopt.hpp"
#include "evsizer/errors.hpp"
#include "evsizer/gp.hpp"
#include "support.hpp"

#include <cmath>

using namespace evsizer;

TEST_CASE("Matern 5/2 kernel values") {
    GpHyperparameters hp{{1.0}, 2.0, 0.0};
    const std::vector<double> a{0.0}, b{0.0}, c{1.0};
    CHECK(matern52(a, b, hp) == 2.0);
    const double r = std::sqrt(5.0);
    CHECK(matern52(a, c, hp) == doctest::Approx(2.0 * (1 + r + 5.0 / 3.0) * std::exp(-r)).epsilon(1e-14));
}

TEST_CASE("two points interpolate exactly in the noise-free regime") {
    GpOptions opts;
    opts.optimize_noise = false;
    opts.initial.noise_variance = 1e-8;
    opts.noise_variance_lo = 1e-8;
    const auto gp = fit_gp({{0.2}, {0.7}}, {3.0, -1.5}, opts);
    CHECK(gp.predict(std::vector<double>{0.2}).mean == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(gp.predict(std::vector<double>{0.7}).mean == doctest::Approx(-1.5).epsilon(1e-6));
    CHECK(std::abs(gp.predict(std::vector<double>{0.2}).mean - 3.0) < 1e-6);
    CHECK(std::abs(gp.predict(std::vector<double>{0.7}).mean + 1.5) < 1e-6);
}

TEST_CASE("constant targets give a flat, certain model and zero EI") {
    const auto gp = fit_gp({{0.1, 0.1}, {0.5, 0.9}, {0.9, 0.3}}, {4.0, 4.0, 4.0});
    CHECK(gp.degenerate());
    for (double u : {0.0, 0.33, 0.77, 1.0}) {
        const std::vector<double> x{u, 1.0 - u};
        const auto p = gp.predict(x);
        CHECK(p.mean == 4.0);
        CHECK(p.variance == 0.0);
        CHECK(expected_improvement(gp, x, 4.0) == 0.0);
    }
}

TEST_CASE("posterior variance at training inputs stays at the noise level") {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    Rng rng(7);
    for (int i = 0; i < 12; ++i) {
        x.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        y.push_back(std::sin(3 * x.back()[0]) + x.back()[1] * x.back()[2]);
    }
    const auto gp = fit_gp(x, y);
    for (const auto& xi : x) {
        CHECK(gp.predict_standardized(xi).variance <= gp.hyperparameters().noise_variance + 1e-6);
    }
}

TEST_CASE("2-D quadratic is recovered within 5 percent") {
    auto f = [](double a, double b) { return 1.0 + (a - 0.4) * (a - 0.4) + 2.0 * (b - 0.6) * (b - 0.6); };
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i <= 4; ++i) {
        for (int j = 0; j <= 4; ++j) {
            x.push_back({i / 4.0, j / 4.0});
            y.push_back(f(i / 4.0, j / 4.0));
        }
    }
    const auto gp = fit_gp(x, y);
    for (const auto& q : std::vector<std::vector<double>>{{0.4, 0.6}, {0.13, 0.87}, {0.61, 0.29}, {0.9, 0.1}}) {
        CHECK(gp.predict(q).mean == doctest::Approx(f(q[0], q[1])).epsilon(0.05));
    }
}

TEST_CASE("duplicates are dropped and too few points rejected") {
    const auto gp = fit_gp({{0.1}, {0.1}, {0.6}}, {1.0, 1.0, 2.0});
    CHECK(gp.size() == 2);
    CHECK_THROWS_AS(fit_gp({{0.1}, {0.1 + 1e-12}}, {1.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(fit_gp({{0.1}}, {1.0}), ArgumentError);
}

TEST_CASE("fits are deterministic") {
    std::vector<std::vector<double>> x{{0.1, 0.2}, {0.4, 0.8}, {0.9, 0.5}, {0.3, 0.3}, {0.7, 0.1}};
    std::vector<double> y{1.0, 2.5, 0.3, 1.7, 0.9};
    const auto a = fit_gp(x, y);
    const auto b = fit_gp(x, y);
    CHECK(a.log_marginal_likelihood() == b.log_marginal_likelihood());
    CHECK(a.hyperparameters().length_scales == b.hyperparameters().length_scales);
}
