#include "evsizer/bayesopt.hpp"

#include "evsizer/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>

namespace evsizer {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double stddev, double best) {
    const double improvement = best - mean;
    if (!(stddev > 0.0)) return std::max(improvement, 0.0);
    const double z = improvement / stddev;
    return std::max(0.0, improvement * normal_cdf(z) + stddev * normal_pdf(z));
}

double expected_improvement(const GpModel& gp, std::span<const double> x, double best) {
    const auto p = gp.predict(x);
    return expected_improvement(p.mean, p.stddev(), best);
}

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i][d] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
        }
    }
    return pts;
}

std::vector<double> halton(std::size_t index, std::size_t dim) {
    static constexpr std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim > std::size(kPrimes)) throw ArgumentError("halton: dimension above 16");
    std::vector<double> out(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const std::size_t base = kPrimes[d];
        double f = 1.0;
        double r = 0.0;
        for (std::size_t i = index; i > 0; i /= base) {
            f /= static_cast<double>(base);
            r += f * static_cast<double>(i % base);
        }
        out[d] = r;
    }
    return out;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                             double initial_step, int max_evals) {
    const std::size_t d = start.size();
    auto clamp_box = [](std::vector<double>& x) {
        for (auto& xi : x) xi = std::clamp(xi, 0.0, 1.0);
    };
    NelderMeadResult res;
    auto eval = [&](std::vector<double>& x) {
        clamp_box(x);
        ++res.evaluations;
        return f(x);
    };

    std::vector<std::vector<double>> simplex(d + 1, start);
    std::vector<double> values(d + 1);
    for (std::size_t i = 0; i < d; ++i) {
        // step inward when the start sits on the upper face
        simplex[i + 1][i] += start[i] + initial_step <= 1.0 ? initial_step : -initial_step;
    }
    for (std::size_t i = 0; i <= d; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(d + 1);
    while (res.evaluations < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[d - (d > 0 ? 1 : 0)];
        if (std::abs(values[worst] - values[best]) <= 1e-14 * (std::abs(values[best]) + 1e-300)) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t c = 0; c < d; ++c) centroid[c] += simplex[i][c] / static_cast<double>(d);
        }
        auto along = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t c = 0; c < d; ++c) p[c] = centroid[c] + t * (simplex[worst][c] - centroid[c]);
            return p;
        };

        auto reflected = along(-1.0);
        const double fr = eval(reflected);
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
        } else {
            auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = std::move(contracted);
                values[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t c = 0; c < d; ++c) {
                        simplex[i][c] = simplex[best][c] + 0.5 * (simplex[i][c] - simplex[best][c]);
                    }
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }
    const auto best_it = std::min_element(values.begin(), values.end());
    res.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
    res.value = *best_it;
    return res;
}

Proposal propose(const GpModel& gp, double best_y, Rng& rng, const BoOptions& options) {
    const std::size_t dim = gp.dimension();
    std::vector<double> shift(dim);
    for (auto& s : shift) s = rng.uniform();

    std::vector<std::vector<double>> candidates;
    candidates.reserve(options.candidates + options.local_candidates);
    for (std::size_t i = 0; i < options.candidates; ++i) {
        auto h = halton(i + 1, dim);
        for (std::size_t d = 0; d < dim; ++d) h[d] = std::fmod(h[d] + shift[d], 1.0);
        candidates.push_back(std::move(h));
    }
    // Space-filling points thin out quickly with dimension; add a cloud around the
    // incumbent at a few radii so the exploitation side of EI is actually sampled.
    if (options.local_candidates > 0) {
        Eigen::Index incumbent = 0;
        gp.targets().minCoeff(&incumbent);
        constexpr double kRadii[] = {0.2, 0.05, 0.01};
        for (std::size_t i = 0; i < options.local_candidates; ++i) {
            const double r = kRadii[i % std::size(kRadii)];
            std::vector<double> c(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                const double centre = gp.inputs()(incumbent, static_cast<Eigen::Index>(d));
                c[d] = std::clamp(centre + r * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
            }
            candidates.push_back(std::move(c));
        }
    }
    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) scores[i] = expected_improvement(gp, candidates[i], best_y);

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    if (candidates.empty()) throw ArgumentError("propose: no candidates");
    if (!(scores[order.front()] > 0.0)) {
        // EI vanishes everywhere: explore the candidate farthest from the data
        const auto& x = gp.inputs();
        std::size_t far = 0;
        double far_dist = -1.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (Eigen::Index r = 0; r < x.rows(); ++r) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    const double diff = candidates[i][c] - x(r, static_cast<Eigen::Index>(c));
                    d2 += diff * diff;
                }
                nearest = std::min(nearest, d2);
            }
            if (nearest > far_dist) {
                far_dist = nearest;
                far = i;
            }
        }
        return {candidates[far], 0.0, true};
    }

    Proposal best{candidates[order.front()], scores[order.front()], false};
    const auto neg_ei = [&](std::span<const double> x) { return -expected_improvement(gp, x, best_y); };
    const std::size_t starts = std::min(options.refine_starts, candidates.size());
    for (std::size_t s = 0; s < starts; ++s) {
        auto refined = nelder_mead(neg_ei, candidates[order[s]], 0.05, options.refine_evals);
        if (-refined.value > best.ei) best = {std::move(refined.x), -refined.value, false};
    }
    return best;
}

std::vector<double> penalized_targets(const std::vector<Observation>& obs, double fallback) {
    std::optional<double> worst, best;
    for (const auto& o : obs) {
        if (!o.feasible()) continue;
        worst = worst ? std::max(*worst, *o.value) : *o.value;
        best = best ? std::min(*best, *o.value) : *o.value;
    }
    // Infeasible points sit above the worst feasible value by at most one feasible
    // spread, so the penalty never swamps the standardization of the feasible ones.
    const double base = worst.value_or(fallback);
    const double spread = std::max({worst ? *worst - *best : 0.0, 0.05 * std::abs(base), 1e-9});
    std::vector<double> y(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double v = std::max(obs[i].violation, 0.0);
        y[i] = obs[i].feasible() ? *obs[i].value : base + spread * v / (1.0 + v);
    }
    return y;
}

BoxTrace minimize_unit_box(std::size_t dim, const UnitObjective& f, std::size_t iterations, std::uint64_t seed,
                           const BoOptions& options) {
    if (dim == 0) throw ArgumentError("minimize_unit_box: zero dimension");
    BoxTrace trace;
    trace.n_init = options.n_init > 0 ? options.n_init : std::max<std::size_t>(5, 2 * dim);

    // independent streams: the initial design and the loop can be replayed separately
    Rng init_rng(seed + 0x9E3779B97F4A7C15ULL);
    Rng loop_rng(seed);

    trace.x = latin_hypercube(trace.n_init, dim, init_rng);
    trace.observations.resize(trace.n_init);
    if (options.threads > 1) {
        std::vector<std::future<void>> jobs;
        std::size_t next = 0;
        while (next < trace.n_init) {
            jobs.clear();
            for (unsigned t = 0; t < options.threads && next < trace.n_init; ++t, ++next) {
                jobs.push_back(std::async(std::launch::async,
                                          [&, i = next] { trace.observations[i] = f(i, trace.x[i]); }));
            }
            for (auto& j : jobs) j.get();
        }
    } else {
        for (std::size_t i = 0; i < trace.n_init; ++i) trace.observations[i] = f(i, trace.x[i]);
    }
    trace.ei.assign(trace.n_init, std::nullopt);
    trace.exploration.assign(trace.n_init, false);

    for (std::size_t it = 0; it < iterations; ++it) {
        const auto y = penalized_targets(trace.observations, options.penalty_fallback);
        const auto gp = fit_gp(trace.x, y, options.gp);
        const double best_y = *std::min_element(y.begin(), y.end());
        auto p = propose(gp, best_y, loop_rng, options);
        const std::size_t index = trace.x.size();
        trace.observations.push_back(f(index, p.x));
        trace.x.push_back(std::move(p.x));
        trace.ei.emplace_back(p.ei);
        trace.exploration.push_back(p.exploration);
    }

    for (std::size_t i = 0; i < trace.observations.size(); ++i) {
        const auto& o = trace.observations[i];
        if (o.feasible() && (!trace.best || *o.value < *trace.observations[*trace.best].value)) trace.best = i;
    }
    return trace;
}

RunResult optimize(const DesignEvaluator& evaluate, ScalingMode mode, std::size_t iterations, std::uint64_t seed,
                   const DesignBounds& bounds, const BoOptions& options) {
    if (iterations < 1) throw ArgumentError("optimize: iterations must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t dim = DesignVector::dimension(mode);
    const auto box = DesignVector::coordinate_bounds(mode, bounds);
    const std::size_t n_init = options.n_init > 0 ? options.n_init : std::max<std::size_t>(5, 2 * dim);

    RunResult result;
    result.mode = mode;
    result.seed = seed;
    result.n_init = n_init;
    result.iterations = iterations;
    result.history.resize(n_init + iterations);

    const UnitObjective objective = [&](std::size_t index, std::span<const double> u) {
        std::vector<double> coords(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            coords[d] = std::clamp(box[d].lo + u[d] * box[d].width(), box[d].lo, box[d].hi);
        }
        auto rec = evaluate(DesignVector::from_coordinates(mode, coords));
        Observation obs;
        if (rec.feasible) obs.value = rec.energy;
        obs.violation = rec.feasible ? 0.0 : std::max(rec.margins.violation_norm(), 1e-12);
        result.history[index] = std::move(rec);
        return obs;
    };

    auto trace = minimize_unit_box(dim, objective, iterations, seed, options);
    result.ei = std::move(trace.ei);
    result.best_index = trace.best;
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace evsizer
