#pragma once

#include "evsizer/design.hpp"
#include "evsizer/gp.hpp"
#include "evsizer/sim.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace evsizer {

/// Seeded generator with a platform-independent conversion to [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

private:
    std::mt19937_64 engine_;
};

double normal_pdf(double z);
double normal_cdf(double z);

/// Expected improvement below `best` for a Gaussian with the given mean and stddev.
/// With zero stddev this is the plain improvement max(best - mean, 0).
double expected_improvement(double mean, double stddev, double best);
double expected_improvement(const GpModel& gp, std::span<const double> x, double best);

/// n points in [0,1]^dim, one per stratum in every dimension.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng);

/// Halton point `index` (>= 1) in [0,1)^dim using the first `dim` primes.
std::vector<double> halton(std::size_t index, std::size_t dim);

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Minimizes f over [0,1]^d; trial points are clamped into the box.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                             double initial_step = 0.05, int max_evals = 200);

struct BoOptions {
    std::size_t n_init = 0; // 0: max(5, 2 * dim)
    std::size_t candidates = 1024;
    std::size_t local_candidates = 256; // around the incumbent
    std::size_t refine_starts = 5;
    int refine_evals = 200;
    double penalty_fallback = 1e7;
    unsigned threads = 1; // concurrent evaluations of the initial design
    GpOptions gp;
};

struct Proposal {
    std::vector<double> x; // unit box
    double ei = 0.0;
    bool exploration = false;
};

/// Maximizes EI over the unit box: seeded shifted-Halton candidates plus a cloud around
/// the incumbent, then Nelder-Mead from the best few. Falls back to the candidate farthest from the training set when
/// EI vanishes everywhere.
Proposal propose(const GpModel& gp, double best_y, Rng& rng, const BoOptions& options = {});

/// Result of a black-box evaluation: a value when the point is feasible, otherwise
/// the constraint violation (> 0).
struct Observation {
    std::optional<double> value;
    double violation = 0.0;
    bool feasible() const noexcept { return value.has_value() && violation <= 0.0; }
};

/// Evaluation callback; receives the evaluation index and the point in the unit box.
/// Must be safe to call concurrently for distinct indices when `threads > 1`.
using UnitObjective = std::function<Observation(std::size_t, std::span<const double>)>;

struct BoxTrace {
    std::vector<std::vector<double>> x;
    std::vector<Observation> observations;
    std::vector<std::optional<double>> ei; // empty for the initial design
    std::vector<bool> exploration;
    std::size_t n_init = 0;
    std::optional<std::size_t> best; // index of the minimum feasible value
};

/// GP targets for a history: feasible values as-is, infeasible ones placed above the
/// worst feasible value so far (or `fallback`), increasing with the violation.
std::vector<double> penalized_targets(const std::vector<Observation>& obs, double fallback);

/// Latin-hypercube initial design followed by `iterations` EI steps over [0,1]^dim.
BoxTrace minimize_unit_box(std::size_t dim, const UnitObjective& f, std::size_t iterations, std::uint64_t seed,
                           const BoOptions& options = {});

struct RunResult {
    ScalingMode mode = ScalingMode::Combined;
    std::uint64_t seed = 0;
    std::size_t n_init = 0;
    std::size_t iterations = 0;
    std::vector<EvaluationRecord> history;
    std::vector<std::optional<double>> ei;
    std::optional<std::size_t> best_index;
    double wall_time = 0.0; // s

    bool infeasible_run() const noexcept { return !best_index.has_value(); }
    const EvaluationRecord* best() const noexcept { return best_index ? &history[*best_index] : nullptr; }
};

using DesignEvaluator = std::function<EvaluationRecord(const DesignVector&)>;

/// Minimizes cycle energy over the mode's free variables within `bounds`.
RunResult optimize(const DesignEvaluator& evaluate, ScalingMode mode, std::size_t iterations, std::uint64_t seed,
                   const DesignBounds& bounds = {}, const BoOptions& options = {});

} // namespace evsizer
