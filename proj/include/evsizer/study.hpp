#pragma once

#include "evsizer/bayesopt.hpp"
#include "evsizer/config.hpp"
#include "evsizer/sim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace evsizer {

/// Loads and resamples the configured cycle and bundles it with the model parameters.
/// Relative cycle paths are tried as given, then against `search_root`.
EvalContext make_context(const RunConfig& config, const std::filesystem::path& search_root = {});

/// One seeded optimization in one scaling mode.
RunResult run_single(const RunConfig& config, const EvalContext& ctx, ScalingMode mode, std::uint64_t seed);

/// Run directory name, e.g. `combined-seed1`.
std::string run_dir_name(ScalingMode mode, std::uint64_t seed);

/// Result file, iteration log, config snapshot, summary and plot data for one run.
void write_run(const RunResult& result, const RunConfig& config, const EvalContext& ctx,
               const std::filesystem::path& dir);

/// Convergence curve, design scatter and per-step power trace of the best design.
void emit_plot_data(const RunResult& result, const EvalContext& ctx, const std::filesystem::path& dir);

/// Solutions table (one column per run, internal factors blank in proportional runs).
std::string solutions_table(const std::vector<RunResult>& runs);

/// Per-seed proportional vs combined comparison; empty when a mode is missing.
std::string comparison_table(const std::vector<RunResult>& runs);

struct StudyOutcome {
    std::vector<RunResult> runs;
    std::filesystem::path output_dir;
    bool any_infeasible() const noexcept;
};

/// Runs every configured mode and seed, writing one directory per run plus the
/// study-level tables, summary and metadata under `config.output_dir`.
StudyOutcome run_study(const RunConfig& config, const std::filesystem::path& search_root = {});

} // namespace evsizer
