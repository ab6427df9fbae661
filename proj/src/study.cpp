#include "evsizer/study.hpp"

#include "evsizer/errors.hpp"
#include "evsizer/version.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

namespace evsizer {

using detail::format_number;
using detail::format_optional;
namespace fs = std::filesystem;

namespace {

constexpr double kPublishedDeltaPercent = -0.13;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void make_dirs(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path resolve_cycle(const std::string& path, const fs::path& search_root) {
    const fs::path p(path);
    if (p.is_absolute() || fs::exists(p)) return p;
    if (!search_root.empty() && fs::exists(search_root / p)) return search_root / p;
#ifdef EVSIZER_SOURCE_DIR
    if (fs::exists(fs::path(EVSIZER_SOURCE_DIR) / p)) return fs::path(EVSIZER_SOURCE_DIR) / p;
#endif
    return p;
}

nlohmann::ordered_json optional_json(const std::optional<double>& x) {
    return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json record_json(const EvaluationRecord& r) {
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(r.design.mode));
    j["k_ax"] = r.design.k.k_ax;
    j["k_rad"] = r.design.k.k_rad;
    j["k_mw"] = r.design.k.k_mw;
    j["k_ml"] = r.design.k.k_ml;
    j["k_sd"] = r.design.k.k_sd;
    j["k_tw"] = r.design.k.k_tw;
    j["gamma"] = r.design.gamma;
    j["E_ac_J"] = optional_json(r.energy);
    j["feasible"] = r.feasible;
    j["margins"] = {
        {"top_speed", r.margins.top_speed},
        {"acceleration", r.margins.acceleration},
        {"gradeability", r.margins.gradeability},
        {"cycle", optional_json(r.margins.cycle)},
    };
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j;
}

std::string trace_csv(const std::vector<TraceRow>& rows, const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "t_s,v_ms,T_m_Nm,w_m_rads,P_ac_W,P_loss_W\n";
    for (const auto& r : rows) {
        out << format_number(r.t) << ',' << format_number(r.v) << ',' << format_number(r.torque) << ','
            << format_number(r.w) << ',' << format_number(r.p_ac) << ',' << format_number(r.p_loss) << '\n';
    }
    return out.str();
}

std::string iteration_log(const RunResult& result) {
    std::ostringstream out;
    out << "iter,phase,k_ax,k_rad,k_mw,k_ml,k_sd,k_tw,gamma,E_ac_J,feasible,m_top_speed,m_acceleration,"
           "m_gradeability,m_cycle,ei,best_E_ac_J\n";
    std::optional<double> best;
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        const auto& r = result.history[i];
        if (r.feasible && r.energy && (!best || *r.energy < *best)) best = r.energy;
        const auto full = r.design.full();
        out << i << ',' << (i < result.n_init ? "init" : "bo");
        for (double x : full) out << ',' << format_number(x);
        out << ',' << format_optional(r.energy) << ',' << (r.feasible ? 1 : 0) << ','
            << format_number(r.margins.top_speed) << ',' << format_number(r.margins.acceleration) << ','
            << format_number(r.margins.gradeability) << ',' << format_optional(r.margins.cycle) << ','
            << (i < result.ei.size() ? format_optional(result.ei[i]) : std::string()) << ','
            << format_optional(best) << '\n';
    }
    return out.str();
}

RunConfig snapshot_config(const RunConfig& config, ScalingMode mode, std::uint64_t seed) {
    RunConfig snap = config;
    set_config_value(snap, "run.mode", to_string(mode));
    set_config_value(snap, "run.seeds", std::to_string(seed));
    return snap;
}

std::string run_summary(const RunResult& result) {
    std::ostringstream out;
    std::size_t feasible = 0;
    for (const auto& r : result.history) feasible += r.feasible ? 1 : 0;
    out << "mode: " << to_string(result.mode) << '\n'
        << "seed: " << result.seed << '\n'
        << "version: " << kVersion << '\n'
        << "evaluations: " << result.history.size() << " (" << result.n_init << " initial + " << result.iterations
        << " iterations)\n"
        << "feasible evaluations: " << feasible << '\n';
    if (const auto* best = result.best()) {
        const auto& d = best->design;
        out << std::fixed << std::setprecision(4) << "best: k_ax=" << d.k.k_ax << " k_rad=" << d.k.k_rad;
        if (d.mode == ScalingMode::Combined) {
            out << " k_mw=" << d.k.k_mw << " k_ml=" << d.k.k_ml << " k_sd=" << d.k.k_sd << " k_tw=" << d.k.k_tw;
        }
        out << " gamma=" << d.gamma << '\n' << "best E_ac(T): " << std::setprecision(6) << *best->energy / 1e6 << " MJ\n";
    } else {
        out << "infeasible run: no evaluated design met all constraints\n";
    }
    out << std::defaultfloat << "wall_time_s: " << result.wall_time << '\n';
    return out.str();
}

} // namespace

EvalContext make_context(const RunConfig& config, const fs::path& search_root) {
    config.validate();
    const auto path = resolve_cycle(config.cycle_path, search_root);
    auto raw = load_cycle(path, config.speed_unit);
    return EvalContext{resample(raw, config.dt), config.vehicle, config.reference, config.spec, config.bounds};
}

RunResult run_single(const RunConfig& config, const EvalContext& ctx, ScalingMode mode, std::uint64_t seed) {
    const DesignEvaluator eval = [&ctx](const DesignVector& d) { return evaluate(d, ctx); };
    return optimize(eval, mode, config.iterations, seed, config.bounds, config.solver);
}

std::string run_dir_name(ScalingMode mode, std::uint64_t seed) {
    return std::string(to_string(mode)) + "-seed" + std::to_string(seed);
}

void emit_plot_data(const RunResult& result, const EvalContext& ctx, const fs::path& dir) {
    make_dirs(dir);
    {
        std::ostringstream out;
        out << "iter,best_E_ac_J\n";
        std::optional<double> best;
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            const auto& r = result.history[i];
            if (r.feasible && r.energy && (!best || *r.energy < *best)) best = r.energy;
            out << i << ',' << format_optional(best) << '\n';
        }
        write_text(dir / "convergence.csv", out.str());
    }
    {
        std::ostringstream out;
        const auto names = DesignVector::coordinate_names(result.mode);
        out << "iter";
        for (const auto& n : names) out << ',' << n;
        out << ",E_ac_J,feasible\n";
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            const auto& r = result.history[i];
            out << i;
            for (double x : r.design.coordinates()) out << ',' << format_number(x);
            out << ',' << format_optional(r.energy) << ',' << (r.feasible ? 1 : 0) << '\n';
        }
        write_text(dir / "scatter.csv", out.str());
    }
    if (const auto* best = result.best()) {
        const auto rec = evaluate(best->design, ctx, true);
        write_text(dir / "trace.csv", trace_csv(rec.trace, "per-step trace of the best design"));
    } else {
        write_text(dir / "trace.csv", trace_csv({}, "infeasible run: no feasible design, trace empty"));
    }
}

void write_run(const RunResult& result, const RunConfig& config, const EvalContext& ctx, const fs::path& dir) {
    make_dirs(dir);
    write_text(dir / "config.snapshot", config_snapshot(snapshot_config(config, result.mode, result.seed)));

    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["mode"] = std::string(to_string(result.mode));
    j["seed"] = result.seed;
    j["n_init"] = result.n_init;
    j["iterations"] = result.iterations;
    j["cycle"] = {{"name", ctx.cycle.name()}, {"points", ctx.cycle.size()}, {"duration_s", ctx.cycle.duration()}};
    j["infeasible_run"] = result.infeasible_run();
    j["best_index"] = result.best_index ? nlohmann::ordered_json(*result.best_index) : nlohmann::ordered_json(nullptr);
    j["best"] = result.best() ? record_json(*result.best()) : nlohmann::ordered_json(nullptr);
    auto& hist = j["history"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        auto r = record_json(result.history[i]);
        r["ei"] = i < result.ei.size() ? optional_json(result.ei[i]) : nlohmann::ordered_json(nullptr);
        hist.push_back(std::move(r));
    }
    j["wall_time_s"] = result.wall_time;
    write_text(dir / "result.json", j.dump(1) + "\n");

    write_text(dir / "iterations.csv", iteration_log(result));
    write_text(dir / "summary.txt", run_summary(result));
    emit_plot_data(result, ctx, dir);

    if (config.trace) {
        const auto traces = dir / "traces";
        make_dirs(traces);
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            const auto rec = evaluate(result.history[i].design, ctx, true);
            std::ostringstream name;
            name << "eval_" << std::setw(3) << std::setfill('0') << i << ".csv";
            write_text(traces / name.str(), trace_csv(rec.trace, rec.feasible ? "" : "infeasible: " + rec.diagnostic));
        }
    }
}

std::string solutions_table(const std::vector<RunResult>& runs) {
    std::ostringstream out;
    out << "solution";
    for (const auto& r : runs) out << ',' << to_string(r.mode) << " seed " << r.seed;
    out << '\n';
    auto row = [&](const char* name, auto value_of, bool internal, int precision) {
        out << name;
        for (const auto& r : runs) {
            out << ',';
            const auto* best = r.best();
            if (!best) {
                out << "infeasible";
            } else if (internal && r.mode == ScalingMode::Proportional) {
                out << '-';
            } else {
                std::ostringstream v;
                v << std::fixed << std::setprecision(precision) << value_of(*best);
                out << v.str();
            }
        }
        out << '\n';
    };
    row("k_ax", [](const EvaluationRecord& b) { return b.design.k.k_ax; }, false, 4);
    row("k_rad", [](const EvaluationRecord& b) { return b.design.k.k_rad; }, false, 4);
    row("gamma", [](const EvaluationRecord& b) { return b.design.gamma; }, false, 4);
    row("k_mw", [](const EvaluationRecord& b) { return b.design.k.k_mw; }, true, 4);
    row("k_ml", [](const EvaluationRecord& b) { return b.design.k.k_ml; }, true, 4);
    row("k_sd", [](const EvaluationRecord& b) { return b.design.k.k_sd; }, true, 4);
    row("k_tw", [](const EvaluationRecord& b) { return b.design.k.k_tw; }, true, 4);
    row("E_ac(T) [MJ]", [](const EvaluationRecord& b) { return *b.energy / 1e6; }, false, 6);
    return out.str();
}

std::string comparison_table(const std::vector<RunResult>& runs) {
    std::ostringstream out;
    bool any = false;
    out << "seed,proportional_E_ac_J,combined_E_ac_J,delta_percent,published_delta_percent\n";
    for (const auto& p : runs) {
        if (p.mode != ScalingMode::Proportional) continue;
        for (const auto& c : runs) {
            if (c.mode != ScalingMode::Combined || c.seed != p.seed) continue;
            any = true;
            out << p.seed << ',';
            const auto* bp = p.best();
            const auto* bc = c.best();
            out << (bp ? format_number(*bp->energy) : "") << ',' << (bc ? format_number(*bc->energy) : "") << ',';
            if (bp && bc) out << format_number((*bc->energy - *bp->energy) / *bp->energy * 100.0);
            out << ',' << format_number(kPublishedDeltaPercent) << '\n';
        }
    }
    return any ? out.str() : std::string();
}

bool StudyOutcome::any_infeasible() const noexcept {
    return std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.infeasible_run(); });
}

StudyOutcome run_study(const RunConfig& config, const fs::path& search_root) {
    const EvalContext ctx = make_context(config, search_root);
    StudyOutcome outcome;
    outcome.output_dir = config.output_dir;
    make_dirs(outcome.output_dir);

    struct Job {
        ScalingMode mode;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto seed : config.seeds) {
        for (auto mode : config.modes()) jobs.push_back({mode, seed});
    }

    if (config.concurrent_seeds) {
        std::vector<std::future<RunResult>> futures;
        for (const auto& job : jobs) {
            futures.push_back(std::async(std::launch::async, [&config, &ctx, job] {
                return run_single(config, ctx, job.mode, job.seed);
            }));
        }
        for (auto& f : futures) outcome.runs.push_back(f.get());
    } else {
        for (const auto& job : jobs) outcome.runs.push_back(run_single(config, ctx, job.mode, job.seed));
    }

    for (const auto& r : outcome.runs) write_run(r, config, ctx, outcome.output_dir / run_dir_name(r.mode, r.seed));

    write_text(outcome.output_dir / "solutions.csv", solutions_table(outcome.runs));
    const auto comparison = comparison_table(outcome.runs);
    if (!comparison.empty()) write_text(outcome.output_dir / "comparison.csv", comparison);
    write_text(outcome.output_dir / "config.snapshot", config_snapshot(config));

    nlohmann::ordered_json meta;
    meta["version"] = kVersion;
    meta["cycle"] = {
        {"path", config.cycle_path},
        {"name", ctx.cycle.name()},
        {"points", ctx.cycle.size()},
        {"duration_s", ctx.cycle.duration()},
        {"dt_s", config.dt},
        {"distance_m", ctx.cycle.distance()},
        {"class_assumption", "WLTC class 3b (vehicle class 3, v_max >= 120 km/h)"},
    };
    meta["notes"] = {
        "parameter table lists r_w twice with the same value 0.295 m; used once",
        "frontal area A_f = 0.72 m^2 taken verbatim although small for a city car",
        "c_r has no published value; documented default used unless configured",
        "input variable u (selected gear) is structurally absent: one-speed transmission",
        "motor performance comes from an analytical surrogate, see docs/model_card.md",
    };
    auto& sources = meta["sources"] = nlohmann::ordered_json::object();
    for (const auto& key : config_keys()) {
        const auto it = config.sources.find(key);
        sources[key] = std::string(to_string(it != config.sources.end() ? it->second : ValueSource::Default));
    }
    meta["seeds"] = config.seeds;
    write_text(outcome.output_dir / "metadata.json", meta.dump(1) + "\n");

    std::ostringstream summary;
    summary << "evsizer study " << kVersion << '\n' << "cycle: " << ctx.cycle.name() << " (" << ctx.cycle.size()
            << " points, " << ctx.cycle.duration() << " s)\n\n";
    for (const auto& r : outcome.runs) {
        summary << run_dir_name(r.mode, r.seed) << ": ";
        if (const auto* b = r.best()) {
            summary << std::fixed << std::setprecision(6) << *b->energy / 1e6 << " MJ" << std::defaultfloat;
        } else {
            summary << "infeasible";
        }
        summary << '\n';
    }
    if (!comparison.empty()) {
        summary << "\ncombined vs proportional (delta %, negative favours combined):\n";
        for (const auto& p : outcome.runs) {
            if (p.mode != ScalingMode::Proportional || !p.best()) continue;
            for (const auto& c : outcome.runs) {
                if (c.mode != ScalingMode::Combined || c.seed != p.seed || !c.best()) continue;
                const double delta = (*c.best()->energy - *p.best()->energy) / *p.best()->energy * 100.0;
                summary << "  seed " << p.seed << ": " << std::fixed << std::setprecision(3) << delta << " %"
                        << std::defaultfloat << '\n';
            }
        }
        summary << "  published reference delta: " << kPublishedDeltaPercent << " %\n";
    }
    write_text(outcome.output_dir / "summary.txt", summary.str());
    return outcome;
}

} // namespace evsizer
