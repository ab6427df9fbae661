// evsizer command-line runner. Talks to the library only through the C API.

#include "evsizer/evsizer.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct ConfigDeleter {
    void operator()(evs_config* c) const { evs_config_free(c); }
};
struct CycleDeleter {
    void operator()(evs_cycle* c) const { evs_cycle_free(c); }
};
struct ResultDeleter {
    void operator()(evs_result* r) const { evs_result_free(r); }
};
struct StudyDeleter {
    void operator()(evs_study* s) const { evs_study_free(s); }
};
struct StringDeleter {
    void operator()(char* s) const { evs_string_free(s); }
};

using ConfigPtr = std::unique_ptr<evs_config, ConfigDeleter>;
using CyclePtr = std::unique_ptr<evs_cycle, CycleDeleter>;
using StudyPtr = std::unique_ptr<evs_study, StudyDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int exit_code_for(evs_status s) {
    switch (s) {
    case EVS_OK: return kExitOk;
    case EVS_ERR_INFEASIBLE: return kExitInfeasible;
    case EVS_ERR_IO:
    case EVS_ERR_PARSE: return kExitIo;
    default: return kExitConfig;
    }
}

int report(evs_status s, const char* what) {
    std::cerr << "evsizer: " << what << ": " << evs_last_error() << '\n';
    return exit_code_for(s);
}

struct CommonOptions {
    std::string config;
    std::optional<std::string> cycle;
    std::optional<std::string> speed_unit;
    std::optional<double> dt;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "Config file (flat dotted key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--cycle", o.cycle, "Drive-cycle file: time,speed per line");
    cmd->add_option("--speed-unit", o.speed_unit, "Speed unit of the cycle file")
        ->check(CLI::IsMember({"kmh", "ms"}));
    cmd->add_option("--dt", o.dt, "Resampling step in seconds")->check(CLI::PositiveNumber);
}

// Loads the config and applies the shared overrides; returns an exit code on failure.
std::optional<int> prepare_config(const CommonOptions& o, ConfigPtr& cfg) {
    evs_config* raw = nullptr;
    const evs_status s = o.config.empty() ? evs_config_default(&raw) : evs_config_load(o.config.c_str(), &raw);
    if (s != EVS_OK) return report(s, "config");
    cfg.reset(raw);
    auto set = [&](const char* key, const std::string& value) -> std::optional<int> {
        const evs_status st = evs_config_set(cfg.get(), key, value.c_str());
        if (st != EVS_OK) return report(st, "option");
        return std::nullopt;
    };
    if (o.cycle) {
        if (auto e = set("run.cycle", *o.cycle)) return e;
    }
    if (o.speed_unit) {
        if (auto e = set("run.speed_unit", *o.speed_unit)) return e;
    }
    if (o.dt) {
        std::ostringstream v;
        v.precision(17);
        v << *o.dt;
        if (auto e = set("run.dt", v.str())) return e;
    }
    return std::nullopt;
}

std::string config_value(const evs_config* cfg, const char* key) {
    char* raw = nullptr;
    if (evs_config_get(cfg, key, &raw) != EVS_OK) return {};
    StringPtr s(raw);
    return s.get();
}

std::optional<int> load_cycle(const evs_config* cfg, const std::string& search_root, CyclePtr& out) {
    evs_cycle* raw = nullptr;
    const evs_status s = evs_cycle_from_config(cfg, search_root.empty() ? nullptr : search_root.c_str(), &raw);
    if (s != EVS_OK) return report(s, "cycle");
    out.reset(raw);
    return std::nullopt;
}

void print_design(const evs_design& d) {
    std::printf("k_ax=%.4f k_rad=%.4f", d.k_ax, d.k_rad);
    if (d.mode == EVS_MODE_COMBINED) std::printf(" k_mw=%.4f k_ml=%.4f k_sd=%.4f k_tw=%.4f", d.k_mw, d.k_ml, d.k_sd, d.k_tw);
    std::printf(" gamma=%.4f", d.gamma);
}

void print_evaluation(const evs_evaluation& e) {
    if (e.has_energy) std::printf("E_ac(T)=%.6f MJ ", e.energy_j / 1e6);
    std::printf("feasible=%d margins: top_speed=%.4g acceleration=%.4g gradeability=%.4g", e.feasible,
                e.margin_top_speed, e.margin_acceleration, e.margin_gradeability);
    if (e.cycle_evaluated) std::printf(" cycle=%.4g", e.margin_cycle);
    std::printf("\n");
}

std::string config_dir(const std::string& config) {
    if (config.empty()) return {};
    return std::filesystem::absolute(config).parent_path().string();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electric powertrain sizing: scaled-motor drive-cycle energy minimization"};
    app.set_version_flag("--version", std::string(evs_version()));
    app.require_subcommand(1);

    // run
    CommonOptions run_opts;
    std::optional<std::string> mode;
    std::optional<std::size_t> iters;
    std::optional<std::string> seeds;
    std::optional<std::string> out_dir;
    bool trace = false;
    bool concurrent = false;
    auto* run = app.add_subcommand("run", "Optimize in proportional and/or combined mode and write run directories");
    add_common(run, run_opts);
    run->add_option("--mode", mode, "Scaling mode")->check(CLI::IsMember({"proportional", "combined", "both"}));
    run->add_option("--iters", iters, "Optimization iterations after the initial design")->check(CLI::PositiveNumber);
    run->add_option("--seed", seeds, "Seed or comma-separated seeds");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--trace", trace, "Also write the per-step trace of every evaluated design");
    run->add_flag("--concurrent-seeds", concurrent, "Run independent (mode, seed) jobs concurrently");

    // validate
    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config file: unknown/missing keys and bound warnings");
    validate->add_option("config", validate_path, "Config file")->required();

    // evaluate
    CommonOptions eval_opts;
    std::vector<double> design_values;
    auto* eval = app.add_subcommand("evaluate", "Evaluate one design: k_ax,k_rad,gamma or all seven factors");
    add_common(eval, eval_opts);
    eval->add_option("--design", design_values, "k_ax,k_rad,gamma | k_ax,k_rad,k_mw,k_ml,k_sd,k_tw,gamma")
        ->delimiter(',')
        ->required();

    // scan
    CommonOptions scan_opts;
    double scan_step = 0.05;
    auto* scan = app.add_subcommand("scan", "Gear-ratio scan of the unscaled motor against the performance constraints");
    add_common(scan, scan_opts);
    scan->add_option("--step", scan_step, "Gear-ratio step")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*validate) {
        char* raw = nullptr;
        int clean = 0;
        const evs_status s = evs_config_validate_file(validate_path.c_str(), &raw, &clean);
        if (s != EVS_OK) return report(s, "validate");
        StringPtr text(raw);
        std::cout << text.get();
        return clean ? kExitOk : kExitConfig;
    }

    if (*run) {
        ConfigPtr cfg;
        if (auto e = prepare_config(run_opts, cfg)) return *e;
        auto set = [&](const char* key, const std::string& value) -> std::optional<int> {
            const evs_status st = evs_config_set(cfg.get(), key, value.c_str());
            if (st != EVS_OK) return report(st, "option");
            return std::nullopt;
        };
        if (mode) {
            if (auto e = set("run.mode", *mode)) return *e;
        }
        if (iters) {
            if (auto e = set("run.iterations", std::to_string(*iters))) return *e;
        }
        if (seeds) {
            if (auto e = set("run.seeds", *seeds)) return *e;
        }
        if (out_dir) {
            if (auto e = set("run.output", *out_dir)) return *e;
        }
        if (trace) {
            if (auto e = set("run.trace", "true")) return *e;
        }
        if (concurrent) {
            if (auto e = set("run.concurrent_seeds", "true")) return *e;
        }

        evs_study* raw = nullptr;
        const std::string root = config_dir(run_opts.config);
        const evs_status s = evs_study_run(cfg.get(), root.empty() ? nullptr : root.c_str(), &raw);
        if (s != EVS_OK) return report(s, "run");
        StudyPtr study(raw);

        for (std::size_t i = 0; i < evs_study_run_count(study.get()); ++i) {
            const evs_result* r = nullptr;
            evs_study_run_at(study.get(), i, &r);
            evs_design d{};
            evs_evaluation ev{};
            evs_result_history_at(r, 0, &d, nullptr);
            std::printf("%-13s evaluations=%zu ", d.mode == EVS_MODE_PROPORTIONAL ? "proportional" : "combined",
                        evs_result_history_size(r));
            if (evs_result_best(r, &d, &ev) == EVS_OK) {
                print_design(d);
                std::printf(" E_ac(T)=%.6f MJ\n", ev.energy_j / 1e6);
            } else {
                std::printf("infeasible run: no design met all constraints\n");
            }
        }
        std::printf("results written to %s\n", config_value(cfg.get(), "run.output").c_str());
        return evs_study_any_infeasible(study.get()) ? kExitInfeasible : kExitOk;
    }

    if (*eval) {
        ConfigPtr cfg;
        if (auto e = prepare_config(eval_opts, cfg)) return *e;
        CyclePtr cycle;
        if (auto e = load_cycle(cfg.get(), config_dir(eval_opts.config), cycle)) return *e;
        evs_design d{1, 1, 1, 1, 1, 1, 1, EVS_MODE_COMBINED};
        if (design_values.size() == 3) {
            d.k_ax = design_values[0];
            d.k_rad = design_values[1];
            d.gamma = design_values[2];
            d.mode = EVS_MODE_PROPORTIONAL;
        } else if (design_values.size() == 7) {
            d = {design_values[0], design_values[1], design_values[2], design_values[3],
                 design_values[4], design_values[5], design_values[6], EVS_MODE_COMBINED};
        } else {
            std::cerr << "evsizer: --design takes 3 or 7 values\n";
            return kExitConfig;
        }
        evs_evaluation ev{};
        const evs_status s = evs_evaluate(cfg.get(), cycle.get(), &d, &ev);
        if (s != EVS_OK) return report(s, "evaluate");
        print_design(d);
        std::printf("\n");
        print_evaluation(ev);
        return ev.feasible ? kExitOk : kExitInfeasible;
    }

    if (*scan) {
        ConfigPtr cfg;
        if (auto e = prepare_config(scan_opts, cfg)) return *e;
        CyclePtr cycle;
        if (auto e = load_cycle(cfg.get(), config_dir(scan_opts.config), cycle)) return *e;
        std::size_t feasible = 0;
        std::printf("gamma,feasible,m_top_speed,m_acceleration,m_gradeability,E_ac_J\n");
        const auto steps = static_cast<long>(std::floor(9.0 / scan_step + 1e-9));
        for (long i = 0; i <= steps; ++i) {
            const evs_design d{1, 1, 1, 1, 1, 1, 1.0 + static_cast<double>(i) * scan_step, EVS_MODE_PROPORTIONAL};
            evs_evaluation ev{};
            const evs_status s = evs_evaluate(cfg.get(), cycle.get(), &d, &ev);
            if (s != EVS_OK) return report(s, "scan");
            feasible += ev.feasible ? 1 : 0;
            std::printf("%.2f,%d,%.6g,%.6g,%.6g,", d.gamma, ev.feasible, ev.margin_top_speed, ev.margin_acceleration,
                        ev.margin_gradeability);
            if (ev.has_energy) std::printf("%.9g", ev.energy_j);
            std::printf("\n");
        }
        std::fprintf(stderr, "%zu feasible gear ratios\n", feasible);
        return feasible > 0 ? kExitOk : kExitInfeasible;
    }
    return kExitOk;
}
