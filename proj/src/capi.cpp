#include "evsizer/evsizer.h"

#include "evsizer/config.hpp"
#include "evsizer/errors.hpp"
#include "evsizer/study.hpp"
#include "evsizer/version.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

struct evs_config {
    evsizer::RunConfig config;
};

struct evs_cycle {
    evsizer::DriveCycle cycle;
};

struct evs_result {
    evsizer::RunResult result;
};

struct evs_study {
    std::vector<evs_result> runs;
    bool any_infeasible = false;
};

namespace {

thread_local std::string g_last_error;

evs_status status_of(evsizer::ErrorKind kind) {
    using evsizer::ErrorKind;
    switch (kind) {
    case ErrorKind::Argument: return EVS_ERR_ARGUMENT;
    case ErrorKind::Parse: return EVS_ERR_PARSE;
    case ErrorKind::Validation: return EVS_ERR_VALIDATION;
    case ErrorKind::Config: return EVS_ERR_CONFIG;
    case ErrorKind::Domain: return EVS_ERR_DOMAIN;
    case ErrorKind::InfeasiblePoint: return EVS_ERR_INFEASIBLE;
    case ErrorKind::Solver: return EVS_ERR_SOLVER;
    case ErrorKind::Io: return EVS_ERR_IO;
    }
    return EVS_ERR_INTERNAL;
}

template <typename F>
evs_status guarded(F&& f) {
    g_last_error.clear();
    try {
        return f();
    } catch (const evsizer::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return EVS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EVS_ERR_INTERNAL;
    }
}

evs_status fail(evs_status status, const char* message) {
    g_last_error = message;
    return status;
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

evsizer::ScalingMode to_mode(int mode) {
    if (mode == EVS_MODE_PROPORTIONAL) return evsizer::ScalingMode::Proportional;
    if (mode == EVS_MODE_COMBINED) return evsizer::ScalingMode::Combined;
    throw evsizer::ArgumentError("unknown mode " + std::to_string(mode));
}

evsizer::DesignVector to_design(const evs_design& d) {
    evsizer::DesignVector out;
    out.k = {d.k_ax, d.k_rad, d.k_mw, d.k_ml, d.k_sd, d.k_tw};
    out.gamma = d.gamma;
    out.mode = to_mode(d.mode);
    return out;
}

evs_design from_design(const evsizer::DesignVector& d) {
    return evs_design{d.k.k_ax, d.k.k_rad, d.k.k_mw, d.k.k_ml, d.k.k_sd, d.k.k_tw, d.gamma,
                      d.mode == evsizer::ScalingMode::Proportional ? EVS_MODE_PROPORTIONAL : EVS_MODE_COMBINED};
}

evs_evaluation from_record(const evsizer::EvaluationRecord& r) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    evs_evaluation out{};
    out.has_energy = r.energy ? 1 : 0;
    out.energy_j = r.energy.value_or(nan);
    out.feasible = r.feasible ? 1 : 0;
    out.margin_top_speed = r.margins.top_speed;
    out.margin_acceleration = r.margins.acceleration;
    out.margin_gradeability = r.margins.gradeability;
    out.cycle_evaluated = r.margins.cycle ? 1 : 0;
    out.margin_cycle = r.margins.cycle.value_or(nan);
    return out;
}

evsizer::EvalContext context_for(const evs_config* cfg, const evs_cycle* cycle) {
    const auto& c = cfg->config;
    c.validate();
    return evsizer::EvalContext{cycle->cycle, c.vehicle, c.reference, c.spec, c.bounds};
}

} // namespace

extern "C" {

const char* evs_version(void) { return evsizer::kVersion; }

const char* evs_last_error(void) { return g_last_error.c_str(); }

void evs_string_free(char* s) { std::free(s); }

evs_status evs_config_default(evs_config** out) {
    if (!out) return fail(EVS_ERR_ARGUMENT, "null output pointer");
    return guarded([&] {
        *out = new evs_config{evsizer::default_config()};
        return EVS_OK;
    });
}

evs_status evs_config_load(const char* path, evs_config** out) {
    if (!path || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new evs_config{evsizer::load_config(path)};
        return EVS_OK;
    });
}

evs_status evs_config_set(evs_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        evsizer::RunConfig updated = cfg->config;
        evsizer::set_config_value(updated, key, value);
        cfg->config = std::move(updated);
        return EVS_OK;
    });
}

evs_status evs_config_get(const evs_config* cfg, const char* key, char** value) {
    if (!cfg || !key || !value) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *value = dup_string(evsizer::get_config_value(cfg->config, key));
        return EVS_OK;
    });
}

evs_status evs_config_snapshot(const evs_config* cfg, char** text) {
    if (!cfg || !text) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *text = dup_string(evsizer::config_snapshot(cfg->config));
        return EVS_OK;
    });
}

evs_status evs_config_validate_file(const char* path, char** report, int* clean) {
    if (!path || !report || !clean) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto r = evsizer::validate_config(path);
        *report = dup_string(r.to_text());
        *clean = r.clean() ? 1 : 0;
        return EVS_OK;
    });
}

void evs_config_free(evs_config* cfg) { delete cfg; }

evs_status evs_cycle_load(const char* path, evs_speed_unit unit, evs_cycle** out) {
    if (!path || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto u = unit == EVS_UNIT_KMH ? evsizer::SpeedUnit::KilometersPerHour : evsizer::SpeedUnit::MetersPerSecond;
        *out = new evs_cycle{evsizer::load_cycle(path, u)};
        return EVS_OK;
    });
}

evs_status evs_cycle_resample(const evs_cycle* cycle, double dt, evs_cycle** out) {
    if (!cycle || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new evs_cycle{evsizer::resample(cycle->cycle, dt)};
        return EVS_OK;
    });
}

size_t evs_cycle_size(const evs_cycle* cycle) { return cycle ? cycle->cycle.size() : 0; }

double evs_cycle_duration(const evs_cycle* cycle) { return cycle ? cycle->cycle.duration() : 0.0; }

evs_status evs_cycle_point(const evs_cycle* cycle, size_t i, double* t, double* v, double* a) {
    if (!cycle) return fail(EVS_ERR_ARGUMENT, "null cycle");
    if (i >= cycle->cycle.size()) return fail(EVS_ERR_ARGUMENT, "sample index out of range");
    const auto& p = cycle->cycle.points()[i];
    if (t) *t = p.t;
    if (v) *v = p.v;
    if (a) *a = p.a;
    return EVS_OK;
}

evs_status evs_cycle_from_config(const evs_config* cfg, const char* search_root, evs_cycle** out) {
    if (!cfg || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto ctx = evsizer::make_context(cfg->config, search_root ? search_root : "");
        *out = new evs_cycle{std::move(ctx.cycle)};
        return EVS_OK;
    });
}

void evs_cycle_free(evs_cycle* cycle) { delete cycle; }

evs_status evs_evaluate(const evs_config* cfg, const evs_cycle* cycle, const evs_design* design, evs_evaluation* out) {
    if (!cfg || !cycle || !design || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto ctx = context_for(cfg, cycle);
        *out = from_record(evsizer::evaluate(to_design(*design), ctx));
        return EVS_OK;
    });
}

evs_status evs_optimize(const evs_config* cfg, const evs_cycle* cycle, evs_mode mode, size_t iterations,
                        uint64_t seed, evs_result** out) {
    if (!cfg || !cycle || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto ctx = context_for(cfg, cycle);
        auto run_cfg = cfg->config;
        run_cfg.iterations = iterations;
        *out = new evs_result{evsizer::run_single(run_cfg, ctx, to_mode(mode), seed)};
        return EVS_OK;
    });
}

size_t evs_result_history_size(const evs_result* result) { return result ? result->result.history.size() : 0; }

size_t evs_result_initial_size(const evs_result* result) { return result ? result->result.n_init : 0; }

evs_status evs_result_history_at(const evs_result* result, size_t i, evs_design* design, evs_evaluation* evaluation) {
    if (!result) return fail(EVS_ERR_ARGUMENT, "null result");
    if (i >= result->result.history.size()) return fail(EVS_ERR_ARGUMENT, "history index out of range");
    const auto& rec = result->result.history[i];
    if (design) *design = from_design(rec.design);
    if (evaluation) *evaluation = from_record(rec);
    return EVS_OK;
}

evs_status evs_result_best(const evs_result* result, evs_design* design, evs_evaluation* evaluation) {
    if (!result) return fail(EVS_ERR_ARGUMENT, "null result");
    const auto* best = result->result.best();
    if (!best) return fail(EVS_ERR_INFEASIBLE, "infeasible run: no feasible design");
    if (design) *design = from_design(best->design);
    if (evaluation) *evaluation = from_record(*best);
    return EVS_OK;
}

double evs_result_wall_time(const evs_result* result) { return result ? result->result.wall_time : 0.0; }

evs_status evs_result_write(const evs_result* result, const evs_config* cfg, const evs_cycle* cycle, const char* dir) {
    if (!result || !cfg || !cycle || !dir) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto ctx = context_for(cfg, cycle);
        evsizer::write_run(result->result, cfg->config, ctx, dir);
        return EVS_OK;
    });
}

void evs_result_free(evs_result* result) { delete result; }

evs_status evs_study_run(const evs_config* cfg, const char* search_root, evs_study** out) {
    if (!cfg || !out) return fail(EVS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto outcome = evsizer::run_study(cfg->config, search_root ? search_root : "");
        auto study = std::make_unique<evs_study>();
        study->any_infeasible = outcome.any_infeasible();
        for (auto& r : outcome.runs) study->runs.push_back(evs_result{std::move(r)});
        *out = study.release();
        return EVS_OK;
    });
}

size_t evs_study_run_count(const evs_study* study) { return study ? study->runs.size() : 0; }

evs_status evs_study_run_at(const evs_study* study, size_t i, evs_result const** result) {
    if (!study || !result) return fail(EVS_ERR_ARGUMENT, "null argument");
    if (i >= study->runs.size()) return fail(EVS_ERR_ARGUMENT, "run index out of range");
    *result = &study->runs[i];
    return EVS_OK;
}

int evs_study_any_infeasible(const evs_study* study) { return study && study->any_infeasible ? 1 : 0; }

void evs_study_free(evs_study* study) { delete study; }

} // extern "C"
