/* evsizer.h
 *
 * C interface to the powertrain sizing library: drive cycles, candidate
 * evaluation, seeded Bayesian optimization and study output. All objects are
 * opaque handles released with their *_free function. Every call returning
 * evs_status leaves a thread-local message retrievable via evs_last_error().
 */
#ifndef EVSIZER_H
#define EVSIZER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EVSIZER_BUILDING)
#    define EVS_API __declspec(dllexport)
#  else
#    define EVS_API __declspec(dllimport)
#  endif
#else
#  define EVS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2, 3 and 4 match the CLI exit codes. */
typedef enum evs_status {
    EVS_OK = 0,
    EVS_ERR_ARGUMENT = 1,
    EVS_ERR_CONFIG = 2,
    EVS_ERR_INFEASIBLE = 3,
    EVS_ERR_IO = 4,
    EVS_ERR_PARSE = 5,
    EVS_ERR_VALIDATION = 6,
    EVS_ERR_DOMAIN = 7,
    EVS_ERR_SOLVER = 8,
    EVS_ERR_INTERNAL = 99
} evs_status;

typedef enum evs_speed_unit { EVS_UNIT_MS = 0, EVS_UNIT_KMH = 1 } evs_speed_unit;
typedef enum evs_mode { EVS_MODE_PROPORTIONAL = 0, EVS_MODE_COMBINED = 1 } evs_mode;

typedef struct evs_config evs_config;
typedef struct evs_cycle evs_cycle;
typedef struct evs_result evs_result;
typedef struct evs_study evs_study;

typedef struct evs_design {
    double k_ax;
    double k_rad;
    double k_mw;
    double k_ml;
    double k_sd;
    double k_tw;
    double gamma;
    int mode; /* evs_mode */
} evs_design;

typedef struct evs_evaluation {
    double energy_j;            /* NaN when not available */
    int has_energy;
    int feasible;
    double margin_top_speed;
    double margin_acceleration;
    double margin_gradeability;
    double margin_cycle;        /* NaN when the cycle was not simulated */
    int cycle_evaluated;
} evs_evaluation;

EVS_API const char* evs_version(void);
EVS_API const char* evs_last_error(void);
EVS_API void evs_string_free(char* s);

/* Config */
EVS_API evs_status evs_config_default(evs_config** out);
EVS_API evs_status evs_config_load(const char* path, evs_config** out);
EVS_API evs_status evs_config_set(evs_config* cfg, const char* key, const char* value);
/* Caller frees *value with evs_string_free. */
EVS_API evs_status evs_config_get(const evs_config* cfg, const char* key, char** value);
EVS_API evs_status evs_config_snapshot(const evs_config* cfg, char** text);
/* Writes a human-readable report; *clean is 1 when there is nothing to report. */
EVS_API evs_status evs_config_validate_file(const char* path, char** report, int* clean);
EVS_API void evs_config_free(evs_config* cfg);

/* Drive cycles */
EVS_API evs_status evs_cycle_load(const char* path, evs_speed_unit unit, evs_cycle** out);
EVS_API evs_status evs_cycle_resample(const evs_cycle* cycle, double dt, evs_cycle** out);
EVS_API size_t evs_cycle_size(const evs_cycle* cycle);
EVS_API double evs_cycle_duration(const evs_cycle* cycle);
/* Sample i as time (s), speed (m/s), acceleration (m/s^2). */
EVS_API evs_status evs_cycle_point(const evs_cycle* cycle, size_t i, double* t, double* v, double* a);
/* The config's cycle (run.cycle, run.speed_unit), resampled at run.dt. Relative
 * paths are tried as given, then under search_root (may be NULL). */
EVS_API evs_status evs_cycle_from_config(const evs_config* cfg, const char* search_root, evs_cycle** out);
EVS_API void evs_cycle_free(evs_cycle* cycle);

/* Evaluation of one candidate against the config's vehicle, motor and performance spec. */
EVS_API evs_status evs_evaluate(const evs_config* cfg, const evs_cycle* cycle, const evs_design* design,
                                evs_evaluation* out);

/* Seeded optimization in one mode; iterations >= 1. */
EVS_API evs_status evs_optimize(const evs_config* cfg, const evs_cycle* cycle, evs_mode mode, size_t iterations,
                                uint64_t seed, evs_result** out);
EVS_API size_t evs_result_history_size(const evs_result* result);
EVS_API size_t evs_result_initial_size(const evs_result* result);
EVS_API evs_status evs_result_history_at(const evs_result* result, size_t i, evs_design* design,
                                         evs_evaluation* evaluation);
/* Returns EVS_ERR_INFEASIBLE when no evaluated design was feasible. */
EVS_API evs_status evs_result_best(const evs_result* result, evs_design* design, evs_evaluation* evaluation);
EVS_API double evs_result_wall_time(const evs_result* result);
/* Result file, iteration log, snapshot, summary and plot data under dir. */
EVS_API evs_status evs_result_write(const evs_result* result, const evs_config* cfg, const evs_cycle* cycle,
                                    const char* dir);
EVS_API void evs_result_free(evs_result* result);

/* Full study: every configured mode and seed, written under the config's output dir.
 * search_root (may be NULL) is tried for relative cycle paths. */
EVS_API evs_status evs_study_run(const evs_config* cfg, const char* search_root, evs_study** out);
EVS_API size_t evs_study_run_count(const evs_study* study);
EVS_API evs_status evs_study_run_at(const evs_study* study, size_t i, evs_result const** result);
EVS_API int evs_study_any_infeasible(const evs_study* study);
EVS_API void evs_study_free(evs_study* study);

#ifdef __cplusplus
}
#endif

#endif /* EVSIZER_H */
