#ifndef MSEP_H
#define MSEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call. Values match the command-line exit codes.
 */
typedef enum MsepStatus {
  MSEP_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  MSEP_STATUS_NULL_ARGUMENT = 1,
  /*
   Unreadable or invalid config, series or argument.
   */
  MSEP_STATUS_INPUT = 2,
  MSEP_STATUS_INFEASIBLE = 3,
  /*
   Column generation stopped at its round limit; the plan is still returned.
   */
  MSEP_STATUS_ITER_LIMIT = 4,
  MSEP_STATUS_NUMERICAL = 5,
  /*
   Internal fault caught at the boundary.
   */
  MSEP_STATUS_INTERNAL = 6,
} MsepStatus;

typedef enum MsepMode {
  MSEP_MODE_DIRECT = 0,
  MSEP_MODE_DWDCG = 1,
} MsepMode;

/*
 Facility index accepted by `msep_plan_capacity`.
 */
typedef enum MsepFacility {
  MSEP_FACILITY_WIND = 0,
  MSEP_FACILITY_SOLAR = 1,
  MSEP_FACILITY_CFPP = 2,
  MSEP_FACILITY_BATTERY = 3,
  MSEP_FACILITY_ELECTROLYZER = 4,
  MSEP_FACILITY_HYDROGEN_STORAGE = 5,
  MSEP_FACILITY_FUEL_CELL = 6,
  MSEP_FACILITY_AMMONIA_SYNTHESIS = 7,
  MSEP_FACILITY_AMMONIA_STORAGE = 8,
} MsepFacility;

/*
 Resolved, validated model inputs.
 */
typedef struct MsepInputs MsepInputs;

/*
 A solved plan with its convergence log.
 */
typedef struct MsepPlan MsepPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *msep_version(void);

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *msep_last_error(void);

/*
 Loads a TOML config and its series. `series_path` may be null, in which
 case the config's `series` entry is read relative to the config file.

 # Safety
 Path arguments must be null or NUL-terminated strings; `out` must be a
 valid pointer.
 */
enum MsepStatus msep_inputs_load(const char *config_path,
                                 const char *series_path,
                                 struct MsepInputs **out);

/*
 Builds seeded synthetic inputs with `stages` stages of five years and
 `timesteps` hourly steps (a multiple of four).

 # Safety
 `out` must be a valid pointer.
 */
enum MsepStatus msep_inputs_synthetic(uint64_t seed,
                                      uint32_t stages,
                                      uintptr_t timesteps,
                                      struct MsepInputs **out);

/*
 Replaces the carbon targets with a linear ramp from zero to `target` in
 the final stage.

 # Safety
 `inputs` must be a live handle.
 */
enum MsepStatus msep_inputs_set_final_cer(struct MsepInputs *inputs, double target);

/*
 # Safety
 `inputs` must be null or a handle not yet freed.
 */
void msep_inputs_free(struct MsepInputs *inputs);

/*
 Solves the plan. `epsilon <= 0` and `max_iterations == 0` keep the
 config's values; `threads == 0` uses one pricing thread per core. On
 `IterLimit` the best plan found is still stored in `out`.

 # Safety
 `inputs` must be a live handle and `out` a valid pointer.
 */
enum MsepStatus msep_solve(const struct MsepInputs *inputs,
                           enum MsepMode mode,
                           double epsilon,
                           uintptr_t max_iterations,
                           uintptr_t threads,
                           struct MsepPlan **out);

/*
 # Safety
 `plan` must be null or a handle not yet freed.
 */
void msep_plan_free(struct MsepPlan *plan);

/*
 Net present cost of the plan.

 # Safety
 `plan` must be a live handle and `out` a valid pointer.
 */
enum MsepStatus msep_plan_objective(const struct MsepPlan *plan, double *out);

/*
 Simplex pivots (direct) or column generation rounds (decomposed).

 # Safety
 `plan` must be a live handle and `out` a valid pointer.
 */
enum MsepStatus msep_plan_iterations(const struct MsepPlan *plan, uintptr_t *out);

/*
 Number of planning stages.

 # Safety
 `plan` must be a live handle and `out` a valid pointer.
 */
enum MsepStatus msep_plan_stage_count(const struct MsepPlan *plan, uint32_t *out);

/*
 Installed capacity of `facility` in 1-based `stage`, in the facility's
 native unit (MW, MWh, Nm3, t or t/yr).

 # Safety
 `plan` must be a live handle and `out` a valid pointer.
 */
enum MsepStatus msep_plan_capacity(const struct MsepPlan *plan,
                                   uint32_t stage,
                                   enum MsepFacility facility,
                                   double *out);

/*
 Plan as pretty JSON (the `plan.json` document).

 # Safety
 `plan` must be a live handle and `out` a valid pointer. Free the string
 with `msep_string_free`.
 */
enum MsepStatus msep_plan_json(const struct MsepPlan *plan, char **out);

/*
 Levelized costs, indices and ledger as pretty JSON (the `metrics.json`
 document).

 # Safety
 `plan` must be a live handle and `out` a valid pointer. Free the string
 with `msep_string_free`.
 */
enum MsepStatus msep_plan_metrics_json(const struct MsepPlan *plan, char **out);

/*
 Column generation log as CSV with wall times zeroed; null for a direct
 solve.

 # Safety
 `plan` must be a live handle and `out` a valid pointer. Free the string
 with `msep_string_free`.
 */
enum MsepStatus msep_plan_convergence_csv(const struct MsepPlan *plan, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library and not yet freed.
 */
void msep_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSEP_H */
