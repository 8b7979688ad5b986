#ifndef RADNAV_H
#define RADNAV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RadnavStatus {
  RADNAV_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  RADNAV_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Input rejected: bad scenario, out-of-domain argument, illegal action.
   */
  RADNAV_STATUS_VALIDATION = 2,
  /**
   * I/O or other runtime failure.
   */
  RADNAV_STATUS_RUNTIME = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  RADNAV_STATUS_PANIC = 4,
} RadnavStatus;

/**
 * Opaque mission handle.
 */
typedef struct RadnavMission RadnavMission;

/**
 * Opaque scenario handle.
 */
typedef struct RadnavScenario RadnavScenario;

/**
 * One mission step as seen from C.
 */
typedef struct RadnavStep {
  size_t k;
  size_t cell;
  size_t x;
  size_t y;
  /**
   * 0 = north, 1 = east, 2 = south, 3 = west.
   */
  uint8_t action;
  /**
   * 1 if the target was declared present.
   */
  uint8_t decision;
  uint8_t explored;
  double epsilon;
  double chosen_q;
  double r_detection;
  double r_map;
  double entropy;
  double statistic;
  double distance_to_target;
} RadnavStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *radnav_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *radnav_version(void);

/**
 * Parse a scenario from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RadnavStatus radnav_scenario_from_json(const char *json, struct RadnavScenario **out);

/**
 * Load a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RadnavStatus radnav_scenario_load(const char *path, struct RadnavScenario **out);

/**
 * The built-in reference room with a 16- or 100-element array.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum RadnavStatus radnav_scenario_reference(uint32_t n_elements, struct RadnavScenario **out);

/**
 * Release a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from a `radnav_scenario_*` constructor and not be freed twice.
 */
void radnav_scenario_free(struct RadnavScenario *s);

/**
 * Grid dimensions and cell count.
 *
 * # Safety
 * `s` must be a live scenario; the out pointers must be writable.
 */
enum RadnavStatus radnav_scenario_dims(const struct RadnavScenario *s,
                                       size_t *width,
                                       size_t *height);

/**
 * Start a mission on a copy of the scenario.
 *
 * # Safety
 * `s` must be a live scenario and `out` a writable pointer.
 */
enum RadnavStatus radnav_mission_new(const struct RadnavScenario *s,
                                     uint64_t seed,
                                     struct RadnavMission **out);

/**
 * Release a mission. Null is ignored.
 *
 * # Safety
 * `m` must come from [`radnav_mission_new`] and not be freed twice.
 */
void radnav_mission_free(struct RadnavMission *m);

/**
 * Advance one step. `*done` is set to 1 (and `*step` left untouched) once
 * the mission is over.
 *
 * # Safety
 * `m` must be a live mission; `step` and `done` must be writable.
 */
enum RadnavStatus radnav_mission_step(struct RadnavMission *m,
                                      struct RadnavStep *step,
                                      uint8_t *done);

/**
 * Current UAV cell and time index.
 *
 * # Safety
 * `m` must be a live mission; the out pointers must be writable.
 */
enum RadnavStatus radnav_mission_pose(const struct RadnavMission *m, size_t *cell, size_t *k);

/**
 * Copy per-cell occupancy probabilities into `buf` (exactly one value per cell).
 *
 * # Safety
 * `m` must be a live mission and `buf` must hold `len` doubles.
 */
enum RadnavStatus radnav_mission_occupancy(const struct RadnavMission *m, double *buf, size_t len);

/**
 * Copy the target-location belief into `buf` (exactly one value per cell).
 *
 * # Safety
 * `m` must be a live mission and `buf` must hold `len` doubles.
 */
enum RadnavStatus radnav_mission_target_belief(const struct RadnavMission *m,
                                               double *buf,
                                               size_t len);

/**
 * Run the `mission` command, writing artifacts under `out_dir`.
 *
 * # Safety
 * `s` must be a live scenario and `out_dir` a NUL-terminated string.
 */
enum RadnavStatus radnav_run_mission(const struct RadnavScenario *s,
                                     uint64_t seed,
                                     const char *out_dir);

/**
 * Run the `roc` command with the scenario's trial count.
 *
 * # Safety
 * `s` must be a live scenario and `out_dir` a NUL-terminated string.
 */
enum RadnavStatus radnav_run_roc(const struct RadnavScenario *s,
                                 uint64_t seed,
                                 size_t workers,
                                 const char *out_dir);

/**
 * Run the `map-fixed` command along a named trajectory.
 *
 * # Safety
 * `s` must be a live scenario; `trajectory` and `out_dir` NUL-terminated strings.
 */
enum RadnavStatus radnav_run_map_fixed(const struct RadnavScenario *s,
                                       const char *trajectory,
                                       uint64_t seed,
                                       uint8_t noise,
                                       const char *out_dir);

/**
 * Regularized upper incomplete gamma `Q(a, x)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RadnavStatus radnav_reg_gamma_upper(double a, double x, double *out);

/**
 * `x` such that `Q(a, x) = p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RadnavStatus radnav_inv_reg_gamma_upper(double a, double p, double *out);

/**
 * Generalized Marcum Q function `Q_h(a, b)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RadnavStatus radnav_marcum_q(double h, double a, double b, double *out);

/**
 * Energy-detector threshold for `k` real samples and false-alarm probability `pfa`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RadnavStatus radnav_detector_threshold(size_t k, double pfa, double *out);

/**
 * False-alarm probability of threshold `xi` with `k` samples.
 *
 * # Safety
 * `out` must be writable.
 */
enum RadnavStatus radnav_detector_pfa(size_t k, double xi, double *out);

/**
 * Detection probability for threshold `xi`, `k` samples and noncentrality `lambda`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RadnavStatus radnav_detector_pd(size_t k, double xi, double lambda, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADNAV_H */
