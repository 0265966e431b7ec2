#ifndef MEMDDG_H
#define MEMDDG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Why a run stopped.
 */
typedef enum MemddgReason {
  MEMDDG_REASON_CONVERGED = 0,
  MEMDDG_REASON_MAX_STEPS = 1,
  MEMDDG_REASON_FAILED = 2,
} MemddgReason;

/**
 * Result code of every fallible call.
 */
typedef enum MemddgStatus {
  MEMDDG_STATUS_OK = 0,
  MEMDDG_STATUS_NULL_POINTER = 1,
  MEMDDG_STATUS_INVALID_ARGUMENT = 2,
  MEMDDG_STATUS_PARSE = 3,
  MEMDDG_STATUS_IO = 4,
  MEMDDG_STATUS_INVALID_MESH = 5,
  MEMDDG_STATUS_NUMERICAL = 6,
  MEMDDG_STATUS_BUFFER_TOO_SMALL = 7,
  MEMDDG_STATUS_PANIC = 8,
} MemddgStatus;

/**
 * Opaque simulation handle.
 */
typedef struct MemddgSystem MemddgSystem;

/**
 * Energy terms in nN·µm.
 */
typedef struct MemddgEnergy {
  double bending;
  double surface;
  double pressure;
  double dirichlet;
  double adsorption;
  double regularization;
  double external;
  double total;
} MemddgEnergy;

typedef struct MemddgRunReport {
  enum MemddgReason reason;
  size_t steps;
  double time;
  double residual;
  double chem_residual;
} MemddgRunReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty if none.
 * Valid until the next failing call on the same thread.
 */
const char *memddg_last_error(void);

/**
 * Library version as a static string.
 */
const char *memddg_version(void);

/**
 * Creates a system from a named preset.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MemddgStatus memddg_system_from_preset(const char *name, struct MemddgSystem **out);

/**
 * Creates a system from a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MemddgStatus memddg_system_from_config(const char *path, struct MemddgSystem **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sys` must come from a constructor above and not be used afterwards.
 */
void memddg_system_free(struct MemddgSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle or null; `out` valid or null.
 */
enum MemddgStatus memddg_system_vertex_count(const struct MemddgSystem *sys, size_t *out);

/**
 * # Safety
 * `sys` must be a live handle or null; `out` valid or null.
 */
enum MemddgStatus memddg_system_face_count(const struct MemddgSystem *sys, size_t *out);

/**
 * Copies vertex indices of all faces, three per face, into `out`.
 *
 * # Safety
 * `out` must hold `len` writable elements.
 */
enum MemddgStatus memddg_system_faces(const struct MemddgSystem *sys, size_t *out, size_t len);

/**
 * Copies positions as `x0 y0 z0 x1 ...` into `out`.
 *
 * # Safety
 * `out` must hold `len` writable elements.
 */
enum MemddgStatus memddg_system_positions(const struct MemddgSystem *sys, double *out, size_t len);

/**
 * Replaces positions; `len` must be three times the vertex count.
 *
 * # Safety
 * `data` must hold `len` readable elements.
 */
enum MemddgStatus memddg_system_set_positions(struct MemddgSystem *sys,
                                              const double *data,
                                              size_t len);

/**
 * Copies the protein density into `out`.
 *
 * # Safety
 * `out` must hold `len` writable elements.
 */
enum MemddgStatus memddg_system_phi(const struct MemddgSystem *sys, double *out, size_t len);

/**
 * Replaces the protein density; every value must lie in `[0, 1]`.
 *
 * # Safety
 * `data` must hold `len` readable elements.
 */
enum MemddgStatus memddg_system_set_phi(struct MemddgSystem *sys, const double *data, size_t len);

/**
 * # Safety
 * `sys` must be a live handle or null; `out` valid or null.
 */
enum MemddgStatus memddg_system_energy(const struct MemddgSystem *sys, struct MemddgEnergy *out);

/**
 * Copies the boundary-masked net force, three values per vertex.
 *
 * # Safety
 * `out` must hold `len` writable elements.
 */
enum MemddgStatus memddg_system_forces(const struct MemddgSystem *sys, double *out, size_t len);

/**
 * Runs the configured solver for at most `max_steps` steps from the
 * current state; zero keeps the configured limit.
 *
 * # Safety
 * `sys` must be a live handle or null; `out` valid or null.
 */
enum MemddgStatus memddg_system_run(struct MemddgSystem *sys,
                                    size_t max_steps,
                                    struct MemddgRunReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEMDDG_H */
