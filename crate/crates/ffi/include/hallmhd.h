#ifndef HALLMHD_H
#define HALLMHD_H

/* Generated by cbindgen from hallmhd-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum HmhdStatus {
  /*
   Success.
   */
  HMHD_STATUS_OK = 0,
  /*
   Configuration file missing, malformed, or violating a constraint.
   */
  HMHD_STATUS_CONFIG_ERROR = 1,
  /*
   CFL violation, blow-up, or NaN during integration.
   */
  HMHD_STATUS_NUMERICAL_FAULT = 2,
  /*
   Null pointer or out-of-range argument.
   */
  HMHD_STATUS_INVALID_ARGUMENT = 3,
  /*
   Filesystem failure.
   */
  HMHD_STATUS_IO_ERROR = 4,
} HmhdStatus;

/*
 Opaque solver handle: configuration plus the evolving state.
 */
typedef struct HmhdSolver HmhdSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Returns the library version as a static NUL-terminated string.
 */
const char *hmhd_version(void);

/*
 Copies the most recent error message for this thread into `buf`
 (truncated to `len - 1` bytes, always NUL-terminated when `len > 0`)
 and returns the full message length in bytes.

 # Safety
 `buf` must point to at least `len` writable bytes, or be null (then only
 the length is returned).
 */
size_t hmhd_last_error_message(char *buf, size_t len);

/*
 Builds a solver from a configuration file (`kind = solver`) and stores
 the handle in `out`. On failure returns a status and leaves `out`
 untouched; the message is available via `hmhd_last_error_message`.

 # Safety
 `config_path` must be a NUL-terminated path; `out` must be a valid
 pointer to a handle slot.
 */
enum HmhdStatus hmhd_solver_new(const char *config_path, struct HmhdSolver **out);

/*
 Releases a handle created by `hmhd_solver_new`. Null is a no-op.

 # Safety
 `solver` must be a handle from `hmhd_solver_new` not yet freed.
 */
void hmhd_solver_free(struct HmhdSolver *solver);

/*
 Advances the solver by `n_steps` time steps with the CFL and blow-up
 guards active.

 # Safety
 `solver` must be a live handle.
 */
enum HmhdStatus hmhd_solver_step(struct HmhdSolver *solver, uint64_t n_steps);

/*
 Current simulation time (NaN for a null handle).

 # Safety
 `solver` must be a live handle or null.
 */
double hmhd_solver_time(const struct HmhdSolver *solver);

/*
 Writes the L² energies `½‖u‖₂²` and `½‖b‖₂²` to the output slots.

 # Safety
 `solver` must be a live handle; output pointers must be writable or null.
 */
enum HmhdStatus hmhd_solver_energy(const struct HmhdSolver *solver,
                                   double *energy_u,
                                   double *energy_b);

/*
 Shell-Sobolev norms of both fields at weight `s`.

 # Safety
 `solver` must be a live handle; output pointers must be writable or null.
 */
enum HmhdStatus hmhd_solver_sobolev_norm(const struct HmhdSolver *solver,
                                         double s,
                                         double *norm_u,
                                         double *norm_b);

/*
 Number of resolvable dyadic shells (indices `-1..=q_max`, so `q_max + 2`
 entries) for the solver's grid; 0 for a null handle.

 # Safety
 `solver` must be a live handle or null.
 */
size_t hmhd_solver_shell_count(const struct HmhdSolver *solver);

/*
 Fills `out_u`/`out_b` (each `len` slots) with the weighted per-shell
 energies `λ_q^{2s}‖·_q‖₂²` for shells `q = -1, 0, …`; `len` must be at
 least the value of `hmhd_solver_shell_count`.

 # Safety
 `solver` must be a live handle; the output arrays must hold `len`
 writable doubles each.
 */
enum HmhdStatus hmhd_solver_shell_spectrum(const struct HmhdSolver *solver,
                                           double s,
                                           double *out_u,
                                           double *out_b,
                                           size_t len);

/*
 Writes the current state as a snapshot file readable by the CLI.

 # Safety
 `solver` must be a live handle; `path` a NUL-terminated path.
 */
enum HmhdStatus hmhd_solver_write_snapshot(const struct HmhdSolver *solver, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HALLMHD_H */
