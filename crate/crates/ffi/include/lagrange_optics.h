#ifndef LAGRANGE_OPTICS_H
#define LAGRANGE_OPTICS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LO_METHOD_DOPRI5 = 0,
  LO_METHOD_RK4 = 1,
} LoMethod;

typedef enum {
  LO_STATUS_OK = 0,
  LO_STATUS_NULL_POINTER = 1,
  LO_STATUS_INVALID_ARGUMENT = 2,
  LO_STATUS_DOMAIN = 3,
  LO_STATUS_UNSUPPORTED = 4,
  LO_STATUS_NUMERICAL = 5,
  /**
   * The request was valid but has no solutions.
   */
  LO_STATUS_EMPTY = 6,
  LO_STATUS_PANIC = 7,
} LoStatus;

typedef enum {
  LO_SYMMETRY_CYLINDRICAL = 0,
  LO_SYMMETRY_SPHERICAL = 1,
} LoSymmetry;

/**
 * Opaque refractive profile.
 */
typedef struct LoProfile LoProfile;

/**
 * Opaque sampled trajectory.
 */
typedef struct LoTrajectory LoTrajectory;

typedef struct {
  double rel_tol;
  double abs_tol;
  double max_step;
  double t_start;
  double t_end;
  double sample_every;
  LoMethod method;
} LoIntegratorConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *lo_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lo_string_free(char *s);

/**
 * # Safety
 * `out` must be writable.
 */
LoStatus lo_profile_uniform(double n0, LoProfile **out);

/**
 * # Safety
 * `out` must be writable.
 */
LoStatus lo_profile_gaussian_mirage(double epsilon, double width, LoSymmetry sym, LoProfile **out);

/**
 * # Safety
 * `out` must be writable.
 */
LoStatus lo_profile_gaussian_ring(double base,
                                  double amplitude,
                                  double center,
                                  double width,
                                  LoSymmetry sym,
                                  LoProfile **out);

/**
 * Builds a profile from its JSON description, e.g.
 * `{"kind": "uniform", "n0": 1.5}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
LoStatus lo_profile_from_json(const char *json, LoProfile **out);

/**
 * # Safety
 * `p` must be null or a live handle from this library.
 */
void lo_profile_free(LoProfile *p);

/**
 * `γ(x)`.
 *
 * # Safety
 * `x` points to 3 doubles; `out` is writable.
 */
LoStatus lo_gamma(const LoProfile *p, const double *x, double *out);

/**
 * Fundamental tensor, 9 doubles.
 *
 * # Safety
 * `pt` points to 6 doubles; `out` to 9 writable doubles.
 */
LoStatus lo_metric(const LoProfile *p, const double *pt, double *out);

/**
 * Inverse fundamental tensor, 9 doubles.
 *
 * # Safety
 * `pt` points to 6 doubles; `out` to 9 writable doubles.
 */
LoStatus lo_inverse_metric(const LoProfile *p, const double *pt, double *out);

/**
 * Semispray `G^i`, 3 doubles.
 *
 * # Safety
 * `pt` points to 6 doubles; `out` to 3 writable doubles.
 */
LoStatus lo_semispray(const LoProfile *p, const double *pt, double *out);

/**
 * Nonlinear connection `N^i_j`, 9 doubles.
 *
 * # Safety
 * `pt` points to 6 doubles; `out` to 9 writable doubles.
 */
LoStatus lo_nonlinear_connection(const LoProfile *p, const double *pt, double *out);

/**
 * Horizontal and vertical connection coefficients, 27 doubles each.
 *
 * # Safety
 * `pt` points to 6 doubles; `l` and `c` to 27 writable doubles each.
 */
LoStatus lo_cartan(const LoProfile *p, const double *pt, double *l, double *c);

/**
 * Torsions `R`, `P`, `C`, 27 doubles each.
 *
 * # Safety
 * `pt` points to 6 doubles; each output to 27 writable doubles.
 */
LoStatus lo_torsions(const LoProfile *p, const double *pt, double *r, double *pp, double *c);

/**
 * Curvatures `R`, `P`, `S`, 81 doubles each.
 *
 * # Safety
 * `pt` points to 6 doubles; each output to 81 writable doubles.
 */
LoStatus lo_curvatures(const LoProfile *p, const double *pt, double *r, double *pp, double *s);

/**
 * Largest horizontal and vertical covariant-derivative residuals of `g`.
 *
 * # Safety
 * `pt` points to 6 doubles; `h` and `v` are writable.
 */
LoStatus lo_metricity(const LoProfile *p, const double *pt, double *h, double *v);

/**
 * Acceleration of the equations of motion, 3 doubles.
 *
 * # Safety
 * `x`, `v` point to 3 doubles; `out` to 3 writable doubles.
 */
LoStatus lo_motion_rhs(const LoProfile *p, const double *x, const double *v, double *out);

/**
 * Conserved energy at a phase point.
 *
 * # Safety
 * `pt` points to 6 doubles; `out` is writable.
 */
LoStatus lo_energy(const LoProfile *p, const double *pt, double *out);

LoIntegratorConfig lo_integrator_config_default(void);

/**
 * Integrates from `(x0, v0)`. When the run stops early the samples up to
 * the failure are still returned in `*out` alongside the error status.
 *
 * # Safety
 * `x0`, `v0` point to 3 doubles; `cfg` may be null for defaults; `out` is writable.
 */
LoStatus lo_integrate(const LoProfile *p,
                      const double *x0,
                      const double *v0,
                      const LoIntegratorConfig *cfg,
                      LoTrajectory **out);

/**
 * Number of samples, 0 for null.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
uintptr_t lo_trajectory_len(const LoTrajectory *t);

/**
 * Sample `index` as `t x1 x2 x3 v1 v2 v3 energy`.
 *
 * # Safety
 * `t` must be a live handle; `out` points to 8 writable doubles.
 */
LoStatus lo_trajectory_sample(const LoTrajectory *t, uintptr_t index, double *out);

/**
 * # Safety
 * `t` must be null or a live handle from this library.
 */
void lo_trajectory_free(LoTrajectory *t);

/**
 * Closed-form families as a JSON array. `kind` is one of `helix`, `circle`,
 * `generator`, `sphere-circles`; `rho` is used by `helix` only and
 * `[lo, hi]` is the search bracket of the others. An empty array comes back
 * with `LoStatus::Empty`. Free the string with [`lo_string_free`].
 *
 * # Safety
 * `kind` is NUL-terminated; `out` is writable.
 */
LoStatus lo_solve_json(const LoProfile *p,
                       const char *kind,
                       double rho,
                       double lo,
                       double hi,
                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAGRANGE_OPTICS_H */
