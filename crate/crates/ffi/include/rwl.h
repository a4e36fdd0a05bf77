#ifndef RWL_H
#define RWL_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of a library call.
typedef enum RwlStatus {
  RWL_STATUS_OK = 0,
  // A required pointer argument was null.
  RWL_STATUS_NULL_ARGUMENT = 1,
  // Invalid parameters, data or text.
  RWL_STATUS_VALIDATION = 2,
  // Non-finite values or a failed numerical check.
  RWL_STATUS_NUMERICAL = 3,
  // The output buffer is smaller than the result.
  RWL_STATUS_BUFFER_TOO_SMALL = 5,
  // An internal panic was caught at the boundary.
  RWL_STATUS_PANIC = 6,
} RwlStatus;

// Stored time slices of a solve.
typedef struct RwlField RwlField;

// Uniform radial grid.
typedef struct RwlGrid RwlGrid;

// Radial function sampled on a grid.
typedef struct RwlProfile RwlProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
//
// The pointer stays valid until the next library call on the same thread.
const char *rwl_last_error(void);

// Library version as a static NUL-terminated string.
const char *rwl_version(void);

// Creates a grid of `points` intervals on `[0, r_max]` in dimension `n`.
//
// # Safety
// `out` must be valid for writes.
enum RwlStatus rwl_grid_new(size_t n, double r_max, size_t points, struct RwlGrid **out);

// # Safety
// `grid` must be null or a handle from [`rwl_grid_new`] not yet freed.
void rwl_grid_free(struct RwlGrid *grid);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `grid` must be null or a live handle.
size_t rwl_grid_len(const struct RwlGrid *grid);

// Node radii.
//
// # Safety
// `grid` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
enum RwlStatus rwl_grid_nodes(const struct RwlGrid *grid,
                              double *buf,
                              size_t capacity,
                              size_t *written);

// Profile from one value per grid node; the values must decay inside the grid.
//
// # Safety
// `grid` must be a live handle, `data` valid for `len` reads, `out` valid for writes.
enum RwlStatus rwl_profile_new(const struct RwlGrid *grid,
                               const double *data,
                               size_t len,
                               struct RwlProfile **out);

// Position and velocity profiles of a data specification such as `gaussian:amp=1,width=1`.
//
// # Safety
// `grid` must be a live handle, `spec` a NUL-terminated string, `u0` and `u1` valid for writes.
enum RwlStatus rwl_profile_from_spec(const struct RwlGrid *grid,
                                     const char *spec,
                                     struct RwlProfile **u0,
                                     struct RwlProfile **u1);

// # Safety
// `profile` must be null or a live handle.
void rwl_profile_free(struct RwlProfile *profile);

// Node values.
//
// # Safety
// `profile` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
enum RwlStatus rwl_profile_values(const struct RwlProfile *profile,
                                  double *buf,
                                  size_t capacity,
                                  size_t *written);

// Fractional derivative `D^theta` of a profile.
//
// # Safety
// `profile` must be a live handle and `out` valid for writes.
enum RwlStatus rwl_fractional_derivative(const struct RwlProfile *profile,
                                         double theta,
                                         struct RwlProfile **out);

// Homogeneous Sobolev norm of order `s`.
//
// # Safety
// `profile` must be a live handle and `out` valid for writes.
enum RwlStatus rwl_sobolev_norm(const struct RwlProfile *profile, double s, double *out);

// Homogeneous Besov norm of order `s` with summability `q`.
//
// # Safety
// `profile` must be a live handle and `out` valid for writes.
enum RwlStatus rwl_besov_norm(const struct RwlProfile *profile, double s, double q, double *out);

// Radial Lebesgue norm; `p` may be infinite.
//
// # Safety
// `profile` must be a live handle and `out` valid for writes.
enum RwlStatus rwl_lp_norm(const struct RwlProfile *profile, double p, double *out);

// Free wave evolution up to `t_final`, storing every `stride`-th step.
//
// # Safety
// `u0` and `u1` must be live handles on the same grid and `out` valid for writes.
enum RwlStatus rwl_solve_linear(const struct RwlProfile *u0,
                                const struct RwlProfile *u1,
                                double t_final,
                                double cfl,
                                size_t stride,
                                struct RwlField **out);

// Quasilinear evolution up to `t_cap` or the first blow-up signal; `nonlinearity` reads like
// `g=linear:0.2;a=const:-1`.
//
// # Safety
// `u0` and `u1` must be live handles on the same grid, `nonlinearity` a NUL-terminated string and `out`
// valid for writes.
enum RwlStatus rwl_solve_nonlinear(const struct RwlProfile *u0,
                                   const struct RwlProfile *u1,
                                   const char *nonlinearity,
                                   double t_cap,
                                   double clip,
                                   double cfl,
                                   size_t stride,
                                   struct RwlField **out);

// # Safety
// `field` must be null or a live handle.
void rwl_field_free(struct RwlField *field);

// Number of stored slices, or 0 for a null handle.
//
// # Safety
// `field` must be null or a live handle.
size_t rwl_field_slices(const struct RwlField *field);

// Times of the stored slices.
//
// # Safety
// `field` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
enum RwlStatus rwl_field_times(const struct RwlField *field,
                               double *buf,
                               size_t capacity,
                               size_t *written);

// Values of `u` at stored slice `index`.
//
// # Safety
// `field` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
enum RwlStatus rwl_field_slice(const struct RwlField *field,
                               size_t index,
                               double *buf,
                               size_t capacity,
                               size_t *written);

// Relative energy drift of a linear solve; NaN for nonlinear runs.
//
// # Safety
// `field` must be a live handle and `out` valid for writes.
enum RwlStatus rwl_field_energy_drift(const struct RwlField *field, double *out);

// Time of the first blow-up signal; NaN when none occurred.
//
// # Safety
// `field` must be a live handle and `out` valid for writes.
enum RwlStatus rwl_field_blowup_time(const struct RwlField *field, double *out);

// Checks the sign conditions of the power multiplier with exponent `mu` and scale `radius` at `len` radii.
//
// # Safety
// `radii` must be valid for `len` reads; `violations` and `worst_margin` must be valid for writes.
enum RwlStatus rwl_sign_conditions(size_t n,
                                   double mu,
                                   double radius,
                                   const double *radii,
                                   size_t len,
                                   size_t *violations,
                                   double *worst_margin);

// Runs the command-line interface with `argc` arguments, the first being the program name, and returns its
// exit status.
//
// # Safety
// `argv` must hold `argc` NUL-terminated strings.
int rwl_run(int argc,
            const char *const *argv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RWL_H */
