#ifndef DSADDLE_H
#define DSADDLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_UTF8 = 2,
  DS_STATUS_INVALID = 3,
  DS_STATUS_DOMAIN = 4,
  DS_STATUS_RANGE = 5,
  DS_STATUS_NO_SADDLE = 6,
  DS_STATUS_CONVERGENCE = 7,
  DS_STATUS_PARSE = 8,
  DS_STATUS_IO = 9,
  DS_STATUS_BUFFER_TOO_SMALL = 10,
  DS_STATUS_PANIC = 11,
} DsStatus;

/**
 * Opaque series handle.
 */
typedef struct DsSeries DsSeries;

typedef struct DsSaddle {
  double sigma;
  double residual;
  uint32_t iterations;
} DsSaddle;

/**
 * Saddle-point estimate of `F-hat(x)`; `exact` and `rel_err` are NaN without coefficients up to `x`.
 */
typedef struct DsEstimate {
  double sigma;
  double estimate;
  double exact;
  double rel_err;
} DsEstimate;

typedef struct DsPerron {
  double value;
  double tail_bound;
  double t_used;
  bool converged;
} DsPerron;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Free with `ds_string_free`.
 */
char *ds_last_error(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void ds_string_free(char *s);

/**
 * Build a catalog series from its key. `n > 0` also generates coefficients up to `n`.
 *
 * # Safety
 * `key` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsStatus ds_series_from_key(const char *key, size_t n, struct DsSeries **out);

/**
 * Build a series from `f(1..=len)` with abscissa `alpha`.
 *
 * # Safety
 * `coeffs` must point to `len` doubles and `out` be a valid pointer.
 */
enum DsStatus ds_series_from_coefficients(const double *coeffs,
                                          size_t len,
                                          double alpha,
                                          struct DsSeries **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `s` must come from a `ds_series_*` constructor and not have been freed already.
 */
void ds_series_free(struct DsSeries *s);

/**
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_series_alpha(const struct DsSeries *s, double *out);

/**
 * Copy the coefficients into `buf`. `*len` receives the count; with `buf` null or
 * `cap` too small nothing is copied and `BufferTooSmall` is returned (`buf` null only queries).
 *
 * # Safety
 * `buf` must hold `cap` doubles when non-null; `len` must be valid.
 */
enum DsStatus ds_series_coefficients(const struct DsSeries *s,
                                     double *buf,
                                     size_t cap,
                                     size_t *len);

/**
 * Solve `a(sigma) + log x = 0`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_solve_saddle(const struct DsSeries *s, double x, double tol, struct DsSaddle *out);

/**
 * Saddle-point estimate of `F-hat(x)` at the saddle.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_estimate_hat(const struct DsSeries *s, double x, struct DsEstimate *out);

/**
 * Perron integral for `F-hat(x)` on `Re s = c`, starting at height `t_max`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_perron_hat(const struct DsSeries *s,
                            double x,
                            double c,
                            double t_max,
                            double tol,
                            struct DsPerron *out);

/**
 * Admissibility report as JSON. `depth == 0` uses the catalog depth (20 for raw
 * coefficients). Catalog series use their own witness, others the default one.
 *
 * # Safety
 * `s` must be a live handle and `json` a valid pointer; free the result with `ds_string_free`.
 */
enum DsStatus ds_diagnose_json(const struct DsSeries *s, size_t depth, char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSADDLE_H */
