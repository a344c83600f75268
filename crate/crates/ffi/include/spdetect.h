#ifndef SPDETECT_H
#define SPDETECT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpdStatKind {
  SPD_STAT_KIND_LAMBDA_K = 0,
  SPD_STAT_KIND_SDP = 1,
  SPD_STAT_KIND_MDP = 2,
  SPD_STAT_KIND_DIAG = 3,
} SpdStatKind;

// Result code of every fallible call.
typedef enum SpdStatus {
  SPD_STATUS_OK = 0,
  SPD_STATUS_NULL_POINTER = 1,
  SPD_STATUS_INVALID_ARGUMENT = 2,
  SPD_STATUS_DIMENSION = 3,
  SPD_STATUS_NON_FINITE = 4,
  SPD_STATUS_BUDGET_EXCEEDED = 5,
  // The SDP solver stopped early; the certified interval is still filled in.
  SPD_STATUS_NOT_CONVERGED = 6,
  SPD_STATUS_PARSE = 7,
  SPD_STATUS_IO = 8,
  SPD_STATUS_PANIC = 9,
} SpdStatus;

typedef enum SpdStepRule {
  SPD_STEP_RULE_FIXED = 0,
  SPD_STEP_RULE_BACKTRACKING = 1,
} SpdStepRule;

// Sample handle: `n` rows of `p` coordinates.
typedef struct SpdData SpdData;

// Symmetric matrix handle.
typedef struct SpdMatrix SpdMatrix;

// Statistic value; absent by-products are NaN.
typedef struct SpdStatValue {
  double value;
  double lower_cert;
  double upper_cert;
  double z_star;
  size_t iterations;
} SpdStatValue;

typedef struct SpdThresholds {
  double tau0;
  double tau1;
  double theta_bar;
  bool feasible;
} SpdThresholds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or an empty string. Valid
// until the next call into this library on the same thread.
const char *spd_last_error(void);

// Library version as a static NUL-terminated string.
const char *spd_version(void);

// Builds a matrix from `p * p` row-major values, which must be symmetric.
//
// # Safety
// `values` points to `p * p` readable doubles; `out` is writable.
enum SpdStatus spd_matrix_from_dense(size_t p, const double *values, struct SpdMatrix **out);

// The `p x p` identity.
//
// # Safety
// `out` is writable.
enum SpdStatus spd_matrix_identity(size_t p, struct SpdMatrix **out);

// Releases a matrix; null is ignored.
//
// # Safety
// `m` comes from this library and is not used afterwards.
void spd_matrix_free(struct SpdMatrix *m);

// Dimension of `m`, or 0 for null.
//
// # Safety
// `m` is null or a live handle.
size_t spd_matrix_dim(const struct SpdMatrix *m);

// Entry `(i, j)`.
//
// # Safety
// `m` is a live handle; `out` is writable.
enum SpdStatus spd_matrix_get(const struct SpdMatrix *m, size_t i, size_t j, double *out);

// Wraps `n * p` row-major values as a sample.
//
// # Safety
// `values` points to `n * p` readable doubles; `out` is writable.
enum SpdStatus spd_data_new(size_t n, size_t p, const double *values, struct SpdData **out);

// Releases a sample; null is ignored.
//
// # Safety
// `d` comes from this library and is not used afterwards.
void spd_data_free(struct SpdData *d);

// Number of rows and columns of `d`.
//
// # Safety
// `d` is a live handle; `n` and `p` are writable.
enum SpdStatus spd_data_shape(const struct SpdData *d, size_t *n, size_t *p);

// Copies the row-major values of `d` into `buf`, which holds `len` doubles.
//
// # Safety
// `d` is a live handle; `buf` has room for `len` doubles.
enum SpdStatus spd_data_copy(const struct SpdData *d, double *buf, size_t len);

// Empirical covariance `(1/n) X^T X`.
//
// # Safety
// `d` is a live handle; `out` is writable.
enum SpdStatus spd_covariance(const struct SpdData *d, struct SpdMatrix **out);

// Largest eigenvalue of `m` to relative tolerance `tol`.
//
// # Safety
// `m` is a live handle; `out` is writable.
enum SpdStatus spd_largest_eigenvalue(const struct SpdMatrix *m, double tol, double *out);

// Exhaustive k-sparse largest eigenvalue. When `support` is not null it
// receives the `k` indices (0-based) of the attaining subset.
//
// # Safety
// `m` is a live handle; `out` is writable; `support` is null or has room
// for `k` values.
enum SpdStatus spd_lambda_k(const struct SpdMatrix *m,
                            size_t k,
                            uint64_t budget,
                            struct SpdStatValue *out,
                            size_t *support);

// Minimum dual perturbation over a `grid_size`-point threshold grid.
//
// # Safety
// `m` is a live handle; `out` is writable.
enum SpdStatus spd_mdp(const struct SpdMatrix *m,
                       size_t k,
                       size_t grid_size,
                       struct SpdStatValue *out);

// Semidefinite relaxation with a certified interval of half-width `eps`.
// On [`SpdStatus::NotConverged`] the interval reached is still written.
//
// # Safety
// `m` is a live handle; `out` is writable.
enum SpdStatus spd_sdp(const struct SpdMatrix *m,
                       size_t k,
                       double eps,
                       size_t max_outer,
                       size_t max_inner,
                       enum SpdStepRule step_rule,
                       struct SpdStatValue *out);

// Largest diagonal entry.
//
// # Safety
// `m` is a live handle; `out` is writable.
enum SpdStatus spd_diag(const struct SpdMatrix *m, struct SpdStatValue *out);

// Closed-form null and alternative quantiles of `stat`.
//
// # Safety
// `out` is writable.
enum SpdStatus spd_thresholds(size_t p,
                              size_t n,
                              size_t k,
                              double delta,
                              double theta,
                              enum SpdStatKind stat,
                              struct SpdThresholds *out);

// Draws data from a model given as `kind:key=value,...` or JSON, e.g.
// `spiked:p=50,n=100,k=5,theta=2`.
//
// # Safety
// `spec` is a NUL-terminated string; `out` is writable.
enum SpdStatus spd_sample_model(const char *spec, uint64_t seed, struct SpdData **out);

// The matrix a statistic would be evaluated on for `spec` and `seed`:
// the empirical covariance of a draw, or the adversarial matrix.
//
// # Safety
// `spec` is a NUL-terminated string; `out` is writable.
enum SpdStatus spd_model_covariance(const char *spec, uint64_t seed, struct SpdMatrix **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPDETECT_H */
