#ifndef WASSVAL_H
#define WASSVAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum WvStatus {
  WV_STATUS_OK = 0,
  WV_STATUS_NULL_POINTER = 1,
  WV_STATUS_INVALID_ARGUMENT = 2,
  WV_STATUS_DIMENSION_MISMATCH = 3,
  WV_STATUS_UNSUPPORTED = 4,
  WV_STATUS_NUMERICAL = 5,
  WV_STATUS_PROPAGATION = 6,
  WV_STATUS_CONFIG = 7,
  WV_STATUS_IO = 8,
  WV_STATUS_PANIC = 9,
} WvStatus;

/**
 * Weighted point cloud.
 */
typedef struct WvEnsemble WvEnsemble;

/**
 * Optimal transport plan.
 */
typedef struct WvPlan WvPlan;

/**
 * Result of a validation run.
 */
typedef struct WvReport WvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *wv_last_error(void);

/**
 * Library version as a static string.
 */
const char *wv_version(void);

/**
 * Build an ensemble from `n` row-major points of dimension `dim`.
 * `weights` may be null for uniform weights.
 *
 * # Safety
 * `points` must hold `n * dim` values and `weights`, if not null, `n`.
 */
enum WvStatus wv_ensemble_new(size_t dim,
                              const double *points,
                              size_t n,
                              const double *weights,
                              struct WvEnsemble **out_ens);

/**
 * Read an ensemble CSV (`w,x1,...,xd`, weight column optional).
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum WvStatus wv_ensemble_read_csv(const char *path, struct WvEnsemble **out_ens);

/**
 * # Safety
 * `ens` must come from this library and not be used afterwards.
 */
void wv_ensemble_free(struct WvEnsemble *ens);

/**
 * # Safety
 * `ens` must be a live handle.
 */
enum WvStatus wv_ensemble_len(const struct WvEnsemble *ens, size_t *out_len);

/**
 * # Safety
 * `ens` must be a live handle.
 */
enum WvStatus wv_ensemble_dim(const struct WvEnsemble *ens, size_t *out_dim);

/**
 * W2 between two ensembles by the transport LP. `out_plan` may be null.
 *
 * # Safety
 * Handles must be live; out pointers valid or null where allowed.
 */
enum WvStatus wv_w2_lp(const struct WvEnsemble *a,
                       const struct WvEnsemble *b,
                       double *out_w2,
                       struct WvPlan **out_plan);

/**
 * 1-D W2 between two one-dimensional ensembles via quantiles.
 *
 * # Safety
 * Handles must be live.
 */
enum WvStatus wv_w2_1d(const struct WvEnsemble *a, const struct WvEnsemble *b, double *out_w2);

/**
 * # Safety
 * `plan` must come from this library and not be used afterwards.
 */
void wv_plan_free(struct WvPlan *plan);

/**
 * Number of positive-mass entries.
 *
 * # Safety
 * `plan` must be a live handle.
 */
enum WvStatus wv_plan_len(const struct WvPlan *plan, size_t *out_len);

/**
 * Entry `idx` as `(i, j, mass)`.
 *
 * # Safety
 * `plan` must be a live handle.
 */
enum WvStatus wv_plan_entry(const struct WvPlan *plan,
                            size_t idx,
                            size_t *out_i,
                            size_t *out_j,
                            double *out_mass);

/**
 * Gaussian closed form; covariances are `d x d` row-major.
 *
 * # Safety
 * Means hold `d` values, covariances `d * d`.
 */
enum WvStatus wv_w2_gaussian(size_t d,
                             const double *m1,
                             const double *cov1,
                             const double *m2,
                             const double *cov2,
                             double *out_w2);

/**
 * W2 between `Beta(alpha, beta)` and `Beta(beta, alpha)`.
 *
 * # Safety
 * `out_w2` must be valid.
 */
enum WvStatus wv_beta_w2(double alpha, double beta, double *out_w2);

/**
 * # Safety
 * `out_n` must be valid.
 */
enum WvStatus wv_n_chernoff(double eps, double delta, uint64_t *out_n);

/**
 * # Safety
 * `out_n` must be valid.
 */
enum WvStatus wv_n_worstcase(double eps, double delta, uint64_t *out_n);

/**
 * # Safety
 * `out_n` must be valid.
 */
enum WvStatus wv_n_wass(double eps, double delta, double c, double k, uint64_t *out_n);

/**
 * Reachability check for `x' = -p x^3`; `out_invalidated` is 1 when the
 * model is invalidated.
 *
 * # Safety
 * Out pointers must be valid.
 */
enum WvStatus wv_prajna_check(double x0_lo,
                              double x0_hi,
                              double xt_lo,
                              double xt_hi,
                              double p_lo,
                              double p_hi,
                              double t,
                              double *out_witness,
                              int *out_invalidated);

/**
 * Run a validation from config JSON text. Relative data paths resolve
 * against the current directory.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string.
 */
enum WvStatus wv_validate_json(const char *config_json, struct WvReport **out_report);

/**
 * 1 if the report's hard invalidation check rejected the model.
 *
 * # Safety
 * `report` must be a live handle.
 */
enum WvStatus wv_report_invalidated(const struct WvReport *report, int *out_flag);

/**
 * Report as JSON; release the string with [`wv_string_free`].
 *
 * # Safety
 * `report` must be a live handle.
 */
enum WvStatus wv_report_json(const struct WvReport *report, char **out_json);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void wv_report_free(struct WvReport *report);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void wv_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WASSVAL_H */
