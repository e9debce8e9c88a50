#ifndef LOCSTAT_H
#define LOCSTAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LocstatEstimator {
  LOCSTAT_ESTIMATOR_QMLE = 0,
  LOCSTAT_ESTIMATOR_WHITTLE = 1,
} LocstatEstimator;

typedef enum LocstatFamily {
  LOCSTAT_FAMILY_EXAMPLE2D = 0,
  LOCSTAT_FAMILY_CAR1 = 1,
} LocstatFamily;

typedef enum LocstatKernel {
  LOCSTAT_KERNEL_RECTANGULAR = 0,
  LOCSTAT_KERNEL_EPANECHNIKOV = 1,
} LocstatKernel;

typedef enum LocstatScheme {
  LOCSTAT_SCHEME_O1 = 0,
  LOCSTAT_SCHEME_O2 = 1,
} LocstatScheme;

typedef enum LocstatStatus {
  LOCSTAT_STATUS_OK = 0,
  LOCSTAT_STATUS_NULL_POINTER = 1,
  LOCSTAT_STATUS_INVALID_ARGUMENT = 2,
  LOCSTAT_STATUS_DOMAIN = 10,
  LOCSTAT_STATUS_PARAMETER = 11,
  LOCSTAT_STATUS_CONFIG = 12,
  LOCSTAT_STATUS_RANGE = 13,
  LOCSTAT_STATUS_KERNEL = 14,
  LOCSTAT_STATUS_ESTIMATION = 20,
  LOCSTAT_STATUS_NUMERIC = 21,
  LOCSTAT_STATUS_DEGENERATE = 22,
  LOCSTAT_STATUS_OPTIMIZATION = 23,
  LOCSTAT_STATUS_IO = 30,
  LOCSTAT_STATUS_PANIC = 99,
} LocstatStatus;

/**
 * Sampled state space model at one parameter value.
 */
typedef struct LocstatModel LocstatModel;

/**
 * Sampling grid description passed by value.
 */
typedef struct LocstatGrid {
  uint32_t n;
  double delta_n;
  double bandwidth;
  double u;
  double lag;
  enum LocstatScheme scheme;
} LocstatGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *locstat_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *locstat_last_error(void);

/**
 * Kernel value `K(x)`.
 */
enum LocstatStatus locstat_kernel_eval(enum LocstatKernel k, double x, double *result);

/**
 * Asymptotic variance of the least squares estimator.
 */
enum LocstatStatus locstat_lse_asymp_variance(double a,
                                              double lag,
                                              double delta,
                                              enum LocstatScheme s,
                                              double *result);

/**
 * Least squares estimate of `a(u)` from `len = 2m + 1` observations.
 */
enum LocstatStatus locstat_lse_estimate(struct LocstatGrid grid,
                                        const double *values,
                                        size_t len,
                                        enum LocstatKernel k,
                                        double lo,
                                        double hi,
                                        double *a_hat,
                                        double *sigma_hat);

/**
 * Sampled model of a built-in family at `theta` for observation spacing `delta`.
 */
enum LocstatStatus locstat_model_new(enum LocstatFamily f,
                                     const double *theta,
                                     size_t theta_len,
                                     double delta,
                                     struct LocstatModel **model);

/**
 * Releases a model; null is ignored.
 */
void locstat_model_free(struct LocstatModel *model);

enum LocstatStatus locstat_model_state_dim(const struct LocstatModel *model, size_t *dim);

/**
 * Spectral density of the sampled output at frequency `omega`.
 */
enum LocstatStatus locstat_model_spectral_density(const struct LocstatModel *model,
                                                  double omega,
                                                  double *result);

/**
 * Spectral density of the continuous-time output at frequency `omega`.
 */
enum LocstatStatus locstat_model_continuous_density(const struct LocstatModel *model,
                                                    double omega,
                                                    double *result);

/**
 * Steady-state Kalman filter: innovation variance, Riccati residual and the
 * gain (written to `gain`, which must hold `state_dim` values; may be null).
 */
enum LocstatStatus locstat_model_kalman(const struct LocstatModel *model,
                                        double *v,
                                        double *residual,
                                        double *gain,
                                        size_t gain_len);

/**
 * QML or Whittle estimate over the family's default box. `theta_hat` must
 * hold the family's parameter dimension.
 */
enum LocstatStatus locstat_statespace_estimate(enum LocstatEstimator estimator,
                                               enum LocstatFamily f,
                                               struct LocstatGrid grid,
                                               const double *values,
                                               size_t len,
                                               enum LocstatKernel k,
                                               size_t max_gens,
                                               uint64_t seed,
                                               double *theta_hat,
                                               size_t theta_len,
                                               double *objective);

/**
 * Runs a Monte Carlo study from a JSON configuration and writes its output
 * files into `out_dir`.
 */
enum LocstatStatus locstat_study_run(const char *config_json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCSTAT_H */
