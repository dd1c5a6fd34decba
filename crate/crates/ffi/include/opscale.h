#ifndef OPSCALE_H
#define OPSCALE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OpscaleStatus {
  OPSCALE_STATUS_OK = 0,
  OPSCALE_STATUS_NULL_POINTER = 1,
  OPSCALE_STATUS_DIMENSION = 2,
  OPSCALE_STATUS_SINGULAR = 3,
  OPSCALE_STATUS_NOT_STRICTLY_POSITIVE = 4,
  OPSCALE_STATUS_NOT_PSD = 5,
  OPSCALE_STATUS_NOT_UNITARY = 6,
  OPSCALE_STATUS_TOO_LARGE = 7,
  OPSCALE_STATUS_NON_FINITE = 8,
  OPSCALE_STATUS_INVALID = 9,
  OPSCALE_STATUS_PANIC = 10,
} OpscaleStatus;

typedef enum OpscaleVerdict {
  OPSCALE_VERDICT_NONSINGULAR_EXISTS = 0,
  OPSCALE_VERDICT_NO_NONSINGULAR = 1,
  OPSCALE_VERDICT_BUDGET_EXHAUSTED_NO_NONSINGULAR = 2,
  OPSCALE_VERDICT_INCONCLUSIVE_NUMERICAL = 3,
} OpscaleVerdict;

typedef enum OpscaleEstimator {
  OPSCALE_ESTIMATOR_GNORM = 0,
  OPSCALE_ESTIMATOR_QPERM = 1,
} OpscaleEstimator;

/**
 * Opaque Kraus tuple handle.
 */
typedef struct OpscaleKraus OpscaleKraus;

typedef struct OpscaleTolerance {
  double singular_eps;
  double psd_eps;
  double agree_rtol;
} OpscaleTolerance;

typedef struct OpscaleDecision {
  enum OpscaleVerdict verdict;
  uint64_t iterations;
  double final_ds;
  uint64_t budget;
  /**
   * Nonzero when a nonsingular combination was sampled.
   */
  int32_t has_witness;
} OpscaleDecision;

typedef struct OpscaleEstimate {
  double mean_re;
  double mean_im;
  double std_error;
  uint64_t samples;
  uint64_t seed;
} OpscaleEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *opscale_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *opscale_version(void);

/**
 * Writes the default tolerances.
 *
 * # Safety
 * `out_tol` must be null or point to writable memory for one `OpscaleTolerance`.
 */
enum OpscaleStatus opscale_tolerance_default(struct OpscaleTolerance *out_tol);

/**
 * Builds a tuple of `k` matrices of size `n x n` from `2·k·n·n` doubles.
 *
 * # Safety
 * `data` must point to `2*k*n*n` readable doubles and `out_handle` to a
 * writable handle slot.
 */
enum OpscaleStatus opscale_kraus_new(size_t n,
                                     size_t k,
                                     const double *data,
                                     struct OpscaleKraus **out_handle);

/**
 * Builds the skew-symmetric 3×3 tuple.
 *
 * # Safety
 * `out_handle` must point to a writable handle slot.
 */
enum OpscaleStatus opscale_kraus_sk3(struct OpscaleKraus **out_handle);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `handle` must be null or come from this library and not be freed twice.
 */
void opscale_kraus_free(struct OpscaleKraus *handle);

/**
 * Matrix dimension N, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
size_t opscale_kraus_n(const struct OpscaleKraus *handle);

/**
 * Tuple length k, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
size_t opscale_kraus_k(const struct OpscaleKraus *handle);

/**
 * ‖T(I) − I‖² + ‖T*(I) − I‖².
 *
 * # Safety
 * `handle` must be a live handle and `out_value` writable.
 */
enum OpscaleStatus opscale_ds_measure(const struct OpscaleKraus *handle, double *out_value);

/**
 * Quantum permanent of the Choi matrix (N ≤ 6).
 *
 * # Safety
 * `handle` must be a live handle; `re` and `im` writable.
 */
enum OpscaleStatus opscale_quantum_permanent(const struct OpscaleKraus *handle,
                                             double *re,
                                             double *im);

/**
 * Squared G-norm of det(Σ x_i A_i) from the exact monomial expansion.
 *
 * # Safety
 * `handle` must be a live handle and `out_value` writable.
 */
enum OpscaleStatus opscale_gnorm(const struct OpscaleKraus *handle, double *out_value);

/**
 * Scaling decision. `tol` may be null for defaults; a negative
 * `budget_override` selects the default budget; nonzero `strict` uses the
 * 1/(2N+1) threshold.
 *
 * # Safety
 * `handle` must be a live handle, `tol` null or readable, `out_decision` writable.
 */
enum OpscaleStatus opscale_decide(const struct OpscaleKraus *handle,
                                  const struct OpscaleTolerance *tol,
                                  int64_t budget_override,
                                  int32_t strict,
                                  struct OpscaleDecision *out_decision);

/**
 * Monte-Carlo estimate of the G-norm or the quantum permanent.
 *
 * # Safety
 * `handle` must be a live handle and `out_estimate` writable.
 */
enum OpscaleStatus opscale_estimate(const struct OpscaleKraus *handle,
                                    enum OpscaleEstimator kind,
                                    uint64_t samples,
                                    uint64_t seed,
                                    struct OpscaleEstimate *out_estimate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPSCALE_H */
