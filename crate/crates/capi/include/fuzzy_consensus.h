#ifndef FUZZY_CONSENSUS_H
#define FUZZY_CONSENSUS_H

/* Generated by cbindgen from fuzzy-consensus-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Weight function selector for `fc_m_estimate`, with standard tuning.
 */
typedef enum FcPsi {
  FC_PSI_HUBER = 0,
  FC_PSI_TUKEY_BIWEIGHT = 1,
  FC_PSI_HAMPEL = 2,
  FC_PSI_ANDREWS_SINE = 3,
} FcPsi;

/**
 * Outcome of a fallible call.
 */
typedef enum FcStatus {
  FC_STATUS_OK = 0,
  /**
   * Bad argument or input data; details via `fc_last_error_message`.
   */
  FC_STATUS_INVALID_INPUT = 1,
  /**
   * Request the build cannot serve (dimension, grid size).
   */
  FC_STATUS_UNSUPPORTED = 2,
  /**
   * Numerical failure (degenerate scale, non-convergence).
   */
  FC_STATUS_NUMERICAL = 3,
  /**
   * A required pointer was null.
   */
  FC_STATUS_NULL_POINTER = 4,
} FcStatus;

/**
 * Finished consensus run (opaque): zones, depth, estimate and the
 * member/outlier split at the `min_depth` the run was asked for.
 */
typedef struct FcConsensusResult FcConsensusResult;

/**
 * Growable collection of measurements (opaque).
 */
typedef struct FcMeasurementSet FcMeasurementSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Tool version as a static string; do not free.
 */
const char *fc_version(void);

/**
 * Message of the most recent error on this thread; caller frees with
 * `fc_string_free`. Empty string when no error was recorded yet.
 */
char *fc_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a function of this library and not freed
 * before.
 */
void fc_string_free(char *s);

struct FcMeasurementSet *fc_measurement_set_new(void);

/**
 * # Safety
 * `set` must come from `fc_measurement_set_new` and not be freed twice.
 */
void fc_measurement_set_free(struct FcMeasurementSet *set);

/**
 * Appends a `dim`-dimensional measurement; `values` and `errors` point to
 * `dim` doubles each.
 *
 * # Safety
 * `set` must be a live set; `id` a NUL-terminated string; `values` and
 * `errors` readable arrays of length `dim`.
 */
enum FcStatus fc_measurement_set_push(struct FcMeasurementSet *set,
                                      const char *id,
                                      const double *values,
                                      const double *errors,
                                      size_t dim,
                                      double weight);

/**
 * Appends a one-dimensional, weight-1 measurement.
 *
 * # Safety
 * `set` must be a live set; `id` a NUL-terminated string.
 */
enum FcStatus fc_measurement_set_push_1d(struct FcMeasurementSet *set,
                                         const char *id,
                                         double value,
                                         double error);

/**
 * # Safety
 * `set` must be a live set.
 */
size_t fc_measurement_set_len(const struct FcMeasurementSet *set);

/**
 * Exact crisp consensus (1D or 2D).
 *
 * # Safety
 * `set` must be a live set; `out` a writable pointer slot.
 */
enum FcStatus fc_consensus_crisp(const struct FcMeasurementSet *set,
                                 double min_depth,
                                 struct FcConsensusResult **out);

/**
 * Fuzzy 1D consensus at the given membership threshold (use 1.0 for the
 * default behaviour).
 *
 * # Safety
 * `set` must be a live set; `out` a writable pointer slot.
 */
enum FcStatus fc_consensus_fuzzy_1d(const struct FcMeasurementSet *set,
                                    double membership_threshold,
                                    double min_depth,
                                    struct FcConsensusResult **out);

/**
 * Grid-search crisp consensus for any dimension.
 *
 * # Safety
 * `set` must be a live set; `out` a writable pointer slot.
 */
enum FcStatus fc_consensus_grid(const struct FcMeasurementSet *set,
                                size_t resolution,
                                double min_depth,
                                struct FcConsensusResult **out);

/**
 * # Safety
 * `result` must come from a consensus call and not be freed twice.
 */
void fc_result_free(struct FcConsensusResult *result);

/**
 * # Safety
 * `result` must be a live result.
 */
double fc_result_depth(const struct FcConsensusResult *result);

/**
 * # Safety
 * `result` must be a live result.
 */
size_t fc_result_dim(const struct FcConsensusResult *result);

/**
 * # Safety
 * `result` must be a live result.
 */
size_t fc_result_zone_count(const struct FcConsensusResult *result);

/**
 * Bounds of zone `index` along axis `k`.
 *
 * # Safety
 * `result` must be a live result; `out_lo`/`out_hi` writable doubles.
 */
enum FcStatus fc_result_zone(const struct FcConsensusResult *result,
                             size_t index,
                             size_t k,
                             double *out_lo,
                             double *out_hi);

/**
 * Coordinate `k` of the point estimate.
 *
 * # Safety
 * `result` must be a live result; `out` a writable double.
 */
enum FcStatus fc_result_estimate(const struct FcConsensusResult *result, size_t k, double *out);

/**
 * Whether the run fell below the requested minimum depth.
 *
 * # Safety
 * `result` must be a live result.
 */
bool fc_result_no_consensus(const struct FcConsensusResult *result);

/**
 * # Safety
 * `result` must be a live result.
 */
size_t fc_result_member_count(const struct FcConsensusResult *result);

/**
 * # Safety
 * `result` must be a live result.
 */
size_t fc_result_outlier_count(const struct FcConsensusResult *result);

/**
 * Id of the `index`-th member; caller frees with `fc_string_free`. Null if
 * out of range.
 *
 * # Safety
 * `result` must be a live result.
 */
char *fc_result_member_id(const struct FcConsensusResult *result, size_t index);

/**
 * Id of the `index`-th outlier; caller frees with `fc_string_free`. Null if
 * out of range.
 *
 * # Safety
 * `result` must be a live result.
 */
char *fc_result_outlier_id(const struct FcConsensusResult *result, size_t index);

/**
 * Arithmetic mean of `len` doubles.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum FcStatus fc_mean(const double *values, size_t len, double *out);

/**
 * Median of `len` doubles.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum FcStatus fc_median(const double *values, size_t len, double *out);

/**
 * M-estimate of location with the chosen weight function at its standard
 * tuning. Falls back to the median on degenerate samples, like the library.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum FcStatus fc_m_estimate(const double *values, size_t len, enum FcPsi psi, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUZZY_CONSENSUS_H */
