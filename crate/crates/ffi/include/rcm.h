#ifndef RCM_H
#define RCM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RcmMetric {
  RCM_METRIC_TORUS = 0,
  RCM_METRIC_SQUARE = 1,
} RcmMetric;

typedef enum RcmStatus {
  RCM_STATUS_OK = 0,
  RCM_STATUS_NULL_POINTER = 1,
  RCM_STATUS_PARAMETER = 2,
  RCM_STATUS_MODEL = 3,
  RCM_STATUS_NUMERICAL = 4,
  RCM_STATUS_IO = 5,
  RCM_STATUS_PARSE = 6,
  RCM_STATUS_BUFFER_TOO_SMALL = 7,
  RCM_STATUS_PANIC = 8,
} RcmStatus;

/**
 * Opaque connection model.
 */
typedef struct RcmModel RcmModel;

/**
 * Opaque sampled network.
 */
typedef struct RcmSample RcmSample;

/**
 * Isolated-node split of one coupled trial.
 */
typedef struct RcmCoupledCounts {
  size_t n_points;
  size_t isolated_torus;
  size_t isolated_square;
  size_t isolated_boundary;
} RcmCoupledCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *rcm_last_error(void);

enum RcmStatus rcm_model_unit_disk(struct RcmModel **out);

enum RcmStatus rcm_model_gaussian(struct RcmModel **out);

enum RcmStatus rcm_model_log_normal(double sigma_db, double eta, struct RcmModel **out);

/**
 * Piecewise-linear kernel through `(radii[k], values[k])`, held constant
 * outside the knot range.
 */
enum RcmStatus rcm_model_table(const double *radii,
                               const double *values,
                               size_t n,
                               struct RcmModel **out);

void rcm_model_free(struct RcmModel *model);

/**
 * 1 when the kernel meets all model conditions, 0 otherwise.
 */
enum RcmStatus rcm_model_is_usable(const struct RcmModel *model, int32_t *out);

enum RcmStatus rcm_model_eval(const struct RcmModel *model, double x, double *out);

enum RcmStatus rcm_model_c(const struct RcmModel *model, double *out);

enum RcmStatus rcm_model_cutoff(const struct RcmModel *model, double *out);

enum RcmStatus rcm_connection_radius(double c, double rho, double b, double *out);

/**
 * Samples one trial: Poisson points plus independent edges.
 */
enum RcmStatus rcm_sample(const struct RcmModel *model,
                          double rho,
                          double b,
                          enum RcmMetric metric,
                          uint64_t master_seed,
                          uint64_t trial_index,
                          struct RcmSample **out);

void rcm_sample_free(struct RcmSample *sample);

enum RcmStatus rcm_sample_n_points(const struct RcmSample *sample, size_t *out);

enum RcmStatus rcm_sample_n_edges(const struct RcmSample *sample, size_t *out);

/**
 * Copies coordinates as `x0, y0, x1, y1, ...` into `xy`, which must hold
 * `2 * n_points` doubles.
 */
enum RcmStatus rcm_sample_points(const struct RcmSample *sample, double *xy, size_t capacity);

/**
 * Copies edges as `i0, j0, i1, j1, ...` (sorted, `i < j`) into `ij`, which
 * must hold `2 * n_edges` entries.
 */
enum RcmStatus rcm_sample_edges(const struct RcmSample *sample, uint32_t *ij, size_t capacity);

enum RcmStatus rcm_sample_isolated_count(const struct RcmSample *sample, size_t *out);

/**
 * Number of connected components and whether the graph is connected
 * (graphs with at most one node count as connected).
 */
enum RcmStatus rcm_sample_components(const struct RcmSample *sample,
                                     size_t *n_components,
                                     int32_t *connected);

/**
 * Finite-density expected number of isolated nodes with its quadrature
 * error estimate. `abs_error` may be null.
 */
enum RcmStatus rcm_expected_isolated(const struct RcmModel *model,
                                     double rho,
                                     double b,
                                     enum RcmMetric metric,
                                     double *value,
                                     double *abs_error);

enum RcmStatus rcm_chen_stein_terms(const struct RcmModel *model,
                                    double rho,
                                    double b,
                                    double epsilon,
                                    double *b1,
                                    double *b2);

/**
 * One coupled trial: torus graph, thinned to the square graph on the same
 * points.
 */
enum RcmStatus rcm_coupled_trial(const struct RcmModel *model,
                                 double rho,
                                 double b,
                                 uint64_t master_seed,
                                 uint64_t trial_index,
                                 struct RcmCoupledCounts *out);

/**
 * Version string of the library, static storage.
 */
const char *rcm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RCM_H */
