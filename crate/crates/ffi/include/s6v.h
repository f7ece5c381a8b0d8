#ifndef S6V_H
#define S6V_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum S6vStatus {
  S6vStatus_Ok = 0,
  S6vStatus_NullPointer = 1,
  S6vStatus_InvalidParameter = 2,
  S6vStatus_InvalidBoundary = 3,
  S6vStatus_OutOfRange = 4,
  S6vStatus_Numerical = 5,
  S6vStatus_Panic = 6,
} S6vStatus;

/**
 * Discrete kernel `R^d` on `[0, X] x [0, Y]`.
 */
typedef struct S6vKernelTable S6vKernelTable;

/**
 * Model parameters `(L, beta1, beta2)` with derived weights.
 */
typedef struct S6vParams S6vParams;

/**
 * One sampled configuration with heights.
 */
typedef struct S6vSample S6vSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or an empty string.
 * Valid until the next failing call on the same thread.
 */
const char *s6v_last_error(void);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *s6v_version(void);

/**
 * # Safety
 * `out` must be a valid pointer; the handle it receives must be released
 * with [`s6v_params_free`].
 */
enum S6vStatus s6v_params_new(uint32_t scale, double beta1, double beta2, struct S6vParams **out);

/**
 * # Safety
 * `params` must be null or a handle from [`s6v_params_new`], freed once.
 */
void s6v_params_free(struct S6vParams *params);

/**
 * Vertex weights `b1`, `b2`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum S6vStatus s6v_params_weights(const struct S6vParams *params, double *b1, double *b2);

/**
 * Samples the step boundary on `[0, x_extent] x [0, y_extent]` with the
 * replica stream `(seed, replica)`.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer; the result must
 * be released with [`s6v_sample_free`].
 */
enum S6vStatus s6v_sample_step(const struct S6vParams *params,
                               size_t x_extent,
                               size_t y_extent,
                               uint64_t seed,
                               uint64_t replica,
                               struct S6vSample **out);

/**
 * # Safety
 * `sample` must be null or a handle from [`s6v_sample_step`], freed once.
 */
void s6v_sample_free(struct S6vSample *sample);

/**
 * Height `H(x, y)` of a sample.
 *
 * # Safety
 * `sample` must be a live handle and `out` a valid pointer.
 */
enum S6vStatus s6v_sample_height(const struct S6vSample *sample, size_t x, size_t y, int32_t *out);

/**
 * `phi(x, y) = q^H(x, y)` of a sample.
 *
 * # Safety
 * `sample` must be a live handle and `out` a valid pointer.
 */
enum S6vStatus s6v_sample_phi(const struct S6vSample *sample, size_t x, size_t y, double *out);

/**
 * # Safety
 * `params` must be a live handle and `out` a valid pointer; the result must
 * be released with [`s6v_kernel_table_free`].
 */
enum S6vStatus s6v_kernel_table_new(const struct S6vParams *params,
                                    size_t x_extent,
                                    size_t y_extent,
                                    struct S6vKernelTable **out);

/**
 * # Safety
 * `table` must be null or a handle from [`s6v_kernel_table_new`], freed once.
 */
void s6v_kernel_table_free(struct S6vKernelTable *table);

/**
 * `R^d(x, y)`.
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum S6vStatus s6v_kernel_table_get(const struct S6vKernelTable *table,
                                    size_t x,
                                    size_t y,
                                    double *out);

/**
 * Continuum kernel derivative `d_x^kx d_y^ky R(x, y)` by contour quadrature.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum S6vStatus s6v_riemann_continuum(double beta1,
                                     double beta2,
                                     uint32_t kx,
                                     uint32_t ky,
                                     double x,
                                     double y,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* S6V_H */
