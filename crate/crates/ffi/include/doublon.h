#ifndef DOUBLON_H
#define DOUBLON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DoublonStatus {
  DoublonOk = 0,
  DoublonNullPointer = 1,
  DoublonInvalidArgument = 2,
  /**
   * Frequency or energy inside a continuum where the quantity is undefined.
   */
  DoublonResonance = 3,
  DoublonOutOfRange = 4,
  DoublonNumerical = 5,
  DoublonPanic = 6,
} DoublonStatus;

typedef enum DoublonBoundary {
  DoublonOpen = 0,
  DoublonPeriodic = 1,
} DoublonBoundary;

/**
 * Opaque band structure on a momentum grid.
 */
typedef struct DoublonBands DoublonBands;

/**
 * Opaque lattice parameters.
 */
typedef struct DoublonParams DoublonParams;

/**
 * Opaque two-photon spectrum.
 */
typedef struct DoublonSpectrum DoublonSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *doublon_last_error_message(void);

/**
 * `boundary` is a [`DoublonBoundary`] value.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DoublonStatus doublon_params_new(double j,
                                      double u_c,
                                      double u_m,
                                      uintptr_t n,
                                      int boundary,
                                      struct DoublonParams **out);

/**
 * # Safety
 * `p` must be NULL or a handle from [`doublon_params_new`] not yet freed.
 */
void doublon_params_free(struct DoublonParams *p);

/**
 * Closed-form band edges `E_-(pi/2)`, `E_+(pi/2)`.
 *
 * # Safety
 * `p` must be a live handle; `e_minus` and `e_plus` writable.
 */
enum DoublonStatus doublon_band_edges(const struct DoublonParams *p,
                                      double *e_minus,
                                      double *e_plus);

/**
 * Solves both branches on `k_count` momenta spanning `[0, pi]`.
 *
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum DoublonStatus doublon_bands_solve(const struct DoublonParams *p,
                                       uintptr_t k_count,
                                       struct DoublonBands **out);

/**
 * # Safety
 * `b` must be a live handle.
 */
uintptr_t doublon_bands_len(const struct DoublonBands *b);

/**
 * Point `i`; a branch absent at that momentum is reported as NaN.
 *
 * # Safety
 * `b` must be a live handle; the outputs writable.
 */
enum DoublonStatus doublon_bands_get(const struct DoublonBands *b,
                                     uintptr_t i,
                                     double *k,
                                     double *e_minus,
                                     double *e_plus);

/**
 * Band curvature `alpha` at the lower edge.
 *
 * # Safety
 * `b` must be a live handle; `alpha` writable.
 */
enum DoublonStatus doublon_bands_alpha(const struct DoublonBands *b, double *alpha);

/**
 * # Safety
 * `b` must be NULL or a handle from [`doublon_bands_solve`] not yet freed.
 */
void doublon_bands_free(struct DoublonBands *b);

/**
 * Full two-photon spectrum, states classified with `bunching_threshold`.
 *
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum DoublonStatus doublon_spectrum_compute(const struct DoublonParams *p,
                                            double bunching_threshold,
                                            struct DoublonSpectrum **out);

/**
 * # Safety
 * `s` must be a live handle.
 */
uintptr_t doublon_spectrum_len(const struct DoublonSpectrum *s);

/**
 * Copies up to `cap` ascending eigenvalues into `buf`; `written` receives the count.
 *
 * # Safety
 * `s` must be a live handle; `buf` must hold `cap` doubles.
 */
enum DoublonStatus doublon_spectrum_eigenvalues(const struct DoublonSpectrum *s,
                                                double *buf,
                                                uintptr_t cap,
                                                uintptr_t *written);

/**
 * Number of states classified as doublons.
 *
 * # Safety
 * `s` must be a live handle.
 */
uintptr_t doublon_spectrum_doublon_count(const struct DoublonSpectrum *s);

/**
 * # Safety
 * `s` must be NULL or a handle from [`doublon_spectrum_compute`] not yet freed.
 */
void doublon_spectrum_free(struct DoublonSpectrum *s);

/**
 * Relative-motion Green function `f_channel(K, E, r)`; `channel` is 0 or 1.
 *
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum DoublonStatus doublon_green_f(const struct DoublonParams *p,
                                   double k,
                                   double e,
                                   int64_t r,
                                   int channel,
                                   double *out);

/**
 * Single-photon bound-state length `L_I` of an emitter at `omega`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DoublonStatus doublon_spbs_length(double omega, double j, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DOUBLON_H */
