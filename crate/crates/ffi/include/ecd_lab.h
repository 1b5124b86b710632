#ifndef ECD_LAB_H
#define ECD_LAB_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>
#include <stdint.h>
#include <stdbool.h>
#include <stddef.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum EcdLabStatus {
  ECD_LAB_STATUS_OK = 0,
  ECD_LAB_STATUS_NULL_POINTER = 1,
  ECD_LAB_STATUS_INVALID_ARGUMENT = 2,
  ECD_LAB_STATUS_ASSUMPTION_VIOLATION = 3,
  ECD_LAB_STATUS_DOMAIN_ERROR = 4,
  ECD_LAB_STATUS_QUADRATURE_ERROR = 5,
  ECD_LAB_STATUS_SOLVER_ERROR = 6,
  ECD_LAB_STATUS_RESOLUTION_ERROR = 7,
  ECD_LAB_STATUS_TIMEOUT = 8,
  ECD_LAB_STATUS_NO_HITS = 9,
  ECD_LAB_STATUS_NO_DETECTION = 10,
  ECD_LAB_STATUS_CONFIG_ERROR = 11,
  ECD_LAB_STATUS_IO_ERROR = 12,
  ECD_LAB_STATUS_PANIC = 13,
} EcdLabStatus;

/**
 * Opaque landscape handle.
 */
typedef struct EcdLabLandscape EcdLabLandscape;

/**
 * Opaque coordinate-maps handle (one landscape at one energy).
 */
typedef struct EcdLabMaps EcdLabMaps;

/**
 * Opaque spectral-model handle.
 */
typedef struct EcdLabSpectralModel EcdLabSpectralModel;

/**
 * Closed-form hitting-time decomposition.
 */
typedef struct EcdLabHittingBreakdown {
  double t_det;
  double barrier_term;
  double tail_term;
  double total;
  double q;
  double l_classical;
  double tail_left;
  double tail_right;
} EcdLabHittingBreakdown;

/**
 * Monte Carlo parameters.
 */
typedef struct EcdLabSimParams {
  double lambda_c;
  /**
   * initial direction: +1 or -1
   */
  int32_t u0;
  uint64_t seed;
  double max_s;
  uintptr_t n_traj;
  /**
   * hitting window half-width; pass a negative value for exact hitting
   */
  double window_sigma;
  /**
   * deep-excursion cutoff share; 0 disables, 0.05 is the default
   */
  double teleport_rel;
} EcdLabSimParams;

/**
 * Monte Carlo summary.
 */
typedef struct EcdLabMcSummary {
  double mean_t;
  double se_t;
  uintptr_t n_hits;
  uintptr_t n_timeouts;
} EcdLabMcSummary;

/**
 * Quantum hitting-protocol summary.
 */
typedef struct EcdLabQuantumHit {
  /**
   * min over τ of τ/p̄_σ(τ) in the e^{−iHt/ħ} clock
   */
  double t_hit_numeric;
  /**
   * (I₀²/ħ)√(V₀/V₁)
   */
  double t_bound;
  double implied_c;
  /**
   * λ_q²ħ² × t_hit_numeric
   */
  double t_hit_rescaled;
  double tau_star;
  bool bracket_interior;
} EcdLabQuantumHit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (truncated,
 * always NUL-terminated). Returns the untruncated length.
 *
 * # Safety
 * `buf` must point to at least `len` writable bytes when `len > 0`.
 */
uintptr_t ecdlab_last_error_message(char *buf, uintptr_t len);

/**
 * Create a symmetric quartic landscape V = ω²/8a²(θ²−a²)² + V₀.
 *
 * # Safety
 * `out` must be a valid pointer; on `Ok` it receives an owned handle that
 * must be released with [`ecdlab_landscape_free`].
 */
enum EcdLabStatus ecdlab_landscape_quartic_new(double a,
                                               double omega,
                                               double v0,
                                               struct EcdLabLandscape **out);

/**
 * Release a landscape handle. Null is a no-op.
 *
 * # Safety
 * `lnd` must be null or a handle from [`ecdlab_landscape_quartic_new`] not
 * yet freed.
 */
void ecdlab_landscape_free(struct EcdLabLandscape *lnd);

/**
 * Evaluate V(θ).
 *
 * # Safety
 * `lnd` must be a live landscape handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_landscape_eval_v(const struct EcdLabLandscape *lnd,
                                          double theta,
                                          double *out);

/**
 * Momentum p(θ) = √(E/V(θ)).
 *
 * # Safety
 * `lnd` must be a live landscape handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_landscape_momentum(const struct EcdLabLandscape *lnd,
                                            double energy,
                                            double theta,
                                            double *out);

/**
 * Build the quadrature-backed coordinate maps for one (landscape, E) pair.
 *
 * # Safety
 * `lnd` must be a live landscape handle; `out` receives an owned handle to
 * release with [`ecdlab_maps_free`].
 */
enum EcdLabStatus ecdlab_maps_build(const struct EcdLabLandscape *lnd,
                                    double energy,
                                    double quad_tol,
                                    struct EcdLabMaps **out);

/**
 * Release a maps handle. Null is a no-op.
 *
 * # Safety
 * `maps` must be null or a handle from [`ecdlab_maps_build`] not yet freed.
 */
void ecdlab_maps_free(struct EcdLabMaps *maps);

/**
 * L = φ(a_right) − φ(a_left).
 *
 * # Safety
 * `maps` must be a live maps handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_maps_l_classical(const struct EcdLabMaps *maps, double *out);

/**
 * Total Liouville length I(−∞, ∞).
 *
 * # Safety
 * `maps` must be a live maps handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_maps_l_y(const struct EcdLabMaps *maps, double *out);

/**
 * Distance integral I(θ₁, θ₂) = y(θ₂) − y(θ₁).
 *
 * # Safety
 * `maps` must be a live maps handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_maps_distance_i(const struct EcdLabMaps *maps,
                                         double theta1,
                                         double theta2,
                                         double *out);

/**
 * Telegraph crossing probability q = 1/(1 + λ_c L).
 */
double ecdlab_crossing_prob(double lambda_c, double l);

/**
 * Expected legs to hit: 2/q − 1 from (0,+) (`start_sign` = +1) or 2/q from
 * (0,−) (`start_sign` = −1). NaN on invalid arguments.
 */
double ecdlab_expected_legs(double q, int32_t start_sign);

/**
 * Exponential integral E₁(x), x ≥ 0.
 */
double ecdlab_exp_e1(double x);

/**
 * Closed-form expected hitting time decomposition from the local well.
 *
 * # Safety
 * `maps` must be a live maps handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_hitting_breakdown(const struct EcdLabMaps *maps,
                                           double lambda_c,
                                           int32_t u0,
                                           struct EcdLabHittingBreakdown *out);

/**
 * Event-driven Monte Carlo hitting-time estimate.
 *
 * # Safety
 * `maps`, `params`, `out` must be valid; `maps` must be a live handle.
 */
enum EcdLabStatus ecdlab_mc_hitting(const struct EcdLabMaps *maps,
                                    const struct EcdLabSimParams *params,
                                    struct EcdLabMcSummary *out);

/**
 * Build the Liouville spectral model.
 *
 * # Safety
 * `maps` must be a live maps handle; `out` receives an owned handle to
 * release with [`ecdlab_spectral_free`].
 */
enum EcdLabStatus ecdlab_spectral_build(const struct EcdLabMaps *maps,
                                        double hbar,
                                        double lambda_q,
                                        uintptr_t n_grid,
                                        struct EcdLabSpectralModel **out);

/**
 * Release a spectral-model handle. Null is a no-op.
 *
 * # Safety
 * `model` must be null or a handle from [`ecdlab_spectral_build`] not yet
 * freed.
 */
void ecdlab_spectral_free(struct EcdLabSpectralModel *model);

/**
 * Energy E_n of mode n (0-based ascending).
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_spectral_eigenvalue(const struct EcdLabSpectralModel *model,
                                             uintptr_t n,
                                             double *out);

/**
 * WKB cut-off energy of the model.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_spectral_e_cut(const struct EcdLabSpectralModel *model, double *out);

/**
 * Run the randomized-time hitting protocol with the standard packet
 * (zero-momentum Gaussian of width α√ħ at the local well, detection window
 * of the same width at the global well).
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum EcdLabStatus ecdlab_quantum_hit(const struct EcdLabSpectralModel *model,
                                     double alpha,
                                     struct EcdLabQuantumHit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECD_LAB_H */
