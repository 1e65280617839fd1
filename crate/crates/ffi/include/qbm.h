#ifndef QBM_H
#define QBM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QbmDampingKind {
  QBM_DAMPING_KIND_OHMIC = 0,
  QBM_DAMPING_KIND_DRUDE = 1,
} QbmDampingKind;

typedef enum QbmGridKind {
  /**
   * Uniform grid on (0, omega_max].
   */
  QBM_GRID_KIND_LINEAR = 0,
  /**
   * Drude tangent grid; omega_max is ignored.
   */
  QBM_GRID_KIND_TANGENT = 1,
} QbmGridKind;

typedef enum QbmStatus {
  QBM_STATUS_OK = 0,
  QBM_STATUS_NULL_POINTER = 1,
  QBM_STATUS_INVALID_ARGUMENT = 2,
  QBM_STATUS_POLE = 3,
  QBM_STATUS_NON_CONVERGENCE = 4,
  QBM_STATUS_OVERDAMPED = 5,
  QBM_STATUS_DIVERGENT = 6,
  QBM_STATUS_INSUFFICIENT_COVERAGE = 7,
  QBM_STATUS_ROUTE_DISAGREEMENT = 8,
  QBM_STATUS_NUMERICAL_FAILURE = 9,
  QBM_STATUS_PANIC = 10,
} QbmStatus;

/**
 * A finite bath of oscillators.
 */
typedef struct QbmBath QbmBath;

/**
 * System plus explicit bath as a quadratic Hamiltonian.
 */
typedef struct QbmHamiltonian QbmHamiltonian;

/**
 * A damped oscillator: mass, frequency and friction model.
 */
typedef struct QbmOscillator QbmOscillator;

/**
 * Temperature and the constants ħ, k_B.
 */
typedef struct QbmThermal {
  double temperature;
  double hbar;
  double kb;
} QbmThermal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Natural units at the given temperature.
 */
struct QbmThermal qbm_thermal_natural(double temperature);

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library.
 */
const char *qbm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qbm_version(void);

/**
 * `cutoff` is read only for Drude friction.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum QbmStatus qbm_oscillator_new(double mass,
                                  double omega0,
                                  enum QbmDampingKind kind,
                                  double gamma,
                                  double cutoff,
                                  struct QbmOscillator **out_handle);

/**
 * # Safety
 * `osc` must come from `qbm_oscillator_new` and not be used afterwards. NULL is ignored.
 */
void qbm_oscillator_free(struct QbmOscillator *osc);

/**
 * Equilibrium ⟨q²⟩ and ⟨p²⟩.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_second_moments(const struct QbmOscillator *osc,
                                  struct QbmThermal thermal_params,
                                  double *q2,
                                  double *p2);

/**
 * Symmetrized position autocorrelation S_qq(t).
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_position_correlation(const struct QbmOscillator *osc,
                                        struct QbmThermal thermal_params,
                                        double t,
                                        double *value);

/**
 * ln of the reduced partition function.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_ln_partition_function(const struct QbmOscillator *osc,
                                         struct QbmThermal thermal_params,
                                         double *value);

/**
 * Crossover temperature for the cubic potential with barrier scale `q0`,
 * using the oscillator's mass, frequency and friction.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_crossover_temperature(const struct QbmOscillator *osc,
                                         double q0,
                                         double hbar,
                                         double kb,
                                         double *value);

/**
 * Discretizes the oscillator's friction into `n` unit-mass bath oscillators.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_bath_discretize(const struct QbmOscillator *osc,
                                   size_t n,
                                   enum QbmGridKind grid,
                                   double omega_max,
                                   struct QbmBath **out_handle);

/**
 * # Safety
 * `bath` must be a valid handle or NULL.
 */
size_t qbm_bath_len(const struct QbmBath *bath);

/**
 * Mass, frequency and coupling of oscillator `index` (sorted by frequency).
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_bath_get(const struct QbmBath *bath,
                            size_t index,
                            double *mass,
                            double *frequency,
                            double *coupling);

/**
 * # Safety
 * `bath` must come from `qbm_bath_discretize` and not be used afterwards. NULL is ignored.
 */
void qbm_bath_free(struct QbmBath *bath);

/**
 * Couples the oscillator's mass and frequency to `bath`; the oscillator's
 * own friction model is not used.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_hamiltonian_new(const struct QbmOscillator *osc,
                                   const struct QbmBath *bath,
                                   struct QbmHamiltonian **out_handle);

/**
 * # Safety
 * `h` must come from `qbm_hamiltonian_new` and not be used afterwards. NULL is ignored.
 */
void qbm_hamiltonian_free(struct QbmHamiltonian *h);

/**
 * Normal-mode ⟨q²⟩ and ⟨p²⟩ of the system coordinate.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QbmStatus qbm_hamiltonian_moments(const struct QbmHamiltonian *h,
                                       struct QbmThermal thermal_params,
                                       double *q2,
                                       double *p2);

/**
 * Symmetrized ⟨q(t)q(0)⟩ at `len` times, written to `values`.
 *
 * # Safety
 * `times` and `values` must each point to `len` doubles.
 */
enum QbmStatus qbm_hamiltonian_correlation(const struct QbmHamiltonian *h,
                                           struct QbmThermal thermal_params,
                                           const double *times,
                                           size_t len,
                                           double *values);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBM_H */
