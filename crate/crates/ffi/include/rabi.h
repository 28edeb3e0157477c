#ifndef RABI_H
#define RABI_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define RABI_PRESET_FIG2 0

#define RABI_PRESET_CASE_ONE 1

#define RABI_PRESET_CASE_TWO 2

#define RABI_MODEL_FULL 0

#define RABI_MODEL_REDUCED 1

#define RABI_MODEL_EFFECTIVE 2

#define RABI_METHOD_RK4 0

#define RABI_METHOD_EXPM 1

#define RABI_POP_CL 0

#define RABI_POP_CR 1

#define RABI_POP_AL 2

#define RABI_POP_AR 3

#define RABI_POP_B 4

#define RABI_REGIME_NEITHER 0

#define RABI_REGIME_CASE_I 1

#define RABI_REGIME_CASE_II 2

/**
 * Number of eigenvalues written by [`rabi_spectrum_full`].
 */
#define RABI_FULL_DIM 10

typedef enum RabiStatus {
  RABI_STATUS_OK = 0,
  RABI_STATUS_NULL_POINTER = 1,
  RABI_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed config text or parameters rejected by validation.
   */
  RABI_STATUS_INVALID_CONFIG = 3,
  /**
   * The requested model does not apply, e.g. effective model with δ′_L ≠ −δ′_R.
   */
  RABI_STATUS_INVALID_MODEL = 4,
  /**
   * z = xy − J² vanishes; the cavity modes cannot be eliminated.
   */
  RABI_STATUS_SINGULAR = 5,
  /**
   * Eigensolver failure or steady-state non-convergence.
   */
  RABI_STATUS_NUMERICAL = 6,
  /**
   * Output buffer shorter than required.
   */
  RABI_STATUS_BUFFER_TOO_SMALL = 7,
  RABI_STATUS_PANIC = 8,
} RabiStatus;

typedef struct RabiParams RabiParams;

typedef struct RabiTrajectory RabiTrajectory;

typedef struct RabiComplex {
  double re;
  double im;
} RabiComplex;

/**
 * Effective couplings after eliminating the cavity modes, rad/µs.
 */
typedef struct RabiEffective {
  /**
   * C = −ḡ²N J/|z_R|.
   */
  double direct_coupling;
  struct RabiComplex g_eff;
  struct RabiComplex g_bar_eff;
  double g_eff_r;
  double g_bar_eff_r;
  double lambda;
  double omega_m_tilde;
  double stark_detuning_l;
  double stark_detuning_r;
  double gamma_at_eff;
  /**
   * Re z, (rad/µs)².
   */
  double z_r;
  bool antisymmetric;
} RabiEffective;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rabi_last_error(void);

/**
 * Creates a built-in parameter set (`RABI_PRESET_*`).
 *
 * # Safety
 * `params` must be a valid pointer to writable storage for a handle.
 */
enum RabiStatus rabi_params_preset(uint32_t preset, struct RabiParams **params);

/**
 * Parses config-file text (`key = value` lines) into a parameter set.
 * Validation errors are reported as `InvalidConfig`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `params` must be writable.
 */
enum RabiStatus rabi_params_from_config(const char *text, struct RabiParams **params);

/**
 * Copies a parameter set.
 *
 * # Safety
 * `params` must be a live handle; `copy` must be writable.
 */
enum RabiStatus rabi_params_clone(const struct RabiParams *params, struct RabiParams **copy);

/**
 * # Safety
 * `params` must be null or a handle from this library not yet freed.
 */
void rabi_params_free(struct RabiParams *params);

/**
 * Sets one config key. Frequencies are in rad/µs.
 *
 * # Safety
 * `params` must be a live handle and `key` a NUL-terminated string.
 */
enum RabiStatus rabi_params_set(struct RabiParams *params, const char *key, double value);

/**
 * Reads one config key. Frequencies are in rad/µs.
 *
 * # Safety
 * `params` must be a live handle, `key` a NUL-terminated string and `value`
 * writable.
 */
enum RabiStatus rabi_params_get(const struct RabiParams *params, const char *key, double *value);

/**
 * Validates the parameter set; fails with `InvalidConfig` listing every error.
 * `warnings` receives the number of non-fatal issues.
 *
 * # Safety
 * `params` must be a live handle; `warnings` may be null.
 */
enum RabiStatus rabi_params_validate(const struct RabiParams *params, uint32_t *warnings);

/**
 * # Safety
 * `params` must be a live handle and `result` writable.
 */
enum RabiStatus rabi_effective(const struct RabiParams *params, struct RabiEffective *result);

/**
 * Writes one of `RABI_REGIME_*`.
 *
 * # Safety
 * `params` must be a live handle and `regime` writable.
 */
enum RabiStatus rabi_regime(const struct RabiParams *params, uint32_t *regime);

/**
 * Integrates the model from an initial state given by the annihilation-mode
 * amplitudes `init[k]`, one per mode of the model in the order aL, aR, b,
 * cL, cR (full) or b, cL, cR (reduced, effective). Conjugates are implied.
 *
 * # Safety
 * `params` must be a live handle, `init` must point to `n_init` values and
 * `trajectory` must be writable.
 */
enum RabiStatus rabi_simulate(const struct RabiParams *params,
                              uint32_t model_code,
                              uint32_t method_code,
                              const struct RabiComplex *init,
                              size_t n_init,
                              double t_max,
                              double dt_out,
                              struct RabiTrajectory **trajectory);

/**
 * # Safety
 * `trajectory` must be null or a handle from this library not yet freed.
 */
void rabi_trajectory_free(struct RabiTrajectory *trajectory);

/**
 * Number of samples.
 *
 * # Safety
 * `trajectory` must be a live handle and `len` writable.
 */
enum RabiStatus rabi_trajectory_len(const struct RabiTrajectory *trajectory, size_t *len);

/**
 * Copies the sample times (µs) into `buffer`.
 *
 * # Safety
 * `trajectory` must be a live handle and `buffer` must hold `capacity` values.
 */
enum RabiStatus rabi_trajectory_times(const struct RabiTrajectory *trajectory,
                                      double *buffer,
                                      size_t capacity);

/**
 * Copies |⟨δO⟩|² for one of `RABI_POP_*` into `buffer`. Fails with
 * `InvalidArgument` when the model lacks that mode.
 *
 * # Safety
 * `trajectory` must be a live handle and `buffer` must hold `capacity` values.
 */
enum RabiStatus rabi_trajectory_population(const struct RabiTrajectory *trajectory,
                                           uint32_t observable_code,
                                           double *buffer,
                                           size_t capacity);

/**
 * Mean spacing of the maxima of one population, µs.
 *
 * # Safety
 * `trajectory` must be a live handle and `period` writable.
 */
enum RabiStatus rabi_trajectory_period(const struct RabiTrajectory *trajectory,
                                       uint32_t observable_code,
                                       double *period);

/**
 * Eigenvalues of the 2×2 cavity-fluctuation matrix at radiation shift `r`.
 *
 * # Safety
 * `params` must be a live handle; the out pointers must be writable.
 */
enum RabiStatus rabi_cavity_stability(const struct RabiParams *params,
                                      double r,
                                      struct RabiComplex *lambda_plus,
                                      struct RabiComplex *lambda_minus,
                                      bool *stable);

/**
 * Radiation shift r of the classical steady state driven at `epsilon`.
 *
 * # Safety
 * `params` must be a live handle and `r` writable.
 */
enum RabiStatus rabi_steady_state_shift(const struct RabiParams *params, double epsilon, double *r);

/**
 * Spectrum of the full 10×10 drift, most damped first. `eigenvalues` receives
 * `RABI_FULL_DIM` values, `cavity_weight` the cavity weight of the four most
 * damped eigenvectors.
 *
 * # Safety
 * `params` must be a live handle; `eigenvalues` must hold `RABI_FULL_DIM`
 * values and `cavity_weight` four; `stable` must be writable.
 */
enum RabiStatus rabi_spectrum_full(const struct RabiParams *params,
                                   struct RabiComplex *eigenvalues,
                                   double *cavity_weight,
                                   bool *stable);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RABI_H */
