#ifndef DIQKD_BOUND_H
#define DIQKD_BOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Objective selector for [`diqkd_config_set_objective`].
 */
typedef enum DiqkdObjective {
  DIQKD_OBJECTIVE_FROBENIUS = 0,
  DIQKD_OBJECTIVE_TRACE_NORM = 1,
} DiqkdObjective;

/**
 * How the chosen solve terminated; mirrors the library's solver status.
 */
typedef enum DiqkdSolverStatus {
  DIQKD_SOLVER_STATUS_CONVERGED = 0,
  DIQKD_SOLVER_STATUS_STAGNATED = 1,
  DIQKD_SOLVER_STATUS_MAX_ITERS = 2,
} DiqkdSolverStatus;

/**
 * Status codes returned by every API call. The numeric values match the
 * CLI process exit codes where both exist.
 */
typedef enum DiqkdStatus {
  DIQKD_STATUS_OK = 0,
  /**
   * The requested score is not attainable.
   */
  DIQKD_STATUS_INFEASIBLE = 2,
  /**
   * Invalid configuration or argument.
   */
  DIQKD_STATUS_CONFIG = 3,
  /**
   * A numerical routine failed to converge.
   */
  DIQKD_STATUS_NUMERICAL = 4,
  /**
   * I/O failure.
   */
  DIQKD_STATUS_IO = 5,
  /**
   * A required pointer argument was null.
   */
  DIQKD_STATUS_NULL_POINTER = 6,
  /**
   * An internal invariant was violated.
   */
  DIQKD_STATUS_INTERNAL = 7,
} DiqkdStatus;

/**
 * Opaque configuration handle.
 */
typedef struct DiqkdConfig DiqkdConfig;

/**
 * Certified bound for one CHSH score.
 */
typedef struct DiqkdBoundResult {
  /**
   * Certified disturbance bound (regularizer already removed).
   */
  double n_star;
  /**
   * Certified lower bound on Eve's conditional entropy, in bits.
   */
  double c_bar;
  /**
   * Winning angle pair of the net optimization.
   */
  double phi_a;
  double phi_b;
  /**
   * Final per-party pessimistic corrections.
   */
  double delta_a;
  double delta_b;
  /**
   * Final net half-width and the relaxed score it implies.
   */
  double eps_final;
  double relaxed_s;
  /**
   * Number of solver invocations consumed.
   */
  uint64_t solves;
  /**
   * Termination status of the final solve.
   */
  enum DiqkdSolverStatus solver_status;
} DiqkdBoundResult;

/**
 * Key-rate figures for one CHSH score and protocol parameters.
 */
typedef struct DiqkdKeyRateResult {
  /**
   * Certified entropy bound, in bits.
   */
  double c_bar;
  /**
   * Secret fraction after error correction.
   */
  double r_inf;
  /**
   * Asymptotic key rate (secret fraction times sifting probability).
   */
  double k_inf;
  /**
   * Sifting probability `p^2 + (1-p)^2`.
   */
  double sifting_probability;
} DiqkdKeyRateResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Latest error message for this thread as a NUL-terminated C string, or
 * null if no error has occurred. The pointer stays valid until the next
 * failing call on the same thread.
 *
 * # Safety
 *
 * The returned pointer must not be freed or written through.
 */
const char *diqkd_last_error_message(void);

/**
 * Allocates a configuration with library defaults. Never returns null.
 * Release with [`diqkd_config_free`].
 */
struct DiqkdConfig *diqkd_config_new(void);

/**
 * Releases a configuration created by [`diqkd_config_new`]. A null
 * pointer is ignored.
 *
 * # Safety
 *
 * `cfg` must be null or a pointer previously returned by
 * [`diqkd_config_new`] that has not been freed yet.
 */
void diqkd_config_free(struct DiqkdConfig *cfg);

/**
 * Sets the weight of the first key basis; must lie in [0, 1].
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_lambda(struct DiqkdConfig *cfg, double value);

/**
 * Sets the Tikhonov regularization strength; must be >= 0.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_mu(struct DiqkdConfig *cfg, double value);

/**
 * Sets the coarse net half-width in radians. Shrinks the stopping
 * width to match when it would otherwise exceed the new half-width.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_eps0(struct DiqkdConfig *cfg, double value);

/**
 * Sets the refinement stopping half-width in radians.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_width_tol(struct DiqkdConfig *cfg, double value);

/**
 * Sets the number of children per refinement level (>= 2).
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_refine_factor(struct DiqkdConfig *cfg, uint64_t value);

/**
 * Sets the safety multiplier on the Lipschitz estimate (>= 1).
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_lipschitz_safety(struct DiqkdConfig *cfg, double value);

/**
 * Sets the per-solve iteration budget; must be positive.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_max_iters(struct DiqkdConfig *cfg, uint64_t value);

/**
 * Sets the RNG seed used by randomized solver components.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_seed(struct DiqkdConfig *cfg, uint64_t value);

/**
 * Selects the optimization objective.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`].
 */
enum DiqkdStatus diqkd_config_set_objective(struct DiqkdConfig *cfg, enum DiqkdObjective objective);

/**
 * Computes the certified entropy bound at CHSH score `s` and writes it
 * to `out`.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`] and `out` must
 * point to writable memory for one `DiqkdBoundResult`.
 */
enum DiqkdStatus diqkd_cstar_bound(const struct DiqkdConfig *cfg,
                                   double s,
                                   struct DiqkdBoundResult *out);

/**
 * Computes the asymptotic key rate at CHSH score `s` for first-basis
 * probability `p` and the two basis QBERs, writing the result to `out`.
 *
 * # Safety
 *
 * `cfg` must be a live pointer from [`diqkd_config_new`] and `out` must
 * point to writable memory for one `DiqkdKeyRateResult`.
 */
enum DiqkdStatus diqkd_key_rate(const struct DiqkdConfig *cfg,
                                double s,
                                double p,
                                double qber0,
                                double qber1,
                                struct DiqkdKeyRateResult *out);

/**
 * Writes the largest CHSH score attainable at the given measurement
 * angles to `out`.
 *
 * # Safety
 *
 * `out` must point to writable memory for one `double`.
 */
enum DiqkdStatus diqkd_max_violation(double phi_a, double phi_b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIQKD_BOUND_H */
