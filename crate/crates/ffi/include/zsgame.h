#ifndef ZSGAME_H
#define ZSGAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ZsStatus {
  ZS_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  ZS_STATUS_NULL_POINTER = 1,
  /**
   * Bad parameters, lengths or tolerances, or a point outside its domain.
   */
  ZS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The fixed-point iteration hit its iteration cap.
   */
  ZS_STATUS_NON_CONVERGENCE = 3,
  /**
   * The candidate is not an equilibrium or a check failed.
   */
  ZS_STATUS_VERIFICATION_FAILED = 4,
  /**
   * Unexpected failure, including a caught panic.
   */
  ZS_STATUS_INTERNAL = 5,
} ZsStatus;

/**
 * Opaque game handle.
 */
typedef struct ZsGame ZsGame;

/**
 * Outcome of a max-min / min-max comparison for one player.
 */
typedef struct ZsSionResult {
  double maximin_value;
  double minimax_value;
  double gap;
  double arg_x;
  double arg_f;
  bool quasi_concave;
  bool passed;
} ZsSionResult;

/**
 * Summary of a verification run.
 */
typedef struct ZsVerifyResult {
  double max_deviation_gap;
  double max_sion_gap;
  double max_maximin_arg_gap;
  double zero_sum_residual;
  bool passed;
} ZsVerifyResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Three-firm Cournot game with subsidy `(f - vertex)^2` on `[f_lo, f_hi]`.
 * `c` points to 3 marginal costs. A non-positive `output_bound` selects the
 * default bound (the demand intercept).
 *
 * # Safety
 * `c` must point to 3 readable doubles and `out` to a writable handle slot.
 */
enum ZsStatus zs_cournot_new(double demand_intercept,
                             double b,
                             const double *c,
                             double output_bound,
                             double vertex,
                             double f_lo,
                             double f_hi,
                             struct ZsGame **out);

/**
 * Quadratic game with `phi_i = own_i x_i^2 + linear_i x_i + x_i sum_j cross_ij x_j + constant_i`
 * on `[lo_i, hi_i]`. `cross` is `n * n` row-major; `constant` may be null
 * for all zeros.
 *
 * # Safety
 * Every non-null array must hold the stated number of doubles and `out`
 * must point to a writable handle slot.
 */
enum ZsStatus zs_quadratic_new(size_t n,
                               const double *own,
                               const double *linear,
                               const double *cross,
                               const double *constant,
                               const double *lo,
                               const double *hi,
                               double vertex,
                               double f_lo,
                               double f_hi,
                               struct ZsGame **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `game` must be null or a handle from a `zs_*_new` call not yet freed.
 */
void zs_game_free(struct ZsGame *game);

/**
 * Number of main players `n`.
 *
 * # Safety
 * `game` must be a live handle and `out` writable.
 */
enum ZsStatus zs_game_num_players(const struct ZsGame *game, size_t *out);

/**
 * The subsidy minimizer `a`.
 *
 * # Safety
 * `game` must be a live handle and `out` writable.
 */
enum ZsStatus zs_subsidy_argmin(const struct ZsGame *game, double *out);

/**
 * Replaces the tolerances used by later calls on this handle.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum ZsStatus zs_set_tolerances(struct ZsGame *game,
                                double opt_tol,
                                double fp_tol,
                                double eq_tol,
                                double tie_tol);

/**
 * Replaces the damping factor and iteration cap used by `zs_solve`.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum ZsStatus zs_set_solver(struct ZsGame *game, double damping, size_t max_iter);

/**
 * Extended payoffs at `(x, f)`: `out[0..n]` for the main players and
 * `out[n]` for the subsidy player. `x_len` must be `n` and `out_len` `n + 1`.
 *
 * # Safety
 * `x` must hold `x_len` doubles and `out` must have room for `out_len`.
 */
enum ZsStatus zs_eval_pi(const struct ZsGame *game,
                         const double *x,
                         size_t x_len,
                         double f,
                         double *out,
                         size_t out_len);

/**
 * Solves for the equilibrium. `init` may be null to start from the domain
 * midpoint; otherwise it holds `n` doubles. Writes `n` strategies to `x_out`,
 * and `f` and the iteration count when those pointers are non-null.
 *
 * # Safety
 * Non-null pointers must be valid for the stated lengths.
 */
enum ZsStatus zs_solve(const struct ZsGame *game,
                       const double *init,
                       double *x_out,
                       size_t n,
                       double *f_out,
                       size_t *iterations_out);

/**
 * Max-min versus min-max of `pi_player` against the subsidy player, the
 * other main players fixed at `others` (`n - 1` doubles, in player order).
 *
 * # Safety
 * `others` must hold `others_len` doubles and `out` must be writable.
 */
enum ZsStatus zs_sion_check(const struct ZsGame *game,
                            size_t player,
                            const double *others,
                            size_t others_len,
                            struct ZsSionResult *out);

/**
 * Checks the Nash / minimax equivalence. With a null `candidate` the
 * equilibrium is solved first; otherwise `candidate` holds `n` doubles and
 * must be a Nash equilibrium. Returns `VerificationFailed` when any check
 * fails; `out` is still filled whenever the checks ran.
 *
 * # Safety
 * Non-null pointers must be valid for the stated lengths.
 */
enum ZsStatus zs_verify(const struct ZsGame *game,
                        const double *candidate,
                        size_t n,
                        struct ZsVerifyResult *out);

/**
 * Message of the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *zs_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZSGAME_H */
