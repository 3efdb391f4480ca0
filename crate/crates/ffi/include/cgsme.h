#ifndef CGSME_H
#define CGSME_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of doubles per trajectory row: `t`, three populations, then real and
 * imaginary parts of `ρ₀₁`, `ρ₀₂`, `ρ₁₂`.
 */
#define CGSME_TRAJECTORY_COLUMNS 10

/**
 * Result codes.
 */
typedef enum {
  CGSME_STATUS_OK = 0,
  CGSME_STATUS_DOMAIN = 1,
  CGSME_STATUS_OVERFLOW = 2,
  CGSME_STATUS_DEGENERATE_FREQUENCIES = 3,
  CGSME_STATUS_CONVERGENCE = 4,
  CGSME_STATUS_STEP_SIZE = 5,
  CGSME_STATUS_NON_UNITARY = 6,
  CGSME_STATUS_NUMERICAL = 7,
  CGSME_STATUS_PICTURE = 8,
  CGSME_STATUS_GRID_MISMATCH = 9,
  CGSME_STATUS_BOUNDARY = 10,
  CGSME_STATUS_CONFIG = 11,
  CGSME_STATUS_IO = 12,
  CGSME_STATUS_NULL_POINTER = 13,
  CGSME_STATUS_OUT_OF_RANGE = 14,
  CGSME_STATUS_PANIC = 15,
} CgsmeStatus;

/**
 * Decay function selector for [`cgsme_dephasing_decay`].
 */
typedef enum {
  CGSME_DEPHASING_EXACT = 0,
  CGSME_DEPHASING_COARSE_GRAINED = 1,
  CGSME_DEPHASING_ROTATING_WAVE = 2,
} CgsmeDephasing;

/**
 * Exact reference run reused across objective evaluations.
 */
typedef struct CgsmeReference CgsmeReference;

/**
 * Schrödinger-picture density matrices on a time grid.
 */
typedef struct CgsmeTrajectory CgsmeTrajectory;

/**
 * Ohmic bath; `beta` may be `INFINITY`.
 */
typedef struct {
  double eta;
  double omega_c;
  double g;
  double beta;
} CgsmeBath;

/**
 * Transition frequencies of the V system.
 */
typedef struct {
  double omega1;
  double omega2;
} CgsmeSystem;

/**
 * 2×2 rate and Lamb-shift matrices, row-major.
 */
typedef struct {
  double dt;
  double gamma_re[4];
  double gamma_im[4];
  double lamb_re[4];
  double lamb_im[4];
} CgsmeRates;

/**
 * Exact-solver settings.
 */
typedef struct {
  double t_max;
  double step;
  size_t subsample;
  /**
   * Initially occupied level, 0, 1 or 2.
   */
  size_t initial_level;
} CgsmeSolver;

typedef struct {
  double dt_opt;
  double objective;
  double bracket_lo;
  double bracket_hi;
  size_t evaluations;
} CgsmeOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *cgsme_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cgsme_version(void);

/**
 * Principal-branch exponential integral `Ei(re + i·im)`.
 */
CgsmeStatus cgsme_expint_ei(double re, double im, double *out_re, double *out_im);

/**
 * Coarse-grained rate and Lamb-shift matrices at coarse-graining time `dt`.
 */
CgsmeStatus cgsme_rate_tensor(const CgsmeBath *bath,
                              const CgsmeSystem *system,
                              double dt,
                              CgsmeRates *out);

/**
 * Exact V-system dynamics in the Schrödinger picture.
 */
CgsmeStatus cgsme_solve_exact(const CgsmeBath *bath,
                              const CgsmeSystem *system,
                              const CgsmeSolver *solver,
                              CgsmeTrajectory **out);

/**
 * Markovian dynamics on the exact solver's output grid: coarse-grained when
 * `dt > 0`, rotating-wave when `dt` is zero.
 */
CgsmeStatus cgsme_solve_markov(const CgsmeBath *bath,
                               const CgsmeSystem *system,
                               const CgsmeSolver *solver,
                               double dt,
                               CgsmeTrajectory **out);

/**
 * Number of rows; zero for a null handle.
 */
size_t cgsme_trajectory_len(const CgsmeTrajectory *traj);

/**
 * Copy row `index` into `out`, which must hold [`CGSME_TRAJECTORY_COLUMNS`] doubles.
 */
CgsmeStatus cgsme_trajectory_row(const CgsmeTrajectory *traj, size_t index, double *out);

void cgsme_trajectory_free(CgsmeTrajectory *traj);

/**
 * Time-averaged trace distance between two trajectories on the same grid.
 */
CgsmeStatus cgsme_integrated_distance(const CgsmeTrajectory *a,
                                      const CgsmeTrajectory *b,
                                      double *out);

/**
 * Solve the exact dynamics once for repeated objective evaluations.
 */
CgsmeStatus cgsme_reference_new(const CgsmeBath *bath,
                                const CgsmeSystem *system,
                                const CgsmeSolver *solver,
                                CgsmeReference **out);

/**
 * Integrated distance of the coarse-grained dynamics at `dt` from the reference.
 */
CgsmeStatus cgsme_reference_objective(const CgsmeReference *reference, double dt, double *out);

/**
 * Integrated distance of the rotating-wave dynamics from the reference.
 */
CgsmeStatus cgsme_reference_rwa_objective(const CgsmeReference *reference, double *out);

/**
 * Log-grid scan of `n_grid` points in `[lo, hi]` refined by golden section to `xatol`.
 */
CgsmeStatus cgsme_optimize_dt(const CgsmeReference *reference,
                              double lo,
                              double hi,
                              size_t n_grid,
                              double xatol,
                              CgsmeOptimum *out);

void cgsme_reference_free(CgsmeReference *reference);

/**
 * Two-level dephasing decay function `Γ(t)`; `dt` is used by the coarse-grained method only.
 */
CgsmeStatus cgsme_dephasing_decay(const CgsmeBath *bath,
                                  double omega0,
                                  CgsmeDephasing method,
                                  double t,
                                  double dt,
                                  double *out);

/**
 * Run a JSON run configuration as the command-line tool would, writing its artifacts.
 */
CgsmeStatus cgsme_run_json(const char *config);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CGSME_H */
