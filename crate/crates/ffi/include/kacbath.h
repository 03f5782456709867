#ifndef KACBATH_H
#define KACBATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum KacStatus {
  KAC_STATUS_OK = 0,
  KAC_STATUS_NULL_POINTER = 1,
  KAC_STATUS_INVALID_ARGUMENT = 2,
  KAC_STATUS_DIMENSION_MISMATCH = 3,
  KAC_STATUS_OUT_OF_DOMAIN = 4,
  KAC_STATUS_MEAN_MISMATCH = 5,
  KAC_STATUS_UNSTABLE = 6,
  KAC_STATUS_NON_CONVERGENCE = 7,
  KAC_STATUS_CONFIG = 8,
  KAC_STATUS_ASSERTION = 9,
  KAC_STATUS_IO = 10,
  KAC_STATUS_PANIC = 11,
} KacStatus;

/**
 * Family of a one-dimensional law.
 */
typedef enum KacLawKind {
  /**
   * `a` = standard deviation.
   */
  KAC_LAW_KIND_GAUSSIAN = 0,
  /**
   * `a` = half width.
   */
  KAC_LAW_KIND_UNIFORM = 1,
  /**
   * `±a` with equal weights.
   */
  KAC_LAW_KIND_RADEMACHER = 2,
  /**
   * Atoms at `a > 0` and `b < 0`, weighted to have mean zero.
   */
  KAC_LAW_KIND_TWO_POINT = 3,
  KAC_LAW_KIND_DIRAC_ZERO = 4,
} KacLawKind;

/**
 * Characteristic function sampled on a lattice ball.
 */
typedef struct KacGrid KacGrid;

/**
 * Model parameters together with the reservoir law.
 */
typedef struct KacModel KacModel;

typedef struct KacSolverOptions {
  size_t nodes_per_axis;
  size_t n_theta;
  double picard_tol;
  size_t picard_max_iter;
  double dt;
  /**
   * Ball radius; `<= 0` selects `6 / sqrt(K_g)`.
   */
  double radius;
} KacSolverOptions;

/**
 * A centred law translated by `shift`. Reservoir laws must have `shift = 0`.
 */
typedef struct KacLawSpec {
  enum KacLawKind kind;
  double a;
  double b;
  double shift;
} KacLawSpec;

/**
 * Analytic rates and contraction factors of a model.
 */
typedef struct KacRates {
  double energy;
  double first_moment;
  double mixed_moment;
  double coupling;
  double gtw_factor;
  double t1_factor;
} KacRates;

/**
 * Ensemble averages at one record time.
 */
typedef struct KacMomentRow {
  double time;
  double energy;
  double energy_stderr;
  double mean_first;
  double mean_first_stderr;
  double mean_mixed;
  double mean_mixed_stderr;
} KacMomentRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *kac_version(void);

/**
 * Copies the last error message of the calling thread into `buf` (always
 * NUL-terminated when `len > 0`) and returns its full length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t kac_last_error_message(char *buf, size_t len);

/**
 * Default solver options (65 nodes per axis, 128 angles, automatic radius).
 */
struct KacSolverOptions kac_solver_options_default(void);

/**
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle that must
 * be released with [`kac_model_free`].
 */
enum KacStatus kac_model_new(double lambda,
                             double mu,
                             size_t n_particles,
                             struct KacLawSpec reservoir,
                             struct KacModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`kac_model_new`] not yet freed.
 */
void kac_model_free(struct KacModel *model);

/**
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum KacStatus kac_model_rates(const struct KacModel *model, struct KacRates *out);

/**
 * Runs `replicas` independent copies from `initial^{⊗N}` and writes one
 * row per entry of `times` (increasing, starting at or after 0) to `out`.
 *
 * # Safety
 * `times` and `out` must point to `n_times` elements.
 */
enum KacStatus kac_model_ensemble(const struct KacModel *model,
                                  struct KacLawSpec initial,
                                  size_t replicas,
                                  uint64_t seed,
                                  const double *times,
                                  size_t n_times,
                                  struct KacMomentRow *out);

/**
 * Synchronously coupled copies from `first^{⊗N}` and `second^{⊗N}`; writes
 * the replica mean of `Σ_i (v_i - w_i)²` at each record time.
 *
 * # Safety
 * `times` and `delta_sq` must point to `n_times` elements.
 */
enum KacStatus kac_model_coupling(const struct KacModel *model,
                                  struct KacLawSpec first,
                                  struct KacLawSpec second,
                                  size_t replicas,
                                  uint64_t seed,
                                  const double *times,
                                  size_t n_times,
                                  double *delta_sq);

/**
 * Picard iteration to the steady state, started from the Gaussian with the
 * reservoir energy. `iterations` may be null.
 *
 * # Safety
 * `model` and `out` must be valid; `*out` must be released with
 * [`kac_grid_free`].
 */
enum KacStatus kac_model_steady_state(const struct KacModel *model,
                                      struct KacSolverOptions options,
                                      struct KacGrid **out,
                                      size_t *iterations);

/**
 * Grid of the tensor power `law^{⊗dim}`.
 *
 * # Safety
 * `out` must be valid; `*out` must be released with [`kac_grid_free`].
 */
enum KacStatus kac_grid_from_law(size_t dim,
                                 double radius,
                                 size_t nodes_per_axis,
                                 struct KacLawSpec law_spec,
                                 struct KacGrid **out);

/**
 * Integrates the master equation from `initial` up to `t_end`.
 *
 * # Safety
 * All pointers must be valid; `*out` must be released with [`kac_grid_free`].
 */
enum KacStatus kac_grid_evolve(const struct KacGrid *initial,
                               const struct KacModel *model,
                               struct KacSolverOptions options,
                               double t_end,
                               struct KacGrid **out);

/**
 * # Safety
 * `grid` must be null or a live handle.
 */
void kac_grid_free(struct KacGrid *grid);

/**
 * Dimension of the grid, 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t kac_grid_dim(const struct KacGrid *grid);

/**
 * Interpolated value at `xi` (length `dim`).
 *
 * # Safety
 * `xi` must point to `dim` values; `re` and `im` must be valid.
 */
enum KacStatus kac_grid_eval(const struct KacGrid *grid,
                             const double *xi,
                             size_t dim,
                             double *re,
                             double *im);

/**
 * Mean vector (`dim` entries) and total energy from stencils at the origin.
 *
 * # Safety
 * `mean` must point to `kac_grid_dim(grid)` writable values; `energy` must
 * be valid.
 */
enum KacStatus kac_grid_moments(const struct KacGrid *grid, double *mean, double *energy);

/**
 * Excess kurtosis of the one-dimensional marginal along `axis`.
 *
 * # Safety
 * `grid` and `out` must be valid.
 */
enum KacStatus kac_grid_excess_kurtosis(const struct KacGrid *grid, size_t axis, double *out);

/**
 * GTW distance between two grids on the first grid's probes.
 *
 * # Safety
 * All pointers must be valid.
 */
enum KacStatus kac_grid_gtw(const struct KacGrid *f, const struct KacGrid *h, double *out);

/**
 * T1 distance between two grids on the first grid's probes.
 *
 * # Safety
 * All pointers must be valid.
 */
enum KacStatus kac_grid_t1(const struct KacGrid *f, const struct KacGrid *h, double *out);

/**
 * Exact W2 distance between two empirical measures on the line.
 *
 * # Safety
 * `a` and `b` must point to `na` and `nb` values; `out` must be valid.
 */
enum KacStatus kac_wasserstein2_1d(const double *a,
                                   size_t na,
                                   const double *b,
                                   size_t nb,
                                   double *out);

/**
 * Parses a TOML experiment document and runs it. `output_dir` may be null
 * to keep the configured directory. `exit_code` receives the CLI exit code
 * (0 ok, 3 failed assertions); it is left untouched when an error status
 * is returned.
 *
 * # Safety
 * `config` must be a NUL-terminated UTF-8 string; `output_dir` null or
 * NUL-terminated; `exit_code` valid.
 */
enum KacStatus kac_run_config(const char *config, const char *output_dir, int *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KACBATH_H */
