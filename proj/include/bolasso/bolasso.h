/*
 * bolasso — sparse linear-regression workbench.
 *
 * C interface to the core library: lasso paths via LARS, a coordinate-descent
 * solver, bootstrap-intersection model selection, synthetic population models
 * with the l_inf consistency statistic, and a JSON-driven experiment runner.
 *
 * Conventions:
 *   - Every fallible call returns a bolasso_status; BOLASSO_OK is 0.
 *   - On failure, bolasso_last_error() returns a thread-local message valid
 *     until the next failing call on the same thread.
 *   - Handles are opaque; release them with the matching *_free function.
 *   - Matrices cross the boundary as row-major double arrays.
 */

#ifndef BOLASSO_BOLASSO_H
#define BOLASSO_BOLASSO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bolasso_status {
  BOLASSO_OK = 0,
  BOLASSO_ERR_INVALID_ARGUMENT = 1,
  BOLASSO_ERR_NOT_POSITIVE_DEFINITE = 2,
  BOLASSO_ERR_NOT_CONVERGED = 3,
  BOLASSO_ERR_DEGENERATE_DESIGN = 4,
  BOLASSO_ERR_SINGULAR_GRAM = 5,
  BOLASSO_ERR_NOT_FOUND = 6,
  BOLASSO_ERR_NO_PATTERN = 7,
  BOLASSO_ERR_PARSE = 8,
  BOLASSO_ERR_MISSING_TARGET = 9,
  BOLASSO_ERR_ALL_ROWS_DROPPED = 10,
  BOLASSO_ERR_INDEX_OUT_OF_RANGE = 11,
  BOLASSO_ERR_ALL_WEIGHTS_ZERO = 12,
  BOLASSO_ERR_IO = 13,
  BOLASSO_ERR_INTERNAL = 14
} bolasso_status;

const char* bolasso_version(void);
const char* bolasso_last_error(void);

/* Suggested process exit code for a status: 0 ok, 2 usage, 3 data, 4 numerical. */
int bolasso_status_exit_code(bolasso_status status);

void bolasso_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Regression problems                                                  */
/* ------------------------------------------------------------------ */

typedef struct bolasso_problem bolasso_problem;

bolasso_status bolasso_problem_create(int64_t n, int64_t p, const double* design_rowmajor,
                                      const double* response, bolasso_problem** out);
bolasso_status bolasso_problem_from_csv(const char* path, const char* target, char delimiter,
                                        bolasso_problem** out, int64_t* dropped_rows);
void bolasso_problem_free(bolasso_problem* problem);

int64_t bolasso_problem_rows(const bolasso_problem* problem);
int64_t bolasso_problem_cols(const bolasso_problem* problem);
bolasso_status bolasso_problem_design(const bolasso_problem* problem, double* out_rowmajor);
bolasso_status bolasso_problem_response(const bolasso_problem* problem, double* out);
bolasso_status bolasso_problem_mu_max(const bolasso_problem* problem, double* out);

/* Centered, unit-scale copy (constant columns dropped). */
bolasso_status bolasso_problem_standardize(const bolasso_problem* problem, bolasso_problem** out);

/* ------------------------------------------------------------------ */
/* Lasso solvers                                                        */
/* ------------------------------------------------------------------ */

typedef struct bolasso_path bolasso_path;

/* max_knots <= 0 selects an automatic cap. */
bolasso_status bolasso_path_compute(const bolasso_problem* problem, int64_t max_knots,
                                    bolasso_path** out);
void bolasso_path_free(bolasso_path* path);

int64_t bolasso_path_knot_count(const bolasso_path* path);
bolasso_status bolasso_path_knot_mu(const bolasso_path* path, int64_t knot, double* out);
bolasso_status bolasso_path_knot_weights(const bolasso_path* path, int64_t knot, double* out);
/* Piecewise-linear evaluation at an arbitrary mu (out has p entries). */
bolasso_status bolasso_path_eval(const bolasso_path* path, double mu, double* out);

bolasso_status bolasso_coordinate_descent(const bolasso_problem* problem, double mu, double tol,
                                          int64_t max_iter, double* weights_out);
bolasso_status bolasso_kkt_residual(const bolasso_problem* problem, double mu, const double* weights,
                                    double* out);

/* ------------------------------------------------------------------ */
/* Bootstrap-intersection selection                                     */
/* ------------------------------------------------------------------ */

typedef struct bolasso_run bolasso_run;

typedef struct bolasso_options {
  int64_t replicates;      /* bootstrap replicates m (default 128 when 0)   */
  double soft_fraction;    /* keep-threshold in (0,1]; 1 = hard intersection */
  uint64_t seed;
  int64_t grid_size;       /* used when mu_grid is NULL (default 64 when 0) */
  double grid_min_ratio;   /* used when mu_grid is NULL (default 1e-3)      */
  const double* mu_grid;   /* optional explicit decreasing grid             */
  int64_t mu_grid_len;
} bolasso_options;

void bolasso_options_init(bolasso_options* options);

bolasso_status bolasso_run_compute(const bolasso_problem* problem, const bolasso_options* options,
                                   bolasso_run** out);
void bolasso_run_free(bolasso_run* run);

int64_t bolasso_run_grid_size(const bolasso_run* run);
bolasso_status bolasso_run_mu(const bolasso_run* run, int64_t grid_index, double* out);
bolasso_status bolasso_run_frequency(const bolasso_run* run, int64_t grid_index, int64_t variable,
                                     double* out);
/* soft = 0 selects the hard intersection. `indices` may be NULL to query the
 * size; on input *count holds the capacity of `indices`. */
bolasso_status bolasso_run_support(const bolasso_run* run, int64_t grid_index, int soft,
                                   int64_t* indices, int64_t* count);
bolasso_status bolasso_run_refit(const bolasso_run* run, int64_t grid_index, int soft, double* out);

/* ------------------------------------------------------------------ */
/* Population models                                                    */
/* ------------------------------------------------------------------ */

typedef struct bolasso_model bolasso_model;

/* loading_scale: 0 = unit-l2 subvector normalization, 1 = unit magnitudes. */
bolasso_status bolasso_model_generate(int64_t p, int64_t r, uint64_t seed, int loading_scale,
                                      bolasso_model** out);
/* Redraws until the consistency statistic lands on the requested side of 1. */
bolasso_status bolasso_model_find_kappa(int64_t p, int64_t r, int want_consistent, uint64_t seed,
                                        int max_draws, bolasso_model** out);
bolasso_status bolasso_model_load(const char* path, bolasso_model** out);
bolasso_status bolasso_model_save(const bolasso_model* model, const char* path);
void bolasso_model_free(bolasso_model* model);

int64_t bolasso_model_dim(const bolasso_model* model);
int64_t bolasso_model_sparsity(const bolasso_model* model);
bolasso_status bolasso_model_sigma(const bolasso_model* model, double* out);
bolasso_status bolasso_model_weights(const bolasso_model* model, double* out);
bolasso_status bolasso_model_kappa(const bolasso_model* model, double* out);
bolasso_status bolasso_model_sample(const bolasso_model* model, int64_t n, uint64_t seed,
                                    bolasso_problem** out);

/* ------------------------------------------------------------------ */
/* Experiment runner                                                    */
/* ------------------------------------------------------------------ */

/* Runs one workbench command described by a JSON spec (the CLI subcommands
 * map one-to-one onto spec["command"]); artifacts are written under
 * spec["out"]. On success *summary_json holds a malloc'd JSON summary to be
 * released with bolasso_string_free. */
bolasso_status bolasso_command_run_json(const char* spec_json, char** summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BOLASSO_BOLASSO_H */
