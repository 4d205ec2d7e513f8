#pragma once

#include <cstdint>
#include <vector>

#include "lasso.hpp"
#include "types.hpp"

namespace bolasso {

struct SelectorOutput {
  IndexSet support;  // nonzero indices of weights
  Vector weights;    // p, zero off-support
};

/// Solves (X'X/n + lambda I) w = X'y/n; at lambda = 0 a rank-deficient
/// design falls back to the minimum-norm least-squares solution.
Vector ridge(const LassoProblem& problem, double lambda);

/// Adds, one at a time, the variable whose OLS refit most reduces the
/// residual sum of squares (ties to the lower index), stopping at k.
SelectorOutput forward_greedy(const LassoProblem& problem, Index k);

/// Keeps the k largest |coefficients| of the (minimum-norm) OLS vector and
/// refits on that support.
SelectorOutput threshold_ls(const LassoProblem& problem, Index k);

/// Lasso with per-variable penalties mu / |w_ols_j|, solved by rescaling
/// column j by |w_ols_j|; variables with a zero OLS coefficient are excluded
/// up front. Throws AllWeightsZero when the OLS vector vanishes.
SelectorOutput adaptive_lasso(const LassoProblem& problem, double mu);

/// Averages minimum-norm OLS vectors over m bootstrap resamples, keeps the
/// top-k magnitudes of the average, refits on the original data.
SelectorOutput bagged_ls_threshold(const LassoProblem& problem, Index m, Index k, std::uint64_t seed);
SelectorOutput bagged_ls_threshold_with_rows(const LassoProblem& problem,
                                             const std::vector<std::vector<Index>>& rows, Index k);

/// Average of lasso solutions at mu over m bootstrap resamples (a prediction
/// estimator; generally dense).
Vector bagged_lasso(const LassoProblem& problem, Index m, double mu, std::uint64_t seed);
Vector bagged_lasso_with_rows(const LassoProblem& problem, const std::vector<std::vector<Index>>& rows,
                              double mu);

/// Bagged-lasso evaluations for a whole decreasing grid at the cost of one
/// path per replicate.
std::vector<Vector> bagged_lasso_grid(const LassoProblem& problem, Index m,
                                      const std::vector<double>& mu_grid, std::uint64_t seed);

/// "Select exactly r" rule for path methods: the size-r support spanning the
/// most grid points, ties toward larger mu; falls back to the path's own
/// breakpoints when the grid skips over every size-r stretch.
IndexSet path_select_exactly(const LassoPath& path, Index r, const std::vector<double>& mu_grid);

/// Path methods build their read-off grid from the fitted problem's own
/// mu_max (for the adaptive variant, the rescaled problem's).
SelectorOutput lasso_select_r(const LassoProblem& problem, Index r, Index grid_count = 64,
                              double grid_min_ratio = 1e-3);
SelectorOutput adaptive_lasso_select_r(const LassoProblem& problem, Index r, Index grid_count = 64,
                                       double grid_min_ratio = 1e-3);

}  // namespace bolasso
