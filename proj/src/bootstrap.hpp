#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lasso.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace bolasso {

/// New problem with n rows drawn uniformly with replacement from the
/// original rows, responses paired with their rows.
LassoProblem bootstrap_sample(const LassoProblem& problem, Rng& rng);
LassoProblem subsample_rows(const LassoProblem& problem, const std::vector<Index>& rows);

struct BolassoConfig {
  Index replicates = 128;
  /// Strictly decreasing positive levels at which supports are read off the
  /// replicate paths. Empty = 64 log-spaced points over
  /// [mu_max * 1e-3, mu_max] of the input problem.
  std::vector<double> mu_grid;
  /// Keep variables present in at least this fraction of replicates; 1.0 is
  /// the plain intersection.
  double soft_fraction = 1.0;
  std::uint64_t seed = 0;
  double support_tol = 0.0;
};

struct BolassoMuRecord {
  double mu = 0.0;
  std::vector<IndexSet> replicate_supports;  // one per replicate, in replicate order
  Vector frequencies;                        // p, selection count / m
  IndexSet hard_support;                     // intersection over replicates
  IndexSet soft_support;                     // frequency >= soft_fraction
  Vector refit_hard;                         // OLS refit on hard_support, p-vector
  Vector refit_soft;

  const IndexSet& selected(double soft_fraction) const {
    return soft_fraction < 1.0 ? soft_support : hard_support;
  }
  const Vector& refit(double soft_fraction) const {
    return soft_fraction < 1.0 ? refit_soft : refit_hard;
  }
};

struct BolassoResult {
  std::vector<BolassoMuRecord> per_mu;  // in mu_grid order (decreasing mu)
  Index replicates = 0;
  double soft_fraction = 1.0;
};

/// Runs the bootstrap-intersection selector: m replicate lasso paths, support
/// read-off on the shared grid, hard/soft intersection, and an unregularized
/// refit on the original data. Deterministic for a fixed config; replicates
/// that hit a degenerate resample are re-drawn up to 3 times.
BolassoResult run_bolasso(const LassoProblem& problem, const BolassoConfig& config);

/// Variables present in at least ceil-free `fraction * supports.size()`
/// supports; fraction 1 is the exact intersection.
IndexSet soft_intersect(const std::vector<IndexSet>& supports, double fraction, Index p);

/// p-vector, zero off the support, minimum-norm least squares on it.
Vector ols_refit(const LassoProblem& problem, const IndexSet& support);

/// Among hard supports of cardinality r along the grid, the one covering the
/// most grid points; ties resolved toward larger mu.
IndexSet most_stable_pattern(const BolassoResult& result, Index r);

std::vector<double> log_spaced_grid(double top, Index count, double min_ratio);

/// Penalty level mu0 * n^{-1/2}, the decay schedule under which the
/// bootstrap intersection is selection-consistent.
inline double root_n_penalty(double mu0, Index n) {
  return mu0 / std::sqrt(static_cast<double>(n));
}

}  // namespace bolasso
