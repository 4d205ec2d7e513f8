#pragma once

#include <cstdint>
#include <vector>

#include "bootstrap.hpp"
#include "lasso.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace bolasso {

/// How the r nonzero loadings are normalized before the shared uniform
/// [1/3, 1] rescaling. UnitL2 normalizes the r-subvector to unit l2 norm;
/// UnitAbs sets every loading to unit absolute value first.
enum class LoadingScale { unit_l2, unit_abs };

struct PopulationModel {
  Matrix q;           // p x p second-moment matrix, SPD, unit diagonal
  Vector w_true;      // p, nonzero exactly on j_true
  double sigma = 0.0; // noise standard deviation
  IndexSet j_true;
  SignPattern s_true;

  Index p() const { return q.rows(); }
};

/// Samples the synthetic family: Q = GG' scaled to unit diagonal for a
/// standard normal G, loadings on the first r coordinates drawn standard
/// normal, normalized, and rescaled by a shared uniform draw in [1/3, 1];
/// sigma = 0.1 * (w' Q w)^{1/2}.
PopulationModel generate_population(Index p, Index r, Rng& rng, LoadingScale scale = LoadingScale::unit_l2);

/// Rows x_i ~ N(0, Q) through the Cholesky factor of Q, y_i = x_i'w + eps_i
/// with eps_i ~ N(0, sigma^2).
LassoProblem sample_dataset(const PopulationModel& model, Index n, Rng& rng);

/// kappa = || Q_{J^c J} Q_{JJ}^{-1} sign(w_J) ||_inf; the estimator is
/// model-selection consistent for mu ~ n^{-1/2}-or-slower decay iff this is
/// at most 1. Defined as 0 when the complement is empty.
double consistency_kappa(const PopulationModel& model);

/// Redraws models until kappa lands on the requested side of 1.
PopulationModel find_model_with_kappa(Index p, Index r, bool want_consistent, Rng& rng, int max_draws,
                                      LoadingScale scale = LoadingScale::unit_l2);

/// Population-level zero-estimate threshold ||Q w||_inf, the n -> infinity
/// limit of the empirical mu_max; used to anchor shared experiment grids.
double population_mu_max(const PopulationModel& model);

struct FrequencyTable {
  std::vector<double> mu_grid;                   // decreasing
  std::vector<std::vector<Index>> counts;        // [n_mu][p] selection counts
  Index reps = 0;
  std::vector<std::vector<IndexSet>> patterns;   // [n_mu][reps] selected supports

  double frequency(Index mu_idx, Index var) const {
    return static_cast<double>(counts[static_cast<std::size_t>(mu_idx)][static_cast<std::size_t>(var)]) /
           static_cast<double>(reps);
  }
};

struct SelectionMethod {
  enum class Kind { plain_lasso, bolasso };
  Kind kind = Kind::plain_lasso;
  BolassoConfig bolasso;  // replicates/soft_fraction used when kind == bolasso

  static SelectionMethod plain() { return SelectionMethod{}; }
  static SelectionMethod bootstrap(Index m, double soft_fraction = 1.0) {
    SelectionMethod method;
    method.kind = Kind::bolasso;
    method.bolasso.replicates = m;
    method.bolasso.soft_fraction = soft_fraction;
    return method;
  }
};

/// Draws `reps` fresh datasets, runs the selector on each, and records the
/// selected support per grid level. Replication k is seeded by
/// mix_seed(seed, k), so the table is deterministic under parallel execution.
FrequencyTable sign_frequency_experiment(const PopulationModel& model, Index n,
                                         const std::vector<double>& mu_grid, Index reps,
                                         std::uint64_t seed, const SelectionMethod& method);

/// Per grid level, the fraction of replications whose selected support equals
/// the model's true support.
std::vector<double> correct_pattern_probability(const FrequencyTable& table, const PopulationModel& model);

/// Log-odds with frequencies clipped to [1/(2 reps), 1 - 1/(2 reps)].
double clipped_log_odds(double frequency, Index reps);

}  // namespace bolasso
