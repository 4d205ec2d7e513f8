#include "bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "linalg.hpp"
#include "parallel.hpp"

namespace bolasso {

LassoProblem subsample_rows(const LassoProblem& problem, const std::vector<Index>& rows) {
  Matrix x(static_cast<Index>(rows.size()), problem.p());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Index>(i)) = problem.design.row(rows[i]);
    y(static_cast<Index>(i)) = problem.response(rows[i]);
  }
  LassoProblem out;
  out.design = std::move(x);
  out.response = std::move(y);
  return out;
}

LassoProblem bootstrap_sample(const LassoProblem& problem, Rng& rng) {
  const Index n = problem.n();
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = rng.uniform_index(n);
  return subsample_rows(problem, rows);
}

std::vector<double> log_spaced_grid(double top, Index count, double min_ratio) {
  if (count < 1) throw InvalidArgument("mu grid: count must be >= 1");
  if (top <= 0.0) throw InvalidArgument("mu grid: top must be > 0");
  if (min_ratio <= 0.0 || min_ratio >= 1.0) throw InvalidArgument("mu grid: min_ratio must be in (0,1)");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double lo = std::log(top * min_ratio);
  const double hi = std::log(top);
  for (Index i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  grid.front() = top;
  return grid;
}

IndexSet soft_intersect(const std::vector<IndexSet>& supports, double fraction, Index p) {
  if (supports.empty()) throw InvalidArgument("soft_intersect: no supports");
  if (fraction <= 0.0 || fraction > 1.0) throw InvalidArgument("soft_intersect: fraction must be in (0,1]");
  std::vector<Index> counts(static_cast<std::size_t>(p), 0);
  for (const auto& s : supports) {
    for (Index j : s) counts[static_cast<std::size_t>(j)]++;
  }
  const double m = static_cast<double>(supports.size());
  std::vector<Index> keep;
  for (Index j = 0; j < p; ++j) {
    if (static_cast<double>(counts[static_cast<std::size_t>(j)]) / m >= fraction - 1e-12) keep.push_back(j);
  }
  return IndexSet(std::move(keep));
}

Vector ols_refit(const LassoProblem& problem, const IndexSet& support) {
  Vector w = Vector::Zero(problem.p());
  if (support.empty()) return w;
  for (Index j : support) {
    if (j < 0 || j >= problem.p()) throw IndexOutOfRange("ols_refit: support index out of range");
  }
  Matrix xj(problem.n(), support.size());
  for (Index k = 0; k < support.size(); ++k) xj.col(k) = problem.design.col(support[k]);
  const Vector wj = linalg::min_norm_lstsq(xj, problem.response);
  for (Index k = 0; k < support.size(); ++k) w(support[k]) = wj(k);
  return w;
}

namespace {

void validate_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0.0) throw InvalidArgument("mu grid: levels must be positive");
    if (i > 0 && grid[i] >= grid[i - 1]) throw InvalidArgument("mu grid: levels must be strictly decreasing");
  }
}

}  // namespace

BolassoResult run_bolasso(const LassoProblem& problem, const BolassoConfig& config) {
  if (config.replicates < 1) throw InvalidArgument("bolasso: replicates must be >= 1");
  if (config.soft_fraction <= 0.0 || config.soft_fraction > 1.0) {
    throw InvalidArgument("bolasso: soft_fraction must be in (0,1]");
  }
  if (config.support_tol < 0.0) throw InvalidArgument("bolasso: support_tol must be >= 0");
  std::vector<double> grid = config.mu_grid;
  if (grid.empty()) grid = log_spaced_grid(mu_max(problem), 64, 1e-3);
  validate_grid(grid);

  const Index m = config.replicates;
  const Index n_mu = static_cast<Index>(grid.size());
  const Index p = problem.p();

  // supports[k][g]: support of replicate k at grid level g.
  std::vector<std::vector<IndexSet>> supports(static_cast<std::size_t>(m));
  parallel_for(m, [&](Index k) {
    LassoPath path;
    int attempt = 0;
    for (;;) {
      try {
        Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(attempt)));
        const LassoProblem sample = bootstrap_sample(problem, rng);
        path = lars_lasso_path(sample);
        break;
      } catch (const DegenerateDesign&) {
        if (++attempt > 3) throw;
      }
    }
    auto& per_mu = supports[static_cast<std::size_t>(k)];
    per_mu.reserve(static_cast<std::size_t>(n_mu));
    for (double mu : grid) {
      // Knot weights hold exact zeros, so the default tolerance is 0; a
      // positive tolerance additionally trims interpolated values.
      per_mu.push_back(config.support_tol > 0.0
                           ? support_of(path_at(path, mu), config.support_tol)
                           : path_support_at(path, mu));
    }
  });

  BolassoResult result;
  result.replicates = m;
  result.soft_fraction = config.soft_fraction;
  result.per_mu.resize(static_cast<std::size_t>(n_mu));
  for (Index gidx = 0; gidx < n_mu; ++gidx) {
    auto& rec = result.per_mu[static_cast<std::size_t>(gidx)];
    rec.mu = grid[static_cast<std::size_t>(gidx)];
    rec.replicate_supports.reserve(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) {
      rec.replicate_supports.push_back(supports[static_cast<std::size_t>(k)][static_cast<std::size_t>(gidx)]);
    }
    rec.frequencies = Vector::Zero(p);
    for (const auto& s : rec.replicate_supports) {
      for (Index j : s) rec.frequencies(j) += 1.0;
    }
    rec.frequencies /= static_cast<double>(m);
    rec.hard_support = soft_intersect(rec.replicate_supports, 1.0, p);
    rec.soft_support = soft_intersect(rec.replicate_supports, config.soft_fraction, p);
    rec.refit_hard = ols_refit(problem, rec.hard_support);
    rec.refit_soft = (rec.soft_support == rec.hard_support)
                         ? rec.refit_hard
                         : ols_refit(problem, rec.soft_support);
  }
  return result;
}

IndexSet most_stable_pattern(const BolassoResult& result, Index r) {
  // Count grid points per size-r hard support; first occurrence (largest mu)
  // wins ties because the grid is scanned in decreasing-mu order.
  std::map<std::vector<Index>, std::pair<Index, std::size_t>> span;  // support -> (count, first seen)
  for (std::size_t g = 0; g < result.per_mu.size(); ++g) {
    const IndexSet& hs = result.per_mu[g].hard_support;
    if (hs.size() != r) continue;
    auto [it, inserted] = span.try_emplace(hs.indices(), std::pair<Index, std::size_t>{0, g});
    it->second.first++;
  }
  if (span.empty()) {
    throw NoPatternOfSizeR("bolasso: no grid point has a hard support of size " + std::to_string(r));
  }
  const std::vector<Index>* best = nullptr;
  Index best_count = -1;
  std::size_t best_first = 0;
  for (const auto& [support, stat] : span) {
    if (stat.first > best_count || (stat.first == best_count && stat.second < best_first)) {
      best = &support;
      best_count = stat.first;
      best_first = stat.second;
    }
  }
  return IndexSet(*best);
}

}  // namespace bolasso
