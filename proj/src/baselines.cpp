#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "bootstrap.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace bolasso {

namespace {

SelectorOutput refit_output(const LassoProblem& problem, const std::vector<Index>& chosen) {
  SelectorOutput out;
  out.weights = ols_refit(problem, IndexSet::from_unsorted(chosen));
  out.support = support_of(out.weights, 1e-10);
  return out;
}

std::vector<Index> top_k_magnitudes(const Vector& v, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double fa = std::abs(v(a));
    const double fb = std::abs(v(b));
    if (fa != fb) return fa > fb;
    return a < b;
  });
  order.resize(static_cast<std::size_t>(std::min(k, v.size())));
  return order;
}

std::vector<std::vector<Index>> bootstrap_rows(Index n, Index m, std::uint64_t seed) {
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
    auto& r = rows[static_cast<std::size_t>(k)];
    r.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = rng.uniform_index(n);
  }
  return rows;
}

}  // namespace

Vector ridge(const LassoProblem& problem, double lambda) {
  if (lambda < 0.0) throw InvalidArgument("ridge: lambda must be >= 0");
  Matrix g = gram_matrix(problem);
  g.diagonal().array() += lambda;
  const Vector b = gram_rhs(problem);
  try {
    return linalg::solve_spd(g, b);
  } catch (const NotPositiveDefinite&) {
    if (lambda > 0.0) throw;
    return linalg::min_norm_lstsq(problem.design, problem.response);
  }
}

SelectorOutput forward_greedy(const LassoProblem& problem, Index k) {
  const Index p = problem.p();
  if (k < 0 || k > p) throw InvalidArgument("forward_greedy: k must be in [0, p]");
  std::vector<Index> chosen;
  std::vector<char> used(static_cast<std::size_t>(p), 0);
  for (Index step = 0; step < k; ++step) {
    Index best_j = -1;
    double best_rss = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < p; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      std::vector<Index> trial = chosen;
      trial.push_back(j);
      const Vector w = ols_refit(problem, IndexSet::from_unsorted(trial));
      const double rss = (problem.response - problem.design * w).squaredNorm();
      if (rss < best_rss) {
        best_rss = rss;
        best_j = j;
      }
    }
    chosen.push_back(best_j);
    used[static_cast<std::size_t>(best_j)] = 1;
  }
  return refit_output(problem, chosen);
}

SelectorOutput threshold_ls(const LassoProblem& problem, Index k) {
  if (k < 0 || k > problem.p()) throw InvalidArgument("threshold_ls: k must be in [0, p]");
  const Vector ols = linalg::min_norm_lstsq(problem.design, problem.response);
  return refit_output(problem, top_k_magnitudes(ols, k));
}

SelectorOutput adaptive_lasso(const LassoProblem& problem, double mu) {
  if (mu <= 0.0) throw InvalidArgument("adaptive_lasso: mu must be > 0");
  const Index p = problem.p();
  const Vector ols = linalg::min_norm_lstsq(problem.design, problem.response);
  std::vector<Index> kept;
  for (Index j = 0; j < p; ++j) {
    if (std::abs(ols(j)) > 1e-12) kept.push_back(j);
  }
  if (kept.empty()) throw AllWeightsZero("adaptive_lasso: OLS estimate is identically zero");

  Matrix scaled(problem.n(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    scaled.col(static_cast<Index>(c)) = problem.design.col(kept[c]) * std::abs(ols(kept[c]));
  }
  LassoProblem rescaled;
  rescaled.design = std::move(scaled);
  rescaled.response = problem.response;
  const LassoPath path = lars_lasso_path(rescaled);
  const Vector wt = path_at(path, mu);

  SelectorOutput out;
  out.weights = Vector::Zero(p);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out.weights(kept[c]) = std::abs(ols(kept[c])) * wt(static_cast<Index>(c));
  }
  out.support = support_of(out.weights, 1e-10);
  return out;
}

SelectorOutput bagged_ls_threshold_with_rows(const LassoProblem& problem,
                                             const std::vector<std::vector<Index>>& rows, Index k) {
  if (rows.empty()) throw InvalidArgument("bagged_ls_threshold: m must be >= 1");
  Vector avg = Vector::Zero(problem.p());
  for (const auto& r : rows) {
    const LassoProblem sample = subsample_rows(problem, r);
    avg += linalg::min_norm_lstsq(sample.design, sample.response);
  }
  avg /= static_cast<double>(rows.size());
  return refit_output(problem, top_k_magnitudes(avg, k));
}

SelectorOutput bagged_ls_threshold(const LassoProblem& problem, Index m, Index k, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("bagged_ls_threshold: m must be >= 1");
  return bagged_ls_threshold_with_rows(problem, bootstrap_rows(problem.n(), m, seed), k);
}

Vector bagged_lasso_with_rows(const LassoProblem& problem, const std::vector<std::vector<Index>>& rows,
                              double mu) {
  if (rows.empty()) throw InvalidArgument("bagged_lasso: m must be >= 1");
  Vector avg = Vector::Zero(problem.p());
  for (const auto& r : rows) {
    const LassoProblem sample = subsample_rows(problem, r);
    avg += path_at(lars_lasso_path(sample), mu);
  }
  return avg / static_cast<double>(rows.size());
}

Vector bagged_lasso(const LassoProblem& problem, Index m, double mu, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("bagged_lasso: m must be >= 1");
  return bagged_lasso_with_rows(problem, bootstrap_rows(problem.n(), m, seed), mu);
}

std::vector<Vector> bagged_lasso_grid(const LassoProblem& problem, Index m,
                                      const std::vector<double>& mu_grid, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("bagged_lasso: m must be >= 1");
  std::vector<Vector> avg(mu_grid.size(), Vector::Zero(problem.p()));
  const auto rows = bootstrap_rows(problem.n(), m, seed);
  for (const auto& r : rows) {
    const LassoProblem sample = subsample_rows(problem, r);
    const LassoPath path = lars_lasso_path(sample);
    for (std::size_t g = 0; g < mu_grid.size(); ++g) avg[g] += path_at(path, mu_grid[g]);
  }
  for (auto& v : avg) v /= static_cast<double>(m);
  return avg;
}

IndexSet path_select_exactly(const LassoPath& path, Index r, const std::vector<double>& mu_grid) {
  std::map<std::vector<Index>, std::pair<Index, std::size_t>> span;
  for (std::size_t g = 0; g < mu_grid.size(); ++g) {
    const IndexSet s = path_support_at(path, mu_grid[g]);
    if (s.size() != r) continue;
    auto [it, inserted] = span.try_emplace(s.indices(), std::pair<Index, std::size_t>{0, g});
    it->second.first++;
  }
  if (!span.empty()) {
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
  // The grid can step over a short size-r stretch; the path's knot sequence
  // cannot (supports change by one variable per breakpoint). Measure spans in
  // mu-length instead.
  double best_span = -1.0;
  std::vector<Index> best_set;
  for (std::size_t k = 0; k + 1 < path.knots.size(); ++k) {
    const double mid = 0.5 * (path.knots[k].mu + path.knots[k + 1].mu);
    const IndexSet s = path_support_at(path, mid);
    if (s.size() != r) continue;
    const double span_len = path.knots[k].mu - path.knots[k + 1].mu;
    if (span_len > best_span) {
      best_span = span_len;
      best_set = s.indices();
    }
  }
  if (best_span < 0.0) {
    throw NoPatternOfSizeR("path_select_exactly: no stretch of the path has support size " +
                           std::to_string(r));
  }
  return IndexSet(std::move(best_set));
}

SelectorOutput lasso_select_r(const LassoProblem& problem, Index r, Index grid_count,
                              double grid_min_ratio) {
  const LassoPath path = lars_lasso_path(problem);
  const IndexSet chosen =
      path_select_exactly(path, r, log_spaced_grid(mu_max(problem), grid_count, grid_min_ratio));
  SelectorOutput out;
  out.weights = ols_refit(problem, chosen);
  out.support = support_of(out.weights, 1e-10);
  return out;
}

SelectorOutput adaptive_lasso_select_r(const LassoProblem& problem, Index r, Index grid_count,
                                       double grid_min_ratio) {
  const Index p = problem.p();
  const Vector ols = linalg::min_norm_lstsq(problem.design, problem.response);
  std::vector<Index> kept;
  for (Index j = 0; j < p; ++j) {
    if (std::abs(ols(j)) > 1e-12) kept.push_back(j);
  }
  if (kept.empty()) throw AllWeightsZero("adaptive_lasso: OLS estimate is identically zero");
  Matrix scaled(problem.n(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    scaled.col(static_cast<Index>(c)) = problem.design.col(kept[c]) * std::abs(ols(kept[c]));
  }
  LassoProblem rescaled;
  rescaled.design = std::move(scaled);
  rescaled.response = problem.response;
  const LassoPath path = lars_lasso_path(rescaled);
  // Grid on the rescaled problem's own scale.
  const IndexSet chosen_local =
      path_select_exactly(path, r, log_spaced_grid(mu_max(rescaled), grid_count, grid_min_ratio));
  std::vector<Index> chosen;
  for (Index c : chosen_local) chosen.push_back(kept[static_cast<std::size_t>(c)]);
  SelectorOutput out;
  out.weights = ols_refit(problem, IndexSet::from_unsorted(chosen));
  out.support = support_of(out.weights, 1e-10);
  return out;
}

}  // namespace bolasso
