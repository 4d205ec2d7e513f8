#include "population.hpp"

#include <cmath>
#include <string>

#include "linalg.hpp"
#include "parallel.hpp"

namespace bolasso {

namespace {

Matrix draw_unit_diagonal_gram(Index p, Rng& rng) {
  Matrix g(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) g(i, j) = rng.gaussian();
  }
  Matrix q = g * g.transpose();
  q = ((q + Matrix(q.transpose())) * 0.5).eval();
  Vector d = q.diagonal();
  for (Index i = 0; i < p; ++i) {
    if (d(i) <= 0.0) throw SingularGram("population: nonpositive diagonal in GG'");
  }
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      q(i, j) = (i == j) ? 1.0 : q(i, j) / std::sqrt(d(i) * d(j));
    }
  }
  return q;
}

}  // namespace

PopulationModel generate_population(Index p, Index r, Rng& rng, LoadingScale scale) {
  if (p < 1 || r < 1 || r > p) throw InvalidArgument("population: need 1 <= r <= p");

  Matrix q;
  for (int attempt = 0;; ++attempt) {
    try {
      q = draw_unit_diagonal_gram(p, rng);
      linalg::cholesky_factor(q);  // SPD check
      break;
    } catch (const Error&) {
      if (attempt >= 1) throw SingularGram("population: GG' numerically singular after redraw");
    }
  }

  Vector w = Vector::Zero(p);
  Vector loading(r);
  for (Index j = 0; j < r; ++j) loading(j) = rng.gaussian();
  if (scale == LoadingScale::unit_l2) {
    const double norm = loading.norm();
    if (norm <= 0.0) throw SingularGram("population: degenerate zero loading draw");
    loading /= norm;
  } else {
    for (Index j = 0; j < r; ++j) loading(j) = loading(j) >= 0.0 ? 1.0 : -1.0;
  }
  const double magnitude = rng.uniform(1.0 / 3.0, 1.0);
  for (Index j = 0; j < r; ++j) w(j) = magnitude * loading(j);

  PopulationModel model;
  model.sigma = 0.1 * std::sqrt(w.dot(q * w));
  model.q = std::move(q);
  model.w_true = std::move(w);
  model.j_true = support_of(model.w_true, 0.0);
  model.s_true = sign_pattern_of(model.w_true, 0.0);
  return model;
}

LassoProblem sample_dataset(const PopulationModel& model, Index n, Rng& rng) {
  if (n < 1) throw InvalidArgument("sample_dataset: n must be >= 1");
  const Index p = model.p();
  const Matrix l = linalg::cholesky_factor(model.q);
  Matrix x(n, p);
  Vector y(n);
  Vector z(p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(j) = rng.gaussian();
    // x_i = L z, filled in place; L is lower triangular.
    for (Index j = p - 1; j >= 0; --j) {
      double acc = 0.0;
      for (Index k = 0; k <= j; ++k) acc += l(j, k) * z(k);
      x(i, j) = acc;
    }
    const double eps = rng.gaussian();
    y(i) = x.row(i).dot(model.w_true) + model.sigma * eps;
  }
  return make_problem(std::move(x), std::move(y));
}

double consistency_kappa(const PopulationModel& model) {
  const Index p = model.p();
  if (model.j_true.empty()) throw InvalidArgument("consistency_kappa: empty true support");
  const IndexSet jc = model.j_true.complement(p);
  if (jc.empty()) return 0.0;  // no irrelevant variables to contaminate

  Vector s_j(model.j_true.size());
  for (Index k = 0; k < model.j_true.size(); ++k) {
    s_j(k) = static_cast<double>(model.s_true[model.j_true[k]]);
  }
  const Matrix q_jj = linalg::submatrix(model.q, model.j_true, model.j_true);
  const Vector v = linalg::solve_spd(q_jj, s_j);
  const Matrix q_cj = linalg::submatrix(model.q, jc, model.j_true);
  return (q_cj * v).cwiseAbs().maxCoeff();
}

PopulationModel find_model_with_kappa(Index p, Index r, bool want_consistent, Rng& rng, int max_draws,
                                      LoadingScale scale) {
  if (max_draws < 1) throw InvalidArgument("find_model_with_kappa: max_draws must be >= 1");
  for (int draw = 0; draw < max_draws; ++draw) {
    PopulationModel model = generate_population(p, r, rng, scale);
    const double kappa = r == p ? 0.0 : consistency_kappa(model);
    if (want_consistent == (kappa <= 1.0)) return model;
  }
  throw NotFound("find_model_with_kappa: no model with kappa " +
                 std::string(want_consistent ? "<= 1" : "> 1") + " in " + std::to_string(max_draws) +
                 " draws");
}

double population_mu_max(const PopulationModel& model) {
  return (model.q * model.w_true).cwiseAbs().maxCoeff();
}

FrequencyTable sign_frequency_experiment(const PopulationModel& model, Index n,
                                         const std::vector<double>& mu_grid, Index reps,
                                         std::uint64_t seed, const SelectionMethod& method) {
  if (reps < 1) throw InvalidArgument("sign_frequency_experiment: reps must be >= 1");
  if (mu_grid.empty()) throw InvalidArgument("sign_frequency_experiment: empty mu grid");
  const Index p = model.p();
  const Index n_mu = static_cast<Index>(mu_grid.size());

  FrequencyTable table;
  table.mu_grid = mu_grid;
  table.reps = reps;
  table.counts.assign(static_cast<std::size_t>(n_mu), std::vector<Index>(static_cast<std::size_t>(p), 0));
  table.patterns.assign(static_cast<std::size_t>(n_mu), std::vector<IndexSet>(static_cast<std::size_t>(reps)));

  parallel_for(reps, [&](Index rep) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    const LassoProblem data = sample_dataset(model, n, rng);
    if (method.kind == SelectionMethod::Kind::plain_lasso) {
      const LassoPath path = lars_lasso_path(data);
      for (Index g = 0; g < n_mu; ++g) {
        table.patterns[static_cast<std::size_t>(g)][static_cast<std::size_t>(rep)] =
            path_support_at(path, mu_grid[static_cast<std::size_t>(g)]);
      }
    } else {
      BolassoConfig cfg = method.bolasso;
      cfg.mu_grid = mu_grid;
      cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(rep), 0x626f6cULL);
      const BolassoResult res = run_bolasso(data, cfg);
      for (Index g = 0; g < n_mu; ++g) {
        table.patterns[static_cast<std::size_t>(g)][static_cast<std::size_t>(rep)] =
            res.per_mu[static_cast<std::size_t>(g)].selected(cfg.soft_fraction);
      }
    }
  });

  for (Index g = 0; g < n_mu; ++g) {
    for (Index rep = 0; rep < reps; ++rep) {
      for (Index j : table.patterns[static_cast<std::size_t>(g)][static_cast<std::size_t>(rep)]) {
        table.counts[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)]++;
      }
    }
  }
  return table;
}

std::vector<double> correct_pattern_probability(const FrequencyTable& table, const PopulationModel& model) {
  std::vector<double> prob(table.mu_grid.size(), 0.0);
  for (std::size_t g = 0; g < table.mu_grid.size(); ++g) {
    Index hits = 0;
    for (const IndexSet& s : table.patterns[g]) {
      if (s == model.j_true) ++hits;
    }
    prob[g] = static_cast<double>(hits) / static_cast<double>(table.reps);
  }
  return prob;
}

double clipped_log_odds(double frequency, Index reps) {
  const double lo = 1.0 / (2.0 * static_cast<double>(reps));
  const double f = std::min(std::max(frequency, lo), 1.0 - lo);
  return std::log(f / (1.0 - f));
}

}  // namespace bolasso
