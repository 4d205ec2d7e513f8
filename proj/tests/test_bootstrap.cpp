#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "bootstrap.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "parallel.hpp"
#include "population.hpp"
#include "rng.hpp"

using namespace bolasso;

namespace {

LassoProblem toy_problem(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = rng.gaussian();
    y(i) = x(i, 0) - 0.5 * x(i, std::min<Index>(1, p - 1)) + 0.1 * rng.gaussian();
  }
  return make_problem(std::move(x), std::move(y));
}

bool same_result(const BolassoResult& a, const BolassoResult& b) {
  if (a.per_mu.size() != b.per_mu.size()) return false;
  for (std::size_t g = 0; g < a.per_mu.size(); ++g) {
    const auto& ra = a.per_mu[g];
    const auto& rb = b.per_mu[g];
    if (ra.mu != rb.mu) return false;
    if (!(ra.hard_support == rb.hard_support) || !(ra.soft_support == rb.soft_support)) return false;
    if ((ra.frequencies - rb.frequencies).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((ra.refit_hard - rb.refit_hard).cwiseAbs().maxCoeff() != 0.0) return false;
    if (ra.replicate_supports.size() != rb.replicate_supports.size()) return false;
    for (std::size_t k = 0; k < ra.replicate_supports.size(); ++k) {
      if (!(ra.replicate_supports[k] == rb.replicate_supports[k])) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("bootstrap_sample resamples rows with replacement") {
  const LassoProblem one = toy_problem(1, 2, 7);
  Rng rng(1);
  const LassoProblem same = bootstrap_sample(one, rng);
  CHECK((same.design - one.design).cwiseAbs().maxCoeff() == 0.0);
  CHECK(same.response(0) == one.response(0));

  const LassoProblem pb = toy_problem(30, 3, 8);
  Rng r1(42), r2(42);
  const LassoProblem s1 = bootstrap_sample(pb, r1);
  const LassoProblem s2 = bootstrap_sample(pb, r2);
  CHECK((s1.design - s2.design).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.response - s2.response).cwiseAbs().maxCoeff() == 0.0);

  // Every resampled row is one of the original rows, with its own response.
  for (Index i = 0; i < s1.n(); ++i) {
    bool found = false;
    for (Index k = 0; k < pb.n() && !found; ++k) {
      if ((s1.design.row(i) - pb.design.row(k)).cwiseAbs().maxCoeff() == 0.0 &&
          s1.response(i) == pb.response(k)) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("bootstrap distinct-row fraction matches the analytic expectation") {
  const Index n = 50;
  const LassoProblem pb = toy_problem(n, 2, 9);
  Rng rng(123);
  double total_fraction = 0.0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    std::set<double> seen;
    const LassoProblem s = bootstrap_sample(pb, rng);
    for (Index i = 0; i < n; ++i) seen.insert(s.response(i));  // responses are distinct in the toy data
    total_fraction += static_cast<double>(seen.size()) / static_cast<double>(n);
  }
  const double expected = 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(n), static_cast<double>(n));
  CHECK(std::abs(total_fraction / draws - expected) < 0.01);
}

TEST_CASE("soft_intersect thresholds counts") {
  const std::vector<IndexSet> supports = {IndexSet({1, 2}), IndexSet({1, 3}), IndexSet({1, 2})};
  CHECK(soft_intersect(supports, 1.0, 5) == IndexSet({1}));
  CHECK(soft_intersect(supports, 0.9, 5) == IndexSet({1}));
  CHECK(soft_intersect(supports, 0.6, 5) == IndexSet({1, 2}));
  // fraction -> 0+ gives the union
  CHECK(soft_intersect(supports, 1e-9, 5) == IndexSet({1, 2, 3}));
  CHECK_THROWS_AS(soft_intersect({}, 0.5, 5), InvalidArgument);
  CHECK_THROWS_AS(soft_intersect(supports, 1.5, 5), InvalidArgument);
}

TEST_CASE("ols_refit is zero off-support and recovers noiseless models") {
  const LassoProblem pb = toy_problem(40, 5, 10);
  CHECK(ols_refit(pb, IndexSet()).cwiseAbs().maxCoeff() == 0.0);

  // Noiseless: y = 2 x0 - x2.
  Rng rng(11);
  Matrix x(30, 5);
  for (Index i = 0; i < 30; ++i) {
    for (Index j = 0; j < 5; ++j) x(i, j) = rng.gaussian();
  }
  const Vector y = 2.0 * x.col(0) - x.col(2);
  const LassoProblem noiseless = make_problem(x, y);
  const Vector w = ols_refit(noiseless, IndexSet({0, 2}));
  CHECK(w(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(w(2) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(w(1) == 0.0);
  CHECK(w(3) == 0.0);

  // Full support on a full-rank design equals the normal-equations solution.
  const Vector full = ols_refit(pb, IndexSet::range(5));
  const Matrix gram = pb.design.transpose() * pb.design;
  const Vector ref = oracle::gauss_solve(gram, pb.design.transpose() * pb.response);
  CHECK((full - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("run_bolasso with one replicate reduces to the plain lasso on that resample") {
  const LassoProblem pb = toy_problem(60, 4, 12);
  BolassoConfig cfg;
  cfg.replicates = 1;
  cfg.seed = 99;
  cfg.mu_grid = log_spaced_grid(mu_max(pb), 16, 1e-2);
  const BolassoResult res = run_bolasso(pb, cfg);

  Rng rng(mix_seed(cfg.seed, 0, 0));  // replicate 0, attempt 0
  const LassoProblem sample = bootstrap_sample(pb, rng);
  const LassoPath path = lars_lasso_path(sample);
  for (std::size_t g = 0; g < cfg.mu_grid.size(); ++g) {
    CHECK(res.per_mu[g].hard_support == path_support_at(path, cfg.mu_grid[g]));
    CHECK(res.per_mu[g].soft_support == res.per_mu[g].hard_support);
  }
}

TEST_CASE("hard support shrinks as replicates are added") {
  const LassoProblem pb = toy_problem(80, 6, 13);
  BolassoConfig small;
  small.replicates = 8;
  small.seed = 5;
  small.mu_grid = log_spaced_grid(mu_max(pb), 24, 1e-3);
  BolassoConfig big = small;
  big.replicates = 9;
  const BolassoResult rs = run_bolasso(pb, small);
  const BolassoResult rb = run_bolasso(pb, big);
  for (std::size_t g = 0; g < rs.per_mu.size(); ++g) {
    for (Index j : rb.per_mu[g].hard_support) {
      CHECK(rs.per_mu[g].hard_support.contains(j));
    }
  }
}

TEST_CASE("run_bolasso is deterministic regardless of thread count") {
  const LassoProblem pb = toy_problem(50, 5, 14);
  BolassoConfig cfg;
  cfg.replicates = 16;
  cfg.seed = 2024;
  cfg.soft_fraction = 0.75;
  cfg.mu_grid = log_spaced_grid(mu_max(pb), 12, 1e-2);

  const BolassoResult a = run_bolasso(pb, cfg);
  setenv("BOLASSO_THREADS", "1", 1);
  const BolassoResult b = run_bolasso(pb, cfg);
  setenv("BOLASSO_THREADS", "4", 1);
  const BolassoResult c = run_bolasso(pb, cfg);
  unsetenv("BOLASSO_THREADS");
  CHECK(same_result(a, b));
  CHECK(same_result(a, c));
}

TEST_CASE("hard and soft supports relate per the threshold") {
  const LassoProblem pb = toy_problem(70, 6, 15);
  BolassoConfig cfg;
  cfg.replicates = 32;
  cfg.seed = 7;
  cfg.soft_fraction = 0.8;
  cfg.mu_grid = log_spaced_grid(mu_max(pb), 20, 1e-3);
  const BolassoResult res = run_bolasso(pb, cfg);
  for (const auto& rec : res.per_mu) {
    for (Index j : rec.hard_support) CHECK(rec.soft_support.contains(j));
    for (Index j = 0; j < pb.p(); ++j) {
      CHECK(rec.frequencies(j) >= 0.0);
      CHECK(rec.frequencies(j) <= 1.0);
      CHECK(rec.hard_support.contains(j) == (rec.frequencies(j) == 1.0));
    }
    // refits vanish off their supports
    for (Index j = 0; j < pb.p(); ++j) {
      if (!rec.hard_support.contains(j)) CHECK(rec.refit_hard(j) == 0.0);
      if (!rec.soft_support.contains(j)) CHECK(rec.refit_soft(j) == 0.0);
    }
  }
}

TEST_CASE("most_stable_pattern picks the support spanning the most grid points") {
  auto rec = [](double mu, std::vector<Index> hard) {
    BolassoMuRecord r;
    r.mu = mu;
    r.hard_support = IndexSet(std::move(hard));
    return r;
  };
  BolassoResult res;
  res.per_mu = {rec(1.0, {1, 2}), rec(0.5, {1, 2}), rec(0.25, {1, 3})};
  CHECK(most_stable_pattern(res, 2) == IndexSet({1, 2}));

  BolassoResult unique;
  unique.per_mu = {rec(1.0, {0}), rec(0.5, {0, 1, 2}), rec(0.25, {0, 1})};
  CHECK(most_stable_pattern(unique, 2) == IndexSet({0, 1}));

  CHECK_THROWS_AS(most_stable_pattern(res, 4), NoPatternOfSizeR);

  // ties resolved toward larger mu (first appearance on the decreasing grid)
  BolassoResult tied;
  tied.per_mu = {rec(1.0, {0, 1}), rec(0.5, {2, 3}), rec(0.25, {2, 3}), rec(0.1, {0, 1})};
  CHECK(most_stable_pattern(tied, 2) == IndexSet({0, 1}));
  tied.per_mu = {rec(1.0, {0, 1}), rec(0.5, {2, 3}), rec(0.25, {2, 3})};
  CHECK(most_stable_pattern(tied, 2) == IndexSet({2, 3}));
}

TEST_CASE("most_stable_pattern recovers the true support on synthetic models") {
  Rng mrng(6);
  const PopulationModel model = generate_population(64, 8, mrng, LoadingScale::unit_abs);
  int hits = 0;
  const Index runs = 16;
  std::vector<int> ok(static_cast<std::size_t>(runs), 0);
  parallel_for(runs, [&](Index run) {
    Rng rng(mix_seed(404, static_cast<std::uint64_t>(run)));
    const LassoProblem data = sample_dataset(model, 512, rng);
    BolassoConfig cfg;
    cfg.replicates = 32;
    cfg.seed = mix_seed(405, static_cast<std::uint64_t>(run));
    cfg.mu_grid = log_spaced_grid(mu_max(data), 32, 1e-3);
    const BolassoResult res = run_bolasso(data, cfg);
    try {
      ok[static_cast<std::size_t>(run)] = most_stable_pattern(res, 8) == model.j_true;
    } catch (const NoPatternOfSizeR&) {
    }
  });
  for (Index i = 0; i < runs; ++i) hits += ok[static_cast<std::size_t>(i)];
  CHECK(hits > runs / 2);
}

TEST_CASE("relevant variables are retained and irrelevant ones churn at root-n regularization") {
  Rng mrng(4);
  const PopulationModel model = find_model_with_kappa(16, 8, true, mrng, 200);
  const Index n = 1000;
  const double mu = root_n_penalty(0.15, n);
  const Index runs = 256;

  std::vector<int> retained(static_cast<std::size_t>(runs), 0);
  std::vector<int> churning(static_cast<std::size_t>(runs), 0);
  parallel_for(runs, [&](Index run) {
    Rng rng(mix_seed(31337, static_cast<std::uint64_t>(run)));
    const LassoProblem data = sample_dataset(model, n, rng);
    BolassoConfig cfg;
    cfg.replicates = 128;
    cfg.mu_grid = {mu};
    cfg.seed = mix_seed(313, static_cast<std::uint64_t>(run));
    const BolassoResult res = run_bolasso(data, cfg);
    const auto& rec = res.per_mu[0];
    bool all_relevant = true;
    for (Index j : model.j_true) {
      if (!rec.hard_support.contains(j)) all_relevant = false;
    }
    retained[static_cast<std::size_t>(run)] = all_relevant;
    for (Index j = 0; j < model.p(); ++j) {
      if (model.j_true.contains(j)) continue;
      if (rec.frequencies(j) >= 0.05 && rec.frequencies(j) <= 0.95) {
        churning[static_cast<std::size_t>(run)] = 1;
        break;
      }
    }
  });
  Index retained_runs = 0, churn_runs = 0;
  for (Index i = 0; i < runs; ++i) {
    retained_runs += retained[static_cast<std::size_t>(i)];
    churn_runs += churning[static_cast<std::size_t>(i)];
  }
  CHECK(static_cast<double>(retained_runs) / static_cast<double>(runs) >= 0.99);
  CHECK(static_cast<double>(churn_runs) / static_cast<double>(runs) >= 0.9);
}

TEST_CASE("on a consistent model the intersection recovers the true support") {
  Rng mrng(4);
  const PopulationModel model = find_model_with_kappa(16, 8, true, mrng, 200);
  REQUIRE(consistency_kappa(model) <= 1.0);
  const double mu = root_n_penalty(0.15, 1000);
  const Index runs = 64;
  std::vector<int> exact(static_cast<std::size_t>(runs), 0);
  parallel_for(runs, [&](Index run) {
    Rng rng(mix_seed(555, static_cast<std::uint64_t>(run)));
    const LassoProblem data = sample_dataset(model, 1000, rng);
    BolassoConfig cfg;
    cfg.replicates = 128;
    cfg.mu_grid = {mu};
    cfg.seed = mix_seed(556, static_cast<std::uint64_t>(run));
    const BolassoResult res = run_bolasso(data, cfg);
    exact[static_cast<std::size_t>(run)] = res.per_mu[0].hard_support == model.j_true;
  });
  Index hits = 0;
  for (Index i = 0; i < runs; ++i) hits += exact[static_cast<std::size_t>(i)];
  CHECK(static_cast<double>(hits) / static_cast<double>(runs) >= 0.9);
}

TEST_CASE("support_tol trims interpolated weights") {
  const LassoProblem pb = toy_problem(50, 4, 17);
  BolassoConfig cfg;
  cfg.replicates = 4;
  cfg.seed = 20;
  cfg.mu_grid = log_spaced_grid(mu_max(pb), 8, 1e-2);
  cfg.support_tol = 1e9;  // absurd threshold: nothing survives
  const BolassoResult res = run_bolasso(pb, cfg);
  for (const auto& rec : res.per_mu) {
    CHECK(rec.hard_support.empty());
    for (const auto& s : rec.replicate_supports) CHECK(s.empty());
  }
  cfg.support_tol = -1.0;
  CHECK_THROWS_AS(run_bolasso(pb, cfg), InvalidArgument);
}

TEST_CASE("a persistently degenerate resample aborts after the retry budget") {
  // Exactly duplicated columns make every bootstrap path degenerate.
  Rng rng(18);
  Matrix x(24, 3);
  for (Index i = 0; i < 24; ++i) {
    x(i, 0) = rng.gaussian();
    x(i, 2) = rng.gaussian();
  }
  x.col(1) = x.col(0);
  Vector y = x.col(0) + 0.5 * x.col(2);
  const LassoProblem pb = make_problem(std::move(x), std::move(y));
  BolassoConfig cfg;
  cfg.replicates = 2;
  cfg.seed = 1;
  cfg.mu_grid = {0.5, 0.25};
  CHECK_THROWS_AS(run_bolasso(pb, cfg), DegenerateDesign);
}

TEST_CASE("config validation") {
  const LassoProblem pb = toy_problem(20, 3, 16);
  BolassoConfig cfg;
  cfg.replicates = 0;
  CHECK_THROWS_AS(run_bolasso(pb, cfg), InvalidArgument);
  cfg.replicates = 2;
  cfg.soft_fraction = 0.0;
  CHECK_THROWS_AS(run_bolasso(pb, cfg), InvalidArgument);
  cfg.soft_fraction = 1.0;
  cfg.mu_grid = {0.5, 0.5};  // not strictly decreasing
  CHECK_THROWS_AS(run_bolasso(pb, cfg), InvalidArgument);
  cfg.mu_grid = {0.5, -0.1};
  CHECK_THROWS_AS(run_bolasso(pb, cfg), InvalidArgument);
}
