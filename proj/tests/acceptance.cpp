// Acceptance suite: end-to-end checks of the workbench against its
// behavioral contract, one pass/fail line per criterion. Expects the CLI
// binary path as argv[1] for the determinism checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <json.hpp>

#include "baselines.hpp"
#include "bootstrap.hpp"
#include "harness.hpp"
#include "lasso.hpp"
#include "linalg.hpp"
#include "oracles.hpp"
#include "parallel.hpp"
#include "population.hpp"
#include "rng.hpp"

using namespace bolasso;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& label, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

LassoProblem random_instance(Rng& rng, Index* n_out = nullptr, Index* p_out = nullptr) {
  const Index n = 20 + static_cast<Index>(rng.uniform_index(181));
  const Index p = 2 + static_cast<Index>(rng.uniform_index(19));
  const Index r = 1 + rng.uniform_index(p);
  const PopulationModel model = generate_population(p, r, rng);
  if (n_out) *n_out = n;
  if (p_out) *p_out = p;
  return sample_dataset(model, n, rng);
}

LassoProblem orthonormal_instance(Index n, Index p, Rng& rng, Vector* ols_out) {
  Matrix g(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) g(i, j) = rng.gaussian();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Matrix x = Eigen::MatrixXd(qr.householderQ()).leftCols(p) * std::sqrt(static_cast<double>(n));
  Vector w(p);
  for (Index j = 0; j < p; ++j) w(j) = rng.gaussian();
  Vector y = x * w;
  for (Index i = 0; i < n; ++i) y(i) += 0.2 * rng.gaussian();
  LassoProblem pb = make_problem(std::move(x), std::move(y));
  if (ols_out) *ols_out = gram_rhs(pb);
  return pb;
}

std::vector<double> grid_between(double top, double bottom, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    g.push_back(top * std::pow(bottom / top, static_cast<double>(i) / (count - 1)));
  }
  return g;
}

// ---------------------------------------------------------------------
// 1. KKT certification
// ---------------------------------------------------------------------
void criterion_1() {
  const auto start = clock_type::now();
  Rng rng(0xACCE01);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const LassoProblem pb = random_instance(rng);
    const LassoPath path = lars_lasso_path(pb);
    for (const auto& knot : path.knots) {
      worst = std::max(worst, kkt_residual(pb, knot.mu, knot.weights));
    }
    for (std::size_t k = 0; k + 1 < path.knots.size(); ++k) {
      const double mid = 0.5 * (path.knots[k].mu + path.knots[k + 1].mu);
      worst = std::max(worst, kkt_residual(pb, mid, path_at(path, mid)));
    }
    const double top = mu_max(pb);
    for (double mu : grid_between(0.9 * top, 1e-3 * top, 5)) {
      const Vector w = coordinate_descent(pb, mu, 1e-10, 500000);
      worst = std::max(worst, kkt_residual(pb, mu, w));
    }
  }
  const double elapsed = seconds_since(start);
  report(1, worst <= 1e-8 && elapsed <= 60.0, "KKT certification over 200 randomized instances",
         "max residual " + std::to_string(worst) + ", " + std::to_string(elapsed) + "s");
}

// ---------------------------------------------------------------------
// 2. Solver cross-validation
// ---------------------------------------------------------------------
void criterion_2() {
  Rng rng(0xACCE02);
  double worst_gap = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const LassoProblem pb = random_instance(rng);
    const LassoPath path = lars_lasso_path(pb);
    const double top = mu_max(pb);
    for (double mu : grid_between(0.999 * top, 1e-3 * top, 20)) {
      const Vector gap = path_at(path, mu) - coordinate_descent(pb, mu, 1e-10, 500000);
      worst_gap = std::max(worst_gap, gap.cwiseAbs().maxCoeff());
    }
  }

  double worst_ortho = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    Vector ols;
    const LassoProblem pb = orthonormal_instance(48, 6, rng, &ols);
    const LassoPath path = lars_lasso_path(pb);
    for (double mu : grid_between(1.05 * mu_max(pb), 1e-4 * mu_max(pb), 20)) {
      const Vector w = path_at(path, mu);
      for (Index j = 0; j < ols.size(); ++j) {
        worst_ortho = std::max(worst_ortho, std::abs(w(j) - oracle::soft_threshold(ols(j), mu)));
      }
    }
  }
  report(2, worst_gap <= 1e-6 && worst_ortho <= 1e-8,
         "path agrees with coordinate descent and the orthonormal closed form",
         "max gap " + std::to_string(worst_gap) + ", max closed-form gap " + std::to_string(worst_ortho));
}

// ---------------------------------------------------------------------
// 3. Regime reproduction
// ---------------------------------------------------------------------
void criterion_3() {
  Rng rng(0xACCE03);
  bool exact_zero = true;
  for (int rep = 0; rep < 20; ++rep) {
    const LassoProblem pb = random_instance(rng);
    const double top = mu_max(pb);
    const LassoPath path = lars_lasso_path(pb);
    for (double mu : {top, 1.5 * top, 100.0 * top}) {
      if (path_at(path, mu).cwiseAbs().maxCoeff() != 0.0) exact_zero = false;
      if (coordinate_descent(pb, mu, 1e-12, 50).cwiseAbs().maxCoeff() != 0.0) exact_zero = false;
    }
  }

  Rng mrng(7);
  const PopulationModel model = generate_population(16, 8, mrng);
  const Index runs = 64;
  std::vector<int> full(static_cast<std::size_t>(runs), 0);
  parallel_for(runs, [&](Index run) {
    Rng drng(mix_seed(0xACCE13, static_cast<std::uint64_t>(run)));
    const LassoProblem data = sample_dataset(model, 1000, drng);
    const LassoPath path = lars_lasso_path(data);
    full[static_cast<std::size_t>(run)] =
        path_support_at(path, mu_max(data) * 1e-6).size() == model.p();
  });
  Index full_runs = 0;
  for (Index i = 0; i < runs; ++i) full_runs += full[static_cast<std::size_t>(i)];
  const double frac = static_cast<double>(full_runs) / static_cast<double>(runs);
  report(3, exact_zero && frac >= 0.95, "zero estimate at mu_max, dense support at mu_max*1e-6",
         std::string("exact zeros ") + (exact_zero ? "yes" : "no") + ", full-support fraction " +
             std::to_string(frac));
}

// ---------------------------------------------------------------------
// 4. Root-n regularization decay: relevant variables certain, irrelevant
//    ones random
// ---------------------------------------------------------------------
void criterion_4() {
  const auto start = clock_type::now();
  Rng mrng(4);
  const PopulationModel model = find_model_with_kappa(16, 8, true, mrng, 200);
  const Index n = 1000;
  const double mu = root_n_penalty(0.25, n);
  const FrequencyTable table =
      sign_frequency_experiment(model, n, {mu}, 256, 0xACCE04, SelectionMethod::plain());

  double min_relevant = 1.0;
  bool churn = false;
  for (Index j = 0; j < model.p(); ++j) {
    const double f = table.frequency(0, j);
    if (model.j_true.contains(j)) {
      min_relevant = std::min(min_relevant, f);
    } else if (f >= 0.05 && f <= 0.95) {
      churn = true;
    }
  }
  const double elapsed = seconds_since(start);
  report(4, min_relevant >= 0.99 && churn && elapsed <= 300.0,
         "root-n decay keeps relevant variables and churns an irrelevant one",
         "min relevant freq " + std::to_string(min_relevant) + ", irrelevant churn " +
             (churn ? "yes" : "no") + ", " + std::to_string(elapsed) + "s");
}

// ---------------------------------------------------------------------
// 5. Bolasso consistency where the lasso is inconsistent
// ---------------------------------------------------------------------
void criterion_5() {
  const auto start = clock_type::now();
  Rng mrng(4);
  const PopulationModel model = find_model_with_kappa(16, 8, false, mrng, 200);
  const double kappa = consistency_kappa(model);
  const std::vector<double> grid = log_spaced_grid(population_mu_max(model), 64, 1e-3);
  const Index runs = 64;

  const FrequencyTable lasso_table =
      sign_frequency_experiment(model, 1000, grid, runs, 77, SelectionMethod::plain());
  const std::vector<double> lasso_prob = correct_pattern_probability(lasso_table, model);
  const FrequencyTable bolasso_table =
      sign_frequency_experiment(model, 1000, grid, runs, 77, SelectionMethod::bootstrap(128));
  const std::vector<double> bolasso_prob = correct_pattern_probability(bolasso_table, model);

  const double lasso_max = *std::max_element(lasso_prob.begin(), lasso_prob.end());
  const double bolasso_max = *std::max_element(bolasso_prob.begin(), bolasso_prob.end());
  const double elapsed = seconds_since(start);
  report(5, kappa > 1.0 && lasso_max < 0.05 && bolasso_max >= 0.9 && elapsed <= 900.0,
         "bootstrap intersection recovers the support the lasso cannot",
         "kappa " + std::to_string(kappa) + ", lasso max " + std::to_string(lasso_max) +
             ", bolasso max " + std::to_string(bolasso_max) + ", " + std::to_string(elapsed) + "s");
}

// ---------------------------------------------------------------------
// 6. Monotone benefit of m
// ---------------------------------------------------------------------
void criterion_6() {
  Rng mrng(4);
  const PopulationModel model = find_model_with_kappa(16, 8, false, mrng, 200);
  const std::vector<double> grid = log_spaced_grid(population_mu_max(model), 64, 1e-3);
  const Index runs = 64;

  std::vector<double> best;
  for (Index m : {2, 4, 8, 16, 32, 64, 128, 256}) {
    const FrequencyTable t =
        sign_frequency_experiment(model, 1000, grid, runs, 77, SelectionMethod::bootstrap(m));
    const std::vector<double> prob = correct_pattern_probability(t, model);
    best.push_back(*std::max_element(prob.begin(), prob.end()));
  }
  int inversions = 0;
  double worst_drop = 0.0;
  for (std::size_t i = 0; i + 1 < best.size(); ++i) {
    if (best[i + 1] < best[i] - 1e-12) {
      ++inversions;
      worst_drop = std::max(worst_drop, best[i] - best[i + 1]);
    }
  }
  std::string curve;
  for (double b : best) curve += std::to_string(b).substr(0, 5) + " ";
  report(6, inversions <= 1 && worst_drop <= 0.03,
         "best-mu correct-pattern probability is nondecreasing in m",
         "curve " + curve + "| inversions " + std::to_string(inversions) + ", worst drop " +
             std::to_string(worst_drop));
}

// ---------------------------------------------------------------------
// 7. Consistency-statistic oracle equivalence
// ---------------------------------------------------------------------
void criterion_7() {
  Rng rng(0xACCE07);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index p = 3 + static_cast<Index>(rng.uniform_index(10));
    const Index r = 1 + rng.uniform_index(p - 1);
    const PopulationModel m = generate_population(p, r, rng);
    Vector s_j(r);
    for (Index k = 0; k < r; ++k) s_j(k) = static_cast<double>(m.s_true[m.j_true[k]]);
    const Matrix q_jj = linalg::submatrix(m.q, m.j_true, m.j_true);
    const Matrix q_cj = linalg::submatrix(m.q, m.j_true.complement(p), m.j_true);
    const double expected = (q_cj * oracle::gauss_inverse(q_jj) * s_j).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::abs(consistency_kappa(m) - expected));
  }

  PopulationModel eye;
  eye.q = Matrix::Identity(5, 5);
  eye.w_true = Vector::Zero(5);
  eye.w_true(1) = 0.4;
  eye.w_true(3) = -0.2;
  eye.j_true = support_of(eye.w_true, 0.0);
  eye.s_true = sign_pattern_of(eye.w_true, 0.0);
  const double identity_kappa = consistency_kappa(eye);

  report(7, worst <= 1e-10 && identity_kappa == 0.0,
         "consistency statistic matches the explicit-inverse oracle",
         "max deviation " + std::to_string(worst) + ", identity kappa " +
             std::to_string(identity_kappa));
}

// ---------------------------------------------------------------------
// 8. Method comparison direction under the CV protocol
// ---------------------------------------------------------------------
void criterion_8() {
  const auto start = clock_type::now();
  const std::uint64_t master = 2026;
  const int n_models = 20;
  int wins = 0;
  for (int i = 0; i < n_models; ++i) {
    Rng rng(mix_seed(master, static_cast<std::uint64_t>(i)));
    const PopulationModel model = generate_population(32, 8, rng, LoadingScale::unit_abs);
    const LassoProblem data = sample_dataset(model, 64, rng);
    const std::vector<CvMethod> methods = {cv_method_from_name("lasso"), cv_method_from_name("bolasso")};
    const CvReport rep = kfold_cv(data, methods, 10, 10, mix_seed(master, 1000 + i));
    if (rep.methods[1].mean_mse_x100 <= rep.methods[0].mean_mse_x100) ++wins;
  }
  const double elapsed = seconds_since(start);
  report(8, wins >= 14, "bootstrap intersection beats the plain lasso on prediction MSE",
         std::to_string(wins) + "/20 models, " + std::to_string(elapsed) + "s");
}

// ---------------------------------------------------------------------
// 9. The cv pipeline completes on a well-formed CSV
// ---------------------------------------------------------------------
void criterion_9(const fs::path& scratch) {
  const fs::path data_dir = scratch / "c9_data";
  const fs::path cv_dir = scratch / "c9_cv";
  run_command({{"command", "synth"}, {"p", 8}, {"r", 3}, {"n", 64}, {"seed", 909},
               {"out", data_dir.string()}});
  const nlohmann::json summary = run_command({{"command", "cv"},
                                              {"data", (data_dir / "data.csv").string()},
                                              {"target", "y"},
                                              {"folds", 10},
                                              {"replications", 10},
                                              {"seed", 910},
                                              {"out", cv_dir.string()}});
  bool ok = fs::exists(cv_dir / "cv_report.csv") && fs::exists(cv_dir / "manifest.json");
  std::size_t n_methods = 0;
  if (ok) {
    const auto& per_method = summary.at("report");
    n_methods = per_method.size();
    ok = n_methods == 5;
    for (const auto& [name, stats] : per_method.items()) {
      const double mean = stats.at("mean_mse_x100").get<double>();
      const double sd = stats.at("std_mse_x100").get<double>();
      if (!std::isfinite(mean) || !std::isfinite(sd) || sd < 0.0) ok = false;
    }
  }
  report(9, ok, "10x10 cv pipeline emits a complete report and manifest on a CSV dataset",
         std::to_string(n_methods) + " methods reported");
}

// ---------------------------------------------------------------------
// 10. CLI determinism, including under parallel execution
// ---------------------------------------------------------------------
int run_cli(const std::string& cli, const std::string& args, const std::string& stdout_file,
            int threads) {
  const std::string cmd = "BOLASSO_THREADS=" + std::to_string(threads) + " \"" + cli + "\" " + args +
                          " > \"" + stdout_file + "\" 2>&1";
  return std::system(cmd.c_str());
}

bool same_file_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  const std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return ca == cb;
}

void criterion_10(const std::string& cli, const fs::path& scratch) {
  if (cli.empty()) {
    report(10, false, "CLI determinism", "no CLI path given on the command line");
    return;
  }
  const fs::path base = scratch / "c10";
  fs::create_directories(base);

  // One dataset feeds the data-driven subcommands.
  const fs::path data_dir = base / "data";
  run_cli(cli, "synth --p 6 --r 3 --n 40 --seed 5 --out \"" + (data_dir / "x").string() + "\"",
          (base / "synth_seed.log").string(), 2);
  const std::string csv = (data_dir / "x" / "data.csv").string();

  struct Cmd {
    std::string name;
    std::string args;
  };
  const std::vector<Cmd> commands = {
      {"synth", "synth --p 6 --r 3 --n 50 --seed 11"},
      {"lasso-path", "lasso-path --data \"" + csv + "\" --target y --seed 1"},
      {"bolasso", "bolasso --data \"" + csv + "\" --target y --m 8 --mu-grid 12,0.01 --seed 3"},
      {"freq", "freq --p 4 --r 2 --n 50 --reps 8 --kind any --mu-grid 10,0.01 --seed 7"},
      {"pattern-prob",
       "pattern-prob --p 4 --r 2 --n 50 --reps 4 --kind any --m-list 2,4 --mu-grid 8,0.01 --seed 9"},
      {"compare",
       "compare --p 8 --r 3 --reps 3 --m 4 --n-grid 32,64 --mu-grid 10,0.01 --seed 13"},
      {"cv", "cv --p 6 --r 2 --n 30 --methods lasso,bolasso --folds 5 --replications 2 --m 4 "
             "--grid-size 6 --seed 15"},
  };

  bool all_ok = true;
  std::string detail;
  for (const auto& cmd : commands) {
    const fs::path out1 = base / (cmd.name + "_run1");
    const fs::path out2 = base / (cmd.name + "_run2");
    const int rc1 = run_cli(cli, cmd.args + " --out \"" + out1.string() + "\"",
                            (base / (cmd.name + "_1.log")).string(), 2);
    const int rc2 = run_cli(cli, cmd.args + " --out \"" + out2.string() + "\"",
                            (base / (cmd.name + "_2.log")).string(), 1);
    if (rc1 != 0 || rc2 != 0) {
      all_ok = false;
      detail += cmd.name + ": nonzero exit; ";
      continue;
    }
    std::size_t csv_count = 0;
    for (const auto& entry : fs::directory_iterator(out1)) {
      if (entry.path().extension() != ".csv") continue;
      ++csv_count;
      if (!same_file_bytes(entry.path(), out2 / entry.path().filename())) {
        all_ok = false;
        detail += cmd.name + "/" + entry.path().filename().string() + " differs; ";
      }
    }
    if (csv_count == 0) {
      all_ok = false;
      detail += cmd.name + ": no CSV output; ";
    }
  }

  // kappa prints rather than writes; its reported value must be identical.
  {
    const fs::path model = data_dir / "x" / "model.json";
    const fs::path k1 = base / "kappa1.json", k2 = base / "kappa2.json";
    run_cli(cli, "kappa --model \"" + model.string() + "\"", k1.string(), 2);
    run_cli(cli, "kappa --model \"" + model.string() + "\"", k2.string(), 1);
    std::ifstream f1(k1), f2(k2);
    nlohmann::json j1, j2;
    f1 >> j1;
    f2 >> j2;
    if (!(j1.at("kappa") == j2.at("kappa"))) {
      all_ok = false;
      detail += "kappa value differs; ";
    }
  }

  if (detail.empty()) detail = "7 commands byte-identical across reruns and thread counts";
  report(10, all_ok, "CLI reruns with one seed are byte-identical", detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path scratch =
      fs::temp_directory_path() / ("bolasso_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9(scratch);
  criterion_10(cli, scratch);

  std::error_code ec;
  fs::remove_all(scratch, ec);

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
