#include "bolasso/bolasso.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "bootstrap.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "lasso.hpp"
#include "population.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace {

thread_local std::string g_last_error;

bolasso_status status_of(const bolasso::Error& e) {
  using bolasso::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::invalid_argument: return BOLASSO_ERR_INVALID_ARGUMENT;
    case ErrorKind::not_positive_definite: return BOLASSO_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorKind::not_converged: return BOLASSO_ERR_NOT_CONVERGED;
    case ErrorKind::degenerate_design: return BOLASSO_ERR_DEGENERATE_DESIGN;
    case ErrorKind::singular_gram: return BOLASSO_ERR_SINGULAR_GRAM;
    case ErrorKind::not_found: return BOLASSO_ERR_NOT_FOUND;
    case ErrorKind::no_pattern_of_size: return BOLASSO_ERR_NO_PATTERN;
    case ErrorKind::index_out_of_range: return BOLASSO_ERR_INDEX_OUT_OF_RANGE;
    case ErrorKind::parse: return BOLASSO_ERR_PARSE;
    case ErrorKind::missing_target: return BOLASSO_ERR_MISSING_TARGET;
    case ErrorKind::all_rows_dropped: return BOLASSO_ERR_ALL_ROWS_DROPPED;
    case ErrorKind::all_weights_zero: return BOLASSO_ERR_ALL_WEIGHTS_ZERO;
    case ErrorKind::io: return BOLASSO_ERR_IO;
  }
  return BOLASSO_ERR_INTERNAL;
}

template <typename Fn>
bolasso_status guarded(Fn&& fn) {
  try {
    fn();
    return BOLASSO_OK;
  } catch (const bolasso::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BOLASSO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BOLASSO_ERR_INTERNAL;
  }
}

bolasso_status fail_arg(const char* message) {
  g_last_error = message;
  return BOLASSO_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct bolasso_problem {
  bolasso::LassoProblem value;
};

struct bolasso_path {
  bolasso::LassoPath value;
  bolasso::Index p;
};

struct bolasso_run {
  bolasso::BolassoResult value;
  bolasso::Index p;
};

struct bolasso_model {
  bolasso::PopulationModel value;
};

extern "C" {

const char* bolasso_version(void) { return bolasso::kVersion; }

const char* bolasso_last_error(void) { return g_last_error.c_str(); }

int bolasso_status_exit_code(bolasso_status status) {
  switch (status) {
    case BOLASSO_OK:
      return 0;
    case BOLASSO_ERR_INVALID_ARGUMENT:
      return 2;
    case BOLASSO_ERR_PARSE:
    case BOLASSO_ERR_MISSING_TARGET:
    case BOLASSO_ERR_ALL_ROWS_DROPPED:
    case BOLASSO_ERR_IO:
      return 3;
    default:
      return 4;
  }
}

void bolasso_string_free(char* s) { std::free(s); }

/* ---------------- problems ---------------- */

bolasso_status bolasso_problem_create(int64_t n, int64_t p, const double* design_rowmajor,
                                      const double* response, bolasso_problem** out) {
  if (!design_rowmajor || !response || !out) return fail_arg("problem_create: null pointer");
  if (n < 1 || p < 1) return fail_arg("problem_create: need n >= 1 and p >= 1");
  return guarded([&]() {
    bolasso::Matrix x(n, p);
    std::memcpy(x.data(), design_rowmajor, sizeof(double) * static_cast<std::size_t>(n * p));
    bolasso::Vector y(n);
    std::memcpy(y.data(), response, sizeof(double) * static_cast<std::size_t>(n));
    *out = new bolasso_problem{bolasso::make_problem(std::move(x), std::move(y))};
  });
}

bolasso_status bolasso_problem_from_csv(const char* path, const char* target, char delimiter,
                                        bolasso_problem** out, int64_t* dropped_rows) {
  if (!path || !target || !out) return fail_arg("problem_from_csv: null pointer");
  return guarded([&]() {
    bolasso::CsvData data = bolasso::load_csv(path, target, delimiter);
    if (dropped_rows) *dropped_rows = data.dropped_rows;
    *out = new bolasso_problem{std::move(data.problem)};
  });
}

void bolasso_problem_free(bolasso_problem* problem) { delete problem; }

int64_t bolasso_problem_rows(const bolasso_problem* problem) { return problem ? problem->value.n() : 0; }

int64_t bolasso_problem_cols(const bolasso_problem* problem) { return problem ? problem->value.p() : 0; }

bolasso_status bolasso_problem_design(const bolasso_problem* problem, double* out_rowmajor) {
  if (!problem || !out_rowmajor) return fail_arg("problem_design: null pointer");
  std::memcpy(out_rowmajor, problem->value.design.data(),
              sizeof(double) * static_cast<std::size_t>(problem->value.n() * problem->value.p()));
  return BOLASSO_OK;
}

bolasso_status bolasso_problem_response(const bolasso_problem* problem, double* out) {
  if (!problem || !out) return fail_arg("problem_response: null pointer");
  std::memcpy(out, problem->value.response.data(),
              sizeof(double) * static_cast<std::size_t>(problem->value.n()));
  return BOLASSO_OK;
}

bolasso_status bolasso_problem_mu_max(const bolasso_problem* problem, double* out) {
  if (!problem || !out) return fail_arg("problem_mu_max: null pointer");
  return guarded([&]() { *out = bolasso::mu_max(problem->value); });
}

bolasso_status bolasso_problem_standardize(const bolasso_problem* problem, bolasso_problem** out) {
  if (!problem || !out) return fail_arg("problem_standardize: null pointer");
  return guarded([&]() {
    bolasso::Standardized st = bolasso::standardize(problem->value);
    *out = new bolasso_problem{std::move(st.problem)};
  });
}

/* ---------------- lasso ---------------- */

bolasso_status bolasso_path_compute(const bolasso_problem* problem, int64_t max_knots,
                                    bolasso_path** out) {
  if (!problem || !out) return fail_arg("path_compute: null pointer");
  return guarded([&]() {
    bolasso::LassoPath path = max_knots > 0 ? bolasso::lars_lasso_path(problem->value, max_knots)
                                            : bolasso::lars_lasso_path(problem->value);
    *out = new bolasso_path{std::move(path), problem->value.p()};
  });
}

void bolasso_path_free(bolasso_path* path) { delete path; }

int64_t bolasso_path_knot_count(const bolasso_path* path) {
  return path ? static_cast<int64_t>(path->value.knots.size()) : 0;
}

bolasso_status bolasso_path_knot_mu(const bolasso_path* path, int64_t knot, double* out) {
  if (!path || !out) return fail_arg("path_knot_mu: null pointer");
  if (knot < 0 || knot >= static_cast<int64_t>(path->value.knots.size())) {
    return fail_arg("path_knot_mu: knot index out of range");
  }
  *out = path->value.knots[static_cast<std::size_t>(knot)].mu;
  return BOLASSO_OK;
}

bolasso_status bolasso_path_knot_weights(const bolasso_path* path, int64_t knot, double* out) {
  if (!path || !out) return fail_arg("path_knot_weights: null pointer");
  if (knot < 0 || knot >= static_cast<int64_t>(path->value.knots.size())) {
    return fail_arg("path_knot_weights: knot index out of range");
  }
  const bolasso::Vector& w = path->value.knots[static_cast<std::size_t>(knot)].weights;
  std::memcpy(out, w.data(), sizeof(double) * static_cast<std::size_t>(w.size()));
  return BOLASSO_OK;
}

bolasso_status bolasso_path_eval(const bolasso_path* path, double mu, double* out) {
  if (!path || !out) return fail_arg("path_eval: null pointer");
  return guarded([&]() {
    const bolasso::Vector w = bolasso::path_at(path->value, mu);
    std::memcpy(out, w.data(), sizeof(double) * static_cast<std::size_t>(w.size()));
  });
}

bolasso_status bolasso_coordinate_descent(const bolasso_problem* problem, double mu, double tol,
                                          int64_t max_iter, double* weights_out) {
  if (!problem || !weights_out) return fail_arg("coordinate_descent: null pointer");
  return guarded([&]() {
    const bolasso::Vector w = bolasso::coordinate_descent(problem->value, mu, tol, max_iter);
    std::memcpy(weights_out, w.data(), sizeof(double) * static_cast<std::size_t>(w.size()));
  });
}

bolasso_status bolasso_kkt_residual(const bolasso_problem* problem, double mu, const double* weights,
                                    double* out) {
  if (!problem || !weights || !out) return fail_arg("kkt_residual: null pointer");
  return guarded([&]() {
    const bolasso::Vector w =
        Eigen::Map<const bolasso::Vector>(weights, problem->value.p());
    *out = bolasso::kkt_residual(problem->value, mu, w);
  });
}

/* ---------------- bootstrap selection ---------------- */

void bolasso_options_init(bolasso_options* options) {
  if (!options) return;
  options->replicates = 128;
  options->soft_fraction = 1.0;
  options->seed = 0;
  options->grid_size = 64;
  options->grid_min_ratio = 1e-3;
  options->mu_grid = nullptr;
  options->mu_grid_len = 0;
}

bolasso_status bolasso_run_compute(const bolasso_problem* problem, const bolasso_options* options,
                                   bolasso_run** out) {
  if (!problem || !options || !out) return fail_arg("run_compute: null pointer");
  return guarded([&]() {
    bolasso::BolassoConfig cfg;
    cfg.replicates = options->replicates > 0 ? options->replicates : 128;
    cfg.soft_fraction = options->soft_fraction > 0.0 ? options->soft_fraction : 1.0;
    cfg.seed = options->seed;
    if (options->mu_grid && options->mu_grid_len > 0) {
      cfg.mu_grid.assign(options->mu_grid, options->mu_grid + options->mu_grid_len);
    } else {
      cfg.mu_grid = bolasso::log_spaced_grid(bolasso::mu_max(problem->value),
                                             options->grid_size > 0 ? options->grid_size : 64,
                                             options->grid_min_ratio > 0.0 ? options->grid_min_ratio : 1e-3);
    }
    *out = new bolasso_run{bolasso::run_bolasso(problem->value, cfg), problem->value.p()};
  });
}

void bolasso_run_free(bolasso_run* run) { delete run; }

int64_t bolasso_run_grid_size(const bolasso_run* run) {
  return run ? static_cast<int64_t>(run->value.per_mu.size()) : 0;
}

bolasso_status bolasso_run_mu(const bolasso_run* run, int64_t grid_index, double* out) {
  if (!run || !out) return fail_arg("run_mu: null pointer");
  if (grid_index < 0 || grid_index >= static_cast<int64_t>(run->value.per_mu.size())) {
    return fail_arg("run_mu: grid index out of range");
  }
  *out = run->value.per_mu[static_cast<std::size_t>(grid_index)].mu;
  return BOLASSO_OK;
}

bolasso_status bolasso_run_frequency(const bolasso_run* run, int64_t grid_index, int64_t variable,
                                     double* out) {
  if (!run || !out) return fail_arg("run_frequency: null pointer");
  if (grid_index < 0 || grid_index >= static_cast<int64_t>(run->value.per_mu.size())) {
    return fail_arg("run_frequency: grid index out of range");
  }
  if (variable < 0 || variable >= run->p) return fail_arg("run_frequency: variable out of range");
  *out = run->value.per_mu[static_cast<std::size_t>(grid_index)].frequencies(variable);
  return BOLASSO_OK;
}

bolasso_status bolasso_run_support(const bolasso_run* run, int64_t grid_index, int soft,
                                   int64_t* indices, int64_t* count) {
  if (!run || !count) return fail_arg("run_support: null pointer");
  if (grid_index < 0 || grid_index >= static_cast<int64_t>(run->value.per_mu.size())) {
    return fail_arg("run_support: grid index out of range");
  }
  const auto& rec = run->value.per_mu[static_cast<std::size_t>(grid_index)];
  const bolasso::IndexSet& s = soft ? rec.soft_support : rec.hard_support;
  if (indices) {
    if (*count < s.size()) return fail_arg("run_support: buffer too small");
    for (bolasso::Index i = 0; i < s.size(); ++i) indices[i] = s[i];
  }
  *count = s.size();
  return BOLASSO_OK;
}

bolasso_status bolasso_run_refit(const bolasso_run* run, int64_t grid_index, int soft, double* out) {
  if (!run || !out) return fail_arg("run_refit: null pointer");
  if (grid_index < 0 || grid_index >= static_cast<int64_t>(run->value.per_mu.size())) {
    return fail_arg("run_refit: grid index out of range");
  }
  const auto& rec = run->value.per_mu[static_cast<std::size_t>(grid_index)];
  const bolasso::Vector& w = soft ? rec.refit_soft : rec.refit_hard;
  std::memcpy(out, w.data(), sizeof(double) * static_cast<std::size_t>(w.size()));
  return BOLASSO_OK;
}

/* ---------------- population models ---------------- */

bolasso_status bolasso_model_generate(int64_t p, int64_t r, uint64_t seed, int loading_scale,
                                      bolasso_model** out) {
  if (!out) return fail_arg("model_generate: null pointer");
  return guarded([&]() {
    bolasso::Rng rng(seed);
    *out = new bolasso_model{bolasso::generate_population(
        p, r, rng, loading_scale ? bolasso::LoadingScale::unit_abs : bolasso::LoadingScale::unit_l2)};
  });
}

bolasso_status bolasso_model_find_kappa(int64_t p, int64_t r, int want_consistent, uint64_t seed,
                                        int max_draws, bolasso_model** out) {
  if (!out) return fail_arg("model_find_kappa: null pointer");
  return guarded([&]() {
    bolasso::Rng rng(seed);
    *out = new bolasso_model{
        bolasso::find_model_with_kappa(p, r, want_consistent != 0, rng, max_draws)};
  });
}

bolasso_status bolasso_model_load(const char* path, bolasso_model** out) {
  if (!path || !out) return fail_arg("model_load: null pointer");
  return guarded([&]() { *out = new bolasso_model{bolasso::load_model(path)}; });
}

bolasso_status bolasso_model_save(const bolasso_model* model, const char* path) {
  if (!model || !path) return fail_arg("model_save: null pointer");
  return guarded([&]() { bolasso::save_model(model->value, path); });
}

void bolasso_model_free(bolasso_model* model) { delete model; }

int64_t bolasso_model_dim(const bolasso_model* model) { return model ? model->value.p() : 0; }

int64_t bolasso_model_sparsity(const bolasso_model* model) {
  return model ? model->value.j_true.size() : 0;
}

bolasso_status bolasso_model_sigma(const bolasso_model* model, double* out) {
  if (!model || !out) return fail_arg("model_sigma: null pointer");
  *out = model->value.sigma;
  return BOLASSO_OK;
}

bolasso_status bolasso_model_weights(const bolasso_model* model, double* out) {
  if (!model || !out) return fail_arg("model_weights: null pointer");
  std::memcpy(out, model->value.w_true.data(),
              sizeof(double) * static_cast<std::size_t>(model->value.p()));
  return BOLASSO_OK;
}

bolasso_status bolasso_model_kappa(const bolasso_model* model, double* out) {
  if (!model || !out) return fail_arg("model_kappa: null pointer");
  return guarded([&]() {
    *out = model->value.j_true.size() == model->value.p() ? 0.0
                                                          : bolasso::consistency_kappa(model->value);
  });
}

bolasso_status bolasso_model_sample(const bolasso_model* model, int64_t n, uint64_t seed,
                                    bolasso_problem** out) {
  if (!model || !out) return fail_arg("model_sample: null pointer");
  return guarded([&]() {
    bolasso::Rng rng(seed);
    *out = new bolasso_problem{bolasso::sample_dataset(model->value, n, rng)};
  });
}

/* ---------------- experiment runner ---------------- */

bolasso_status bolasso_command_run_json(const char* spec_json, char** summary_json) {
  if (!spec_json || !summary_json) return fail_arg("command_run_json: null pointer");
  return guarded([&]() {
    nlohmann::json spec;
    try {
      spec = nlohmann::json::parse(spec_json);
    } catch (const std::exception& e) {
      throw bolasso::InvalidArgument(std::string("spec is not valid JSON: ") + e.what());
    }
    const nlohmann::json summary = bolasso::run_command(spec);
    const std::string text = summary.dump(2);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *summary_json = buf;
  });
}

} /* extern "C" */
