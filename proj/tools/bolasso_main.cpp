// Command-line front end for the bolasso workbench. All computation lives
// behind the C API in libbolasso; this binary only parses flags, assembles a
// JSON spec, and relays the summary.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bolasso/bolasso.h"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonOpts& common, bool out_required = true) {
  cmd->add_option("--seed", common.seed, "random seed (default 0)");
  auto* out = cmd->add_option("--out", common.out, "output directory");
  if (out_required) out->required();
  cmd->add_option("--format", common.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--plot", common.plot, "also emit SVG plots");
}

int run_spec(const json& spec) {
  char* summary = nullptr;
  const bolasso_status status = bolasso_command_run_json(spec.dump().c_str(), &summary);
  if (status != BOLASSO_OK) {
    std::fprintf(stderr, "error: %s\n", bolasso_last_error());
    return bolasso_status_exit_code(status);
  }
  if (summary) std::printf("%s\n", summary);
  bolasso_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bolasso — sparse linear-regression workbench (lasso paths, bootstrap-intersection "
               "model selection, consistency diagnostics, experiment pipelines)"};
  app.require_subcommand(1);

  // synth -------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a population model and a sampled dataset");
  struct {
    std::int64_t p = 16, r = 8, n = 1000;
    std::string kind = "any";
    std::string loading_scale = "l2";
    int max_draws = 1000;
    CommonOpts common;
  } synth_opts;
  synth->add_option("--p", synth_opts.p, "number of variables")->required();
  synth->add_option("--r", synth_opts.r, "number of relevant variables")->required();
  synth->add_option("--n", synth_opts.n, "number of observations")->required();
  synth->add_option("--kind", synth_opts.kind, "any|consistent|inconsistent")
      ->check(CLI::IsMember({"any", "consistent", "inconsistent"}));
  synth->add_option("--loading-scale", synth_opts.loading_scale, "l2|abs loading normalization")
      ->check(CLI::IsMember({"l2", "abs"}));
  synth->add_option("--max-draws", synth_opts.max_draws, "draw budget for --kind");
  add_common(synth, synth_opts.common);

  // kappa -------------------------------------------------------------
  auto* kappa = app.add_subcommand("kappa", "print the consistency statistic of a model file");
  std::string kappa_model;
  kappa->add_option("--model", kappa_model, "model JSON file")->required();

  // lasso-path ----------------------------------------------------------
  auto* lpath = app.add_subcommand("lasso-path", "emit the lasso path breakpoints of a CSV dataset");
  struct {
    std::string data, target, delimiter = ",";
    bool raw = false;
    std::int64_t max_knots = 0;
    CommonOpts common;
  } lp_opts;
  lpath->add_option("--data", lp_opts.data, "input CSV file")->required();
  lpath->add_option("--target", lp_opts.target, "target column name or index")->required();
  lpath->add_option("--delimiter", lp_opts.delimiter, "field delimiter (default ,)");
  lpath->add_flag("--raw", lp_opts.raw, "skip standardization");
  lpath->add_option("--max-knots", lp_opts.max_knots, "breakpoint cap (0 = automatic)");
  add_common(lpath, lp_opts.common);

  // bolasso -------------------------------------------------------------
  auto* bol = app.add_subcommand("bolasso", "bootstrap-intersection selection on a CSV dataset");
  struct {
    std::string data, target, delimiter = ",";
    bool raw = false;
    std::int64_t m = 128;
    double soft = 0.9;
    std::string mu_grid = "64,0.001";
    CommonOpts common;
  } bol_opts;
  bol->add_option("--data", bol_opts.data, "input CSV file")->required();
  bol->add_option("--target", bol_opts.target, "target column name or index")->required();
  bol->add_option("--delimiter", bol_opts.delimiter, "field delimiter (default ,)");
  bol->add_flag("--raw", bol_opts.raw, "skip standardization");
  bol->add_option("--m", bol_opts.m, "bootstrap replicates (default 128)");
  bol->add_option("--soft", bol_opts.soft, "soft-intersection fraction (default 0.9)");
  bol->add_option("--mu-grid", bol_opts.mu_grid, "grid as count,min-ratio (default 64,0.001)");
  add_common(bol, bol_opts.common);

  // freq ----------------------------------------------------------------
  auto* freq = app.add_subcommand("freq", "per-variable selection frequencies on synthetic data");
  struct {
    std::int64_t p = 16, r = 8, n = 1000, reps = 256, m = 128;
    std::string kind = "consistent", method = "lasso";
    double soft = 1.0;
    std::string mu_grid = "64,0.001";
    CommonOpts common;
  } freq_opts;
  freq->add_option("--p", freq_opts.p, "number of variables");
  freq->add_option("--r", freq_opts.r, "number of relevant variables");
  freq->add_option("--n", freq_opts.n, "observations per replication");
  freq->add_option("--reps", freq_opts.reps, "number of replications (default 256)");
  freq->add_option("--kind", freq_opts.kind, "consistent|inconsistent|any model")
      ->check(CLI::IsMember({"any", "consistent", "inconsistent"}));
  freq->add_option("--method", freq_opts.method, "lasso|bolasso")
      ->check(CLI::IsMember({"lasso", "bolasso"}));
  freq->add_option("--m", freq_opts.m, "bootstrap replicates for --method bolasso");
  freq->add_option("--soft", freq_opts.soft, "soft fraction for --method bolasso (default 1.0)");
  freq->add_option("--mu-grid", freq_opts.mu_grid, "grid as count,min-ratio");
  add_common(freq, freq_opts.common);

  // pattern-prob ----------------------------------------------------------
  auto* pat = app.add_subcommand("pattern-prob",
                                 "correct-pattern probability of lasso vs bolasso across m");
  struct {
    std::int64_t p = 16, r = 8, n = 1000, reps = 256;
    std::string kind = "inconsistent";
    std::vector<std::int64_t> m_list = {2, 4, 8, 16, 32, 64, 128, 256};
    std::string mu_grid = "64,0.001";
    CommonOpts common;
  } pat_opts;
  pat->add_option("--p", pat_opts.p, "number of variables");
  pat->add_option("--r", pat_opts.r, "number of relevant variables");
  pat->add_option("--n", pat_opts.n, "observations per replication");
  pat->add_option("--reps", pat_opts.reps, "number of replications (default 256)");
  pat->add_option("--kind", pat_opts.kind, "consistent|inconsistent|any model")
      ->check(CLI::IsMember({"any", "consistent", "inconsistent"}));
  pat->add_option("--m-list", pat_opts.m_list, "bootstrap replicate counts")->delimiter(',');
  pat->add_option("--mu-grid", pat_opts.mu_grid, "grid as count,min-ratio");
  add_common(pat, pat_opts.common);

  // compare ----------------------------------------------------------------
  auto* cmp = app.add_subcommand("compare", "variable-selection error of several methods vs n");
  struct {
    std::int64_t p = 64, r = 8, reps = 32, m = 128;
    std::vector<std::int64_t> n_grid = {64, 128, 256, 512};
    std::vector<std::string> methods = {"lasso", "bolasso", "greedy", "threshold-ls", "adaptive-lasso"};
    std::string mu_grid = "64,0.001";
    CommonOpts common;
  } cmp_opts;
  cmp->add_option("--p", cmp_opts.p, "number of variables (default 64)");
  cmp->add_option("--r", cmp_opts.r, "number of relevant variables (default 8)");
  cmp->add_option("--reps", cmp_opts.reps, "replications per n (default 32)");
  cmp->add_option("--m", cmp_opts.m, "bootstrap replicates (default 128)");
  cmp->add_option("--n-grid", cmp_opts.n_grid, "sample sizes")->delimiter(',');
  cmp->add_option("--methods", cmp_opts.methods,
                  "subset of lasso,bolasso,greedy,threshold-ls,adaptive-lasso,bagged-ls")
      ->delimiter(',');
  cmp->add_option("--mu-grid", cmp_opts.mu_grid, "grid as count,min-ratio");
  add_common(cmp, cmp_opts.common);

  // cv ----------------------------------------------------------------
  auto* cv = app.add_subcommand("cv", "replicated k-fold cross-validation benchmark");
  struct {
    std::string data, target, delimiter = ",";
    std::int64_t p = 32, r = 8, n = 64;
    std::string kind = "any";
    std::vector<std::string> methods = {"ridge", "lasso", "bolasso", "bagging", "bolasso-s"};
    std::int64_t folds = 10, replications = 10, m = 128, grid_size = 32;
    double soft = 0.9;
    CommonOpts common;
  } cv_opts;
  cv->add_option("--data", cv_opts.data, "input CSV file (omit for synthetic data)");
  cv->add_option("--target", cv_opts.target, "target column name or index");
  cv->add_option("--delimiter", cv_opts.delimiter, "field delimiter (default ,)");
  cv->add_option("--p", cv_opts.p, "synthetic: number of variables (default 32)");
  cv->add_option("--r", cv_opts.r, "synthetic: relevant variables (default 8)");
  cv->add_option("--n", cv_opts.n, "synthetic: observations (default 64)");
  cv->add_option("--kind", cv_opts.kind, "synthetic: any|consistent|inconsistent")
      ->check(CLI::IsMember({"any", "consistent", "inconsistent"}));
  cv->add_option("--methods", cv_opts.methods, "subset of ridge,lasso,bolasso,bagging,bolasso-s")
      ->delimiter(',');
  cv->add_option("--folds", cv_opts.folds, "folds (default 10)");
  cv->add_option("--reps,--replications", cv_opts.replications, "replications (default 10)");
  cv->add_option("--m", cv_opts.m, "bootstrap replicates (default 128)");
  cv->add_option("--soft", cv_opts.soft, "bolasso-s fraction (default 0.9)");
  cv->add_option("--grid-size", cv_opts.grid_size, "parameter grid size (default 32)");
  add_common(cv, cv_opts.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto parse_grid = [](const std::string& text, json& spec) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
      std::fprintf(stderr, "error: --mu-grid expects count,min-ratio\n");
      std::exit(2);
    }
    try {
      spec["mu_count"] = std::stoll(text.substr(0, comma));
      spec["mu_min_ratio"] = std::stod(text.substr(comma + 1));
    } catch (...) {
      std::fprintf(stderr, "error: --mu-grid expects count,min-ratio\n");
      std::exit(2);
    }
  };

  auto fill_common = [](json& spec, const CommonOpts& common) {
    spec["seed"] = common.seed;
    if (!common.out.empty()) spec["out"] = common.out;
    spec["format"] = common.format;
    if (common.plot) spec["plot"] = true;
  };

  if (*synth) {
    json spec{{"command", "synth"}, {"p", synth_opts.p}, {"r", synth_opts.r},
              {"n", synth_opts.n},  {"kind", synth_opts.kind},
              {"loading_scale", synth_opts.loading_scale}, {"max_draws", synth_opts.max_draws}};
    fill_common(spec, synth_opts.common);
    return run_spec(spec);
  }
  if (*kappa) {
    json spec{{"command", "kappa"}, {"model", kappa_model}};
    return run_spec(spec);
  }
  if (*lpath) {
    json spec{{"command", "lasso-path"}, {"data", lp_opts.data},   {"target", lp_opts.target},
              {"delimiter", lp_opts.delimiter}, {"standardize", !lp_opts.raw}};
    if (lp_opts.max_knots > 0) spec["max_knots"] = lp_opts.max_knots;
    fill_common(spec, lp_opts.common);
    return run_spec(spec);
  }
  if (*bol) {
    json spec{{"command", "bolasso"}, {"data", bol_opts.data},   {"target", bol_opts.target},
              {"delimiter", bol_opts.delimiter}, {"standardize", !bol_opts.raw},
              {"m", bol_opts.m},      {"soft", bol_opts.soft}};
    parse_grid(bol_opts.mu_grid, spec);
    fill_common(spec, bol_opts.common);
    return run_spec(spec);
  }
  if (*freq) {
    json spec{{"command", "freq"}, {"p", freq_opts.p}, {"r", freq_opts.r}, {"n", freq_opts.n},
              {"reps", freq_opts.reps}, {"kind", freq_opts.kind}, {"method", freq_opts.method},
              {"m", freq_opts.m}, {"soft", freq_opts.soft}};
    parse_grid(freq_opts.mu_grid, spec);
    fill_common(spec, freq_opts.common);
    return run_spec(spec);
  }
  if (*pat) {
    json spec{{"command", "pattern-prob"}, {"p", pat_opts.p}, {"r", pat_opts.r}, {"n", pat_opts.n},
              {"reps", pat_opts.reps}, {"kind", pat_opts.kind}, {"m_list", pat_opts.m_list}};
    parse_grid(pat_opts.mu_grid, spec);
    fill_common(spec, pat_opts.common);
    return run_spec(spec);
  }
  if (*cmp) {
    json spec{{"command", "compare"}, {"p", cmp_opts.p}, {"r", cmp_opts.r}, {"reps", cmp_opts.reps},
              {"m", cmp_opts.m}, {"n_grid", cmp_opts.n_grid}, {"methods", cmp_opts.methods}};
    parse_grid(cmp_opts.mu_grid, spec);
    fill_common(spec, cmp_opts.common);
    return run_spec(spec);
  }
  if (*cv) {
    json spec{{"command", "cv"},
              {"methods", cv_opts.methods},
              {"folds", cv_opts.folds},
              {"replications", cv_opts.replications},
              {"m", cv_opts.m},
              {"soft", cv_opts.soft},
              {"grid_size", cv_opts.grid_size}};
    if (!cv_opts.data.empty()) {
      if (cv_opts.target.empty()) {
        std::fprintf(stderr, "error: --target is required with --data\n");
        return 2;
      }
      spec["data"] = cv_opts.data;
      spec["target"] = cv_opts.target;
      spec["delimiter"] = cv_opts.delimiter;
    } else {
      spec["p"] = cv_opts.p;
      spec["r"] = cv_opts.r;
      spec["n"] = cv_opts.n;
      spec["kind"] = cv_opts.kind;
    }
    fill_common(spec, cv_opts.common);
    return run_spec(spec);
  }
  return 2;
}
