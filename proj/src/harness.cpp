#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "csv.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "svg.hpp"

namespace bolasso {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset ingestion
// ---------------------------------------------------------------------------

CsvData load_csv(const std::string& path, const std::string& target, char delimiter) {
  const csv::RawTable raw = csv::read_file(path, delimiter);
  const std::size_t ncols = raw.header.size();
  if (ncols < 2) throw ParseError("load_csv: need a target and at least one feature column");

  std::size_t target_col = ncols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (raw.header[c] == target) {
      target_col = c;
      break;
    }
  }
  if (target_col == ncols) {
    // Fall back to a zero-based column index.
    try {
      const long idx = std::stol(target);
      if (idx >= 0 && static_cast<std::size_t>(idx) < ncols) target_col = static_cast<std::size_t>(idx);
    } catch (...) {
    }
  }
  if (target_col == ncols) {
    throw MissingTarget("load_csv: no column named '" + target + "' in " + path);
  }

  // First pass: find non-numeric (categorical) columns, ignoring missing
  // cells, so the error can name every offender at once.
  std::vector<char> categorical(ncols, 0);
  for (const auto& row : raw.rows) {
    for (std::size_t c = 0; c < ncols; ++c) {
      double v;
      if (!csv::is_missing(row[c]) && !csv::parse_double(row[c], v)) categorical[c] = 1;
    }
  }
  if (std::any_of(categorical.begin(), categorical.end(), [](char f) { return f != 0; })) {
    std::string names;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (categorical[c]) {
        if (!names.empty()) names += ", ";
        names += raw.header[c];
      }
    }
    throw ParseError("load_csv: non-numeric columns: " + names);
  }

  std::vector<std::vector<double>> kept;
  Index dropped = 0;
  for (const auto& row : raw.rows) {
    bool missing = false;
    std::vector<double> vals(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      if (csv::is_missing(row[c])) {
        missing = true;
        break;
      }
      csv::parse_double(row[c], vals[c]);
    }
    if (missing) {
      ++dropped;
    } else {
      kept.push_back(std::move(vals));
    }
  }
  if (kept.empty()) {
    throw AllRowsDropped("load_csv: every row of " + path + " has missing values");
  }

  const Index n = static_cast<Index>(kept.size());
  const Index p = static_cast<Index>(ncols - 1);
  Matrix design(n, p);
  Vector response(n);
  CsvData out;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c != target_col) out.feature_names.push_back(raw.header[c]);
  }
  out.target_name = raw.header[target_col];
  for (Index i = 0; i < n; ++i) {
    Index jc = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == target_col) {
        response(i) = kept[static_cast<std::size_t>(i)][c];
      } else {
        design(i, jc++) = kept[static_cast<std::size_t>(i)][c];
      }
    }
  }
  out.problem = make_problem(std::move(design), std::move(response));
  out.dropped_rows = dropped;
  return out;
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

Standardized standardize(const LassoProblem& raw) {
  const Index n = raw.n();
  if (n < 2) throw InvalidArgument("standardize: need at least 2 rows");
  const Index p = raw.p();

  StandardizeInfo info;
  std::vector<double> means, scales;
  for (Index j = 0; j < p; ++j) {
    const double mean = raw.design.col(j).mean();
    const double var =
        std::max(raw.design.col(j).squaredNorm() / static_cast<double>(n) - mean * mean, 0.0);
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      info.dropped_cols.push_back(j);
    } else {
      info.kept_cols.push_back(j);
      means.push_back(mean);
      scales.push_back(sd);
    }
  }
  if (info.kept_cols.empty()) throw InvalidArgument("standardize: every column is constant");

  const Index pk = static_cast<Index>(info.kept_cols.size());
  info.col_mean = Eigen::Map<Vector>(means.data(), pk);
  info.col_scale = Eigen::Map<Vector>(scales.data(), pk);
  info.response_mean = raw.response.mean();

  Matrix design(n, pk);
  for (Index k = 0; k < pk; ++k) {
    design.col(k) = (raw.design.col(info.kept_cols[static_cast<std::size_t>(k)]).array() - info.col_mean(k)) /
                    info.col_scale(k);
  }
  Vector response = raw.response.array() - info.response_mean;

  Standardized out;
  out.problem = make_problem(std::move(design), std::move(response), true, true);
  out.info = std::move(info);
  return out;
}

Vector predict(const StandardizeInfo& info, const Vector& w, const Matrix& raw_design) {
  if (w.size() != static_cast<Index>(info.kept_cols.size())) {
    throw InvalidArgument("predict: weight size does not match kept columns");
  }
  Vector out = Vector::Constant(raw_design.rows(), info.response_mean);
  for (Index k = 0; k < w.size(); ++k) {
    if (w(k) == 0.0) continue;
    const Index j = info.kept_cols[static_cast<std::size_t>(k)];
    out += (raw_design.col(j).array() - info.col_mean(k)).matrix() * (w(k) / info.col_scale(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics and cross-validation
// ---------------------------------------------------------------------------

Index selection_error(const IndexSet& estimated, const IndexSet& truth, Index p) {
  for (Index j : estimated) {
    if (j < 0 || j >= p) throw IndexOutOfRange("selection_error: estimated index out of range");
  }
  for (Index j : truth) {
    if (j < 0 || j >= p) throw IndexOutOfRange("selection_error: truth index out of range");
  }
  Index overlap = 0;
  for (Index j : estimated) {
    if (truth.contains(j)) ++overlap;
  }
  return (estimated.size() - overlap) + (truth.size() - overlap);
}

std::string cv_method_name(const CvMethod& method) {
  switch (method.kind) {
    case CvMethodKind::ridge: return "ridge";
    case CvMethodKind::lasso: return "lasso";
    case CvMethodKind::bolasso: return "bolasso";
    case CvMethodKind::bolasso_soft: return "bolasso-s";
    case CvMethodKind::bagged_lasso: return "bagging";
  }
  return "unknown";
}

CvMethod cv_method_from_name(const std::string& name) {
  CvMethod m;
  if (name == "ridge") {
    m.kind = CvMethodKind::ridge;
  } else if (name == "lasso") {
    m.kind = CvMethodKind::lasso;
  } else if (name == "bolasso") {
    m.kind = CvMethodKind::bolasso;
  } else if (name == "bolasso-s") {
    m.kind = CvMethodKind::bolasso_soft;
  } else if (name == "bagging") {
    m.kind = CvMethodKind::bagged_lasso;
  } else {
    throw InvalidArgument("unknown cross-validation method '" + name + "'");
  }
  return m;
}

std::vector<std::vector<Index>> fold_partition(Index n, Index folds, Rng& rng) {
  if (folds < 2 || folds > n) throw InvalidArgument("fold_partition: need 2 <= folds <= n");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const Index j = rng.uniform_index(i + 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const Index base = n / folds;
  const Index extra = n % folds;
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  std::size_t pos = 0;
  for (Index f = 0; f < folds; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    auto& fold = out[static_cast<std::size_t>(f)];
    fold.assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                perm.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(size)));
    pos += static_cast<std::size_t>(size);
  }
  return out;
}

namespace {

std::vector<Vector> fit_parameter_grid(const LassoProblem& train, const CvMethod& method,
                                       const std::vector<double>& grid, std::uint64_t seed) {
  std::vector<Vector> weights;
  weights.reserve(grid.size());
  switch (method.kind) {
    case CvMethodKind::ridge:
      for (double lambda : grid) weights.push_back(ridge(train, lambda));
      break;
    case CvMethodKind::lasso: {
      const LassoPath path = lars_lasso_path(train);
      for (double mu : grid) weights.push_back(path_at(path, mu));
      break;
    }
    case CvMethodKind::bolasso:
    case CvMethodKind::bolasso_soft: {
      BolassoConfig cfg;
      cfg.replicates = method.m;
      cfg.mu_grid = grid;
      cfg.soft_fraction = method.kind == CvMethodKind::bolasso_soft ? method.soft_fraction : 1.0;
      cfg.seed = seed;
      const BolassoResult res = run_bolasso(train, cfg);
      for (const auto& rec : res.per_mu) weights.push_back(rec.refit(cfg.soft_fraction));
      break;
    }
    case CvMethodKind::bagged_lasso:
      weights = bagged_lasso_grid(train, method.m, grid, seed);
      break;
  }
  return weights;
}

}  // namespace

CvReport kfold_cv(const LassoProblem& raw, const std::vector<CvMethod>& methods, Index folds,
                  Index replications, std::uint64_t seed, Index param_grid_size,
                  const std::vector<double>* l1_grid_override) {
  const Index n = raw.n();
  if (folds < 2) throw InvalidArgument("kfold_cv: folds must be >= 2");
  if (n < folds) throw InvalidArgument("kfold_cv: need n >= folds");
  if (replications < 1) throw InvalidArgument("kfold_cv: replications must be >= 1");
  if (methods.empty()) throw InvalidArgument("kfold_cv: no methods");
  if (param_grid_size < 1) throw InvalidArgument("kfold_cv: empty parameter grid");

  // Parameter grids anchored at full-data scale so cells share one grid.
  const Standardized full = standardize(raw);
  const double full_mu_max = mu_max(full.problem);
  const std::vector<double> l1_grid =
      l1_grid_override ? *l1_grid_override : log_spaced_grid(full_mu_max, param_grid_size, 1e-3);
  if (l1_grid_override) param_grid_size = static_cast<Index>(l1_grid.size());
  const double ridge_scale = gram_matrix(full.problem).trace() / static_cast<double>(full.problem.p());
  const std::vector<double> ridge_grid = log_spaced_grid(10.0 * ridge_scale, param_grid_size, 1e-5);

  const Index n_methods = static_cast<Index>(methods.size());
  const Index cells = replications * folds;

  std::vector<std::vector<std::vector<Index>>> partitions(static_cast<std::size_t>(replications));
  for (Index rep = 0; rep < replications; ++rep) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    partitions[static_cast<std::size_t>(rep)] = fold_partition(n, folds, rng);
  }

  // mse[method][param][cell]
  std::vector<std::vector<std::vector<double>>> mse(
      static_cast<std::size_t>(n_methods),
      std::vector<std::vector<double>>(static_cast<std::size_t>(param_grid_size),
                                       std::vector<double>(static_cast<std::size_t>(cells), 0.0)));

  parallel_for(cells, [&](Index cell) {
    const Index rep = cell / folds;
    const Index fold = cell % folds;
    const auto& partition = partitions[static_cast<std::size_t>(rep)];
    const auto& test_rows = partition[static_cast<std::size_t>(fold)];

    std::vector<Index> train_rows;
    train_rows.reserve(static_cast<std::size_t>(n) - test_rows.size());
    for (Index f = 0; f < folds; ++f) {
      if (f == fold) continue;
      const auto& part = partition[static_cast<std::size_t>(f)];
      train_rows.insert(train_rows.end(), part.begin(), part.end());
    }

    const LassoProblem train_raw = subsample_rows(raw, train_rows);
    const Standardized train = standardize(train_raw);

    Matrix test_design(static_cast<Index>(test_rows.size()), raw.p());
    Vector test_y(static_cast<Index>(test_rows.size()));
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      test_design.row(static_cast<Index>(i)) = raw.design.row(test_rows[i]);
      test_y(static_cast<Index>(i)) = raw.response(test_rows[i]);
    }

    for (Index mi = 0; mi < n_methods; ++mi) {
      const auto& method = methods[static_cast<std::size_t>(mi)];
      const auto& grid = method.kind == CvMethodKind::ridge ? ridge_grid : l1_grid;
      const std::uint64_t cell_seed =
          mix_seed(seed, static_cast<std::uint64_t>(cell) + 0x1000ULL, static_cast<std::uint64_t>(mi));
      const std::vector<Vector> weights = fit_parameter_grid(train.problem, method, grid, cell_seed);
      for (Index pi = 0; pi < param_grid_size; ++pi) {
        const Vector pred = predict(train.info, weights[static_cast<std::size_t>(pi)], test_design);
        mse[static_cast<std::size_t>(mi)][static_cast<std::size_t>(pi)][static_cast<std::size_t>(cell)] =
            mean_squared_error(pred, test_y);
      }
    }
  });

  CvReport report;
  report.folds = folds;
  report.replications = replications;
  for (Index mi = 0; mi < n_methods; ++mi) {
    const auto& method = methods[static_cast<std::size_t>(mi)];
    const auto& grid = method.kind == CvMethodKind::ridge ? ridge_grid : l1_grid;
    Index best_pi = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (Index pi = 0; pi < param_grid_size; ++pi) {
      const auto& cell_mse = mse[static_cast<std::size_t>(mi)][static_cast<std::size_t>(pi)];
      const double mean = std::accumulate(cell_mse.begin(), cell_mse.end(), 0.0) /
                          static_cast<double>(cell_mse.size());
      if (mean < best_mean) {
        best_mean = mean;
        best_pi = pi;
      }
    }
    const auto& chosen = mse[static_cast<std::size_t>(mi)][static_cast<std::size_t>(best_pi)];
    const double mean = best_mean;
    double var = 0.0;
    for (double v : chosen) var += (v - mean) * (v - mean);
    var /= std::max<double>(1.0, static_cast<double>(chosen.size()) - 1.0);

    CvMethodReport mr;
    mr.method = cv_method_name(method);
    mr.mean_mse_x100 = 100.0 * mean;
    mr.std_mse_x100 = 100.0 * std::sqrt(var);
    mr.chosen_param = grid[static_cast<std::size_t>(best_pi)];
    report.methods.push_back(std::move(mr));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

json model_to_json(const PopulationModel& model) {
  json j;
  j["p"] = model.p();
  j["sigma"] = model.sigma;
  j["w_true"] = std::vector<double>(model.w_true.data(), model.w_true.data() + model.w_true.size());
  json q = json::array();
  for (Index i = 0; i < model.p(); ++i) {
    json row = json::array();
    for (Index c = 0; c < model.p(); ++c) row.push_back(model.q(i, c));
    q.push_back(std::move(row));
  }
  j["q"] = std::move(q);
  j["j_true"] = model.j_true.indices();
  if (!model.j_true.empty() && model.j_true.size() < model.p()) {
    j["kappa"] = consistency_kappa(model);
  }
  return j;
}

PopulationModel model_from_json(const json& j) {
  try {
    PopulationModel model;
    const Index p = j.at("p").get<Index>();
    if (p < 1) throw ParseError("model: p must be >= 1");
    const auto w = j.at("w_true").get<std::vector<double>>();
    if (static_cast<Index>(w.size()) != p) throw ParseError("model: w_true has wrong length");
    const auto& q = j.at("q");
    if (static_cast<Index>(q.size()) != p) throw ParseError("model: q has wrong shape");
    model.q = Matrix(p, p);
    for (Index i = 0; i < p; ++i) {
      const auto row = q.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != p) throw ParseError("model: q has wrong shape");
      for (Index c = 0; c < p; ++c) model.q(i, c) = row[static_cast<std::size_t>(c)];
    }
    model.w_true = Eigen::Map<const Vector>(w.data(), p);
    model.sigma = j.at("sigma").get<double>();
    if (model.sigma < 0.0) throw ParseError("model: sigma must be >= 0");
    model.j_true = support_of(model.w_true, 0.0);
    model.s_true = sign_pattern_of(model.w_true, 0.0);
    if (!model.q.allFinite() || !model.w_true.allFinite()) throw ParseError("model: non-finite entries");
    return model;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

void save_model(const PopulationModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_model: cannot open " + path);
  f << model_to_json(model).dump(2) << "\n";
}

PopulationModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_model: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ParseError("load_model: " + std::string(e.what()));
  }
  return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

template <typename T>
T get_or(const json& spec, const std::string& key, T fallback) {
  if (!spec.contains(key) || spec.at(key).is_null()) return fallback;
  return spec.at(key).get<T>();
}

std::string require_string(const json& spec, const std::string& key) {
  if (!spec.contains(key)) throw InvalidArgument("spec: missing required field '" + key + "'");
  return spec.at(key).get<std::string>();
}

Index require_count(const json& spec, const std::string& key) {
  if (!spec.contains(key)) throw InvalidArgument("spec: missing required field '" + key + "'");
  return spec.at(key).get<Index>();
}

fs::path ensure_out_dir(const json& spec) {
  const std::string out = require_string(spec, "out");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + out + ": " + ec.message());
  return dir;
}

char delimiter_of(const json& spec) {
  const std::string d = get_or<std::string>(spec, "delimiter", ",");
  if (d.size() != 1) throw InvalidArgument("spec: delimiter must be a single character");
  return d[0];
}

enum class TableFormat { csv, json_rows };

TableFormat format_of(const json& spec) {
  const std::string f = get_or<std::string>(spec, "format", "csv");
  if (f == "csv") return TableFormat::csv;
  if (f == "json") return TableFormat::json_rows;
  throw InvalidArgument("spec: format must be csv|json");
}

/// Writes the result table in the requested format and returns the filename.
std::string write_table(const csv::Table& table, const fs::path& dir, const std::string& stem,
                        TableFormat format) {
  if (format == TableFormat::csv) {
    const std::string name = stem + ".csv";
    csv::write_file(table, (dir / name).string());
    return name;
  }
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      double v;
      if (csv::parse_double(row[c], v)) {
        obj[table.header[c]] = v;
      } else {
        obj[table.header[c]] = row[c];
      }
    }
    rows.push_back(std::move(obj));
  }
  const std::string name = stem + ".json";
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw IoError("cannot write " + (dir / name).string());
  f << rows.dump(2) << "\n";
  return name;
}

PopulationModel model_for_spec(const json& spec, std::uint64_t seed) {
  const Index p = require_count(spec, "p");
  const Index r = require_count(spec, "r");
  const std::string kind = get_or<std::string>(spec, "kind", "any");
  const int max_draws = get_or<int>(spec, "max_draws", 1000);
  const LoadingScale scale = get_or<std::string>(spec, "loading_scale", "l2") == "abs"
                                 ? LoadingScale::unit_abs
                                 : LoadingScale::unit_l2;
  Rng rng(mix_seed(seed, 0x6d6f64656cULL));
  if (kind == "any") return generate_population(p, r, rng, scale);
  if (kind == "consistent") return find_model_with_kappa(p, r, true, rng, max_draws, scale);
  if (kind == "inconsistent") return find_model_with_kappa(p, r, false, rng, max_draws, scale);
  throw InvalidArgument("spec: kind must be any|consistent|inconsistent");
}

void write_problem_csv(const LassoProblem& problem, const fs::path& path) {
  csv::Table t;
  for (Index j = 0; j < problem.p(); ++j) t.header.push_back("x" + std::to_string(j));
  t.header.push_back("y");
  for (Index i = 0; i < problem.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(problem.p()) + 1);
    for (Index j = 0; j < problem.p(); ++j) row.push_back(csv::format_double(problem.design(i, j)));
    row.push_back(csv::format_double(problem.response(i)));
    t.add_row(std::move(row));
  }
  csv::write_file(t, path.string());
}

std::string join_indices(const IndexSet& s) {
  std::string out;
  for (Index j : s) {
    if (!out.empty()) out += ";";
    out += std::to_string(j);
  }
  return out;
}

/// Fig-4 selection rule for the Bolasso: the most stable size-r hard support;
/// when no grid point has one, the grid point whose hard support size is
/// closest to r is adjusted by frequency rank.
IndexSet bolasso_select_r(const BolassoResult& result, Index r, Index p) {
  try {
    return most_stable_pattern(result, r);
  } catch (const NoPatternOfSizeR&) {
  }
  std::size_t best_g = 0;
  Index best_gap = std::numeric_limits<Index>::max();
  for (std::size_t g = 0; g < result.per_mu.size(); ++g) {
    const Index gap = std::abs(result.per_mu[g].hard_support.size() - r);
    if (gap < best_gap) {
      best_gap = gap;
      best_g = g;
    }
  }
  const auto& rec = result.per_mu[best_g];
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (rec.frequencies(a) != rec.frequencies(b)) return rec.frequencies(a) > rec.frequencies(b);
    return a < b;
  });
  order.resize(static_cast<std::size_t>(std::min(r, p)));
  return IndexSet::from_unsorted(order);
}

json cmd_synth(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  const std::uint64_t seed = get_or<std::uint64_t>(spec, "seed", 0);
  const Index n = require_count(spec, "n");
  const PopulationModel model = model_for_spec(spec, seed);
  Rng rng(mix_seed(seed, 0x64617461ULL));
  const LassoProblem data = sample_dataset(model, n, rng);

  save_model(model, (dir / "model.json").string());
  write_problem_csv(data, dir / "data.csv");

  json summary;
  summary["kappa"] = model.p() == model.j_true.size() ? 0.0 : consistency_kappa(model);
  summary["sigma"] = model.sigma;
  summary["outputs"] = {"model.json", "data.csv"};
  return summary;
}

json cmd_kappa(const json& spec) {
  const PopulationModel model = load_model(require_string(spec, "model"));
  const double kappa = model.p() == model.j_true.size() ? 0.0 : consistency_kappa(model);
  json summary;
  summary["kappa"] = kappa;
  summary["consistent"] = kappa <= 1.0;
  summary["outputs"] = json::array();
  return summary;
}

struct LoadedData {
  LassoProblem problem;                    // possibly standardized
  std::vector<std::string> column_names;   // names of problem columns
  Index dropped_rows = 0;
  std::vector<std::string> dropped_constant;
};

LoadedData load_and_prepare(const json& spec) {
  CsvData data = load_csv(require_string(spec, "data"), require_string(spec, "target"), delimiter_of(spec));
  LoadedData out;
  out.dropped_rows = data.dropped_rows;
  if (get_or<bool>(spec, "standardize", true)) {
    Standardized st = standardize(data.problem);
    for (Index j : st.info.kept_cols) {
      out.column_names.push_back(data.feature_names[static_cast<std::size_t>(j)]);
    }
    for (Index j : st.info.dropped_cols) {
      out.dropped_constant.push_back(data.feature_names[static_cast<std::size_t>(j)]);
    }
    out.problem = std::move(st.problem);
  } else {
    out.column_names = data.feature_names;
    out.problem = std::move(data.problem);
  }
  return out;
}

json cmd_lasso_path(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  LoadedData data = load_and_prepare(spec);
  const Index max_knots = get_or<Index>(spec, "max_knots", 0);
  const LassoPath path =
      max_knots > 0 ? lars_lasso_path(data.problem, max_knots) : lars_lasso_path(data.problem);

  csv::Table t;
  t.header = {"knot", "mu", "active_size"};
  for (const auto& name : data.column_names) t.header.push_back("w_" + name);
  for (std::size_t k = 0; k < path.knots.size(); ++k) {
    const auto& knot = path.knots[k];
    std::vector<std::string> row = {std::to_string(k), csv::format_double(knot.mu),
                                    std::to_string(knot.active.size())};
    for (Index j = 0; j < knot.weights.size(); ++j) row.push_back(csv::format_double(knot.weights(j)));
    t.add_row(std::move(row));
  }
  const std::string path_file = write_table(t, dir, "path", format_of(spec));

  json summary;
  summary["knots"] = path.knots.size();
  summary["mu_max"] = path.knots.front().mu;
  summary["dropped_rows"] = data.dropped_rows;
  summary["dropped_constant_columns"] = data.dropped_constant;
  summary["outputs"] = {path_file};
  return summary;
}

json cmd_bolasso(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  LoadedData data = load_and_prepare(spec);

  BolassoConfig cfg;
  cfg.replicates = get_or<Index>(spec, "m", 128);
  cfg.soft_fraction = get_or<double>(spec, "soft", 0.9);
  cfg.seed = get_or<std::uint64_t>(spec, "seed", 0);
  cfg.mu_grid = log_spaced_grid(mu_max(data.problem), get_or<Index>(spec, "mu_count", 64),
                                get_or<double>(spec, "mu_min_ratio", 1e-3));
  const BolassoResult result = run_bolasso(data.problem, cfg);

  csv::Table freq;
  freq.header = {"mu"};
  for (const auto& name : data.column_names) freq.header.push_back("freq_" + name);
  csv::Table sel;
  sel.header = {"mu", "hard_size", "soft_size", "hard_support", "soft_support"};
  csv::Table refit;
  refit.header = {"mu", "selection"};
  for (const auto& name : data.column_names) refit.header.push_back("w_" + name);

  for (const auto& rec : result.per_mu) {
    std::vector<std::string> frow = {csv::format_double(rec.mu)};
    for (Index j = 0; j < rec.frequencies.size(); ++j) {
      frow.push_back(csv::format_double(rec.frequencies(j)));
    }
    freq.add_row(std::move(frow));
    sel.add_row({csv::format_double(rec.mu), std::to_string(rec.hard_support.size()),
                 std::to_string(rec.soft_support.size()), join_indices(rec.hard_support),
                 join_indices(rec.soft_support)});
    std::vector<std::string> hard_row = {csv::format_double(rec.mu), "hard"};
    std::vector<std::string> soft_row = {csv::format_double(rec.mu), "soft"};
    for (Index j = 0; j < rec.refit_hard.size(); ++j) {
      hard_row.push_back(csv::format_double(rec.refit_hard(j)));
      soft_row.push_back(csv::format_double(rec.refit_soft(j)));
    }
    refit.add_row(std::move(hard_row));
    refit.add_row(std::move(soft_row));
  }
  const TableFormat fmt = format_of(spec);
  const std::string freq_file = write_table(freq, dir, "frequencies", fmt);
  const std::string sel_file = write_table(sel, dir, "selection", fmt);
  const std::string refit_file = write_table(refit, dir, "refit", fmt);

  json summary;
  summary["m"] = cfg.replicates;
  summary["soft"] = cfg.soft_fraction;
  summary["grid_size"] = cfg.mu_grid.size();
  summary["dropped_rows"] = data.dropped_rows;
  summary["outputs"] = {freq_file, sel_file, refit_file};
  return summary;
}

json cmd_freq(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  const std::uint64_t seed = get_or<std::uint64_t>(spec, "seed", 0);
  const Index n = require_count(spec, "n");
  const Index reps = get_or<Index>(spec, "reps", 256);
  const PopulationModel model = model_for_spec(spec, seed);

  const std::vector<double> grid =
      log_spaced_grid(population_mu_max(model), get_or<Index>(spec, "mu_count", 64),
                      get_or<double>(spec, "mu_min_ratio", 1e-3));

  SelectionMethod method = SelectionMethod::plain();
  const std::string method_name = get_or<std::string>(spec, "method", "lasso");
  if (method_name == "bolasso") {
    method = SelectionMethod::bootstrap(get_or<Index>(spec, "m", 128), get_or<double>(spec, "soft", 1.0));
  } else if (method_name != "lasso") {
    throw InvalidArgument("freq: method must be lasso|bolasso");
  }

  const FrequencyTable table = sign_frequency_experiment(model, n, grid, reps, seed, method);
  const std::vector<double> correct = correct_pattern_probability(table, model);

  const Index p = model.p();
  csv::Table t;
  t.header = {"mu"};
  for (Index j = 0; j < p; ++j) t.header.push_back("freq_x" + std::to_string(j));
  for (Index j = 0; j < p; ++j) t.header.push_back("logodds_x" + std::to_string(j));
  t.header.push_back("correct_pattern");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<std::string> row = {csv::format_double(grid[g])};
    for (Index j = 0; j < p; ++j) {
      row.push_back(csv::format_double(table.frequency(static_cast<Index>(g), j)));
    }
    for (Index j = 0; j < p; ++j) {
      row.push_back(csv::format_double(clipped_log_odds(table.frequency(static_cast<Index>(g), j), reps)));
    }
    row.push_back(csv::format_double(correct[g]));
    t.add_row(std::move(row));
  }
  const std::string freq_file = write_table(t, dir, "frequencies", format_of(spec));
  save_model(model, (dir / "model.json").string());

  json summary;
  summary["kappa"] = model.p() == model.j_true.size() ? 0.0 : consistency_kappa(model);
  summary["method"] = method_name;
  summary["outputs"] = {freq_file, "model.json"};

  if (get_or<bool>(spec, "plot", false)) {
    // Heatmap: variables down the rows, mu left to right (decreasing), white
    // for frequently selected.
    std::vector<std::vector<double>> cells(static_cast<std::size_t>(p),
                                           std::vector<double>(grid.size(), 0.0));
    for (Index j = 0; j < p; ++j) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        cells[static_cast<std::size_t>(j)][g] = table.frequency(static_cast<Index>(g), j);
      }
    }
    svg::write_file(svg::heatmap(cells, "selection frequency (" + method_name + ")", "mu (decreasing)",
                                 "variable"),
                    (dir / "frequencies.svg").string());
    summary["outputs"].push_back("frequencies.svg");
  }
  return summary;
}

json cmd_pattern_prob(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  const std::uint64_t seed = get_or<std::uint64_t>(spec, "seed", 0);
  const Index n = require_count(spec, "n");
  const Index reps = get_or<Index>(spec, "reps", 256);
  std::vector<Index> m_list = get_or<std::vector<Index>>(spec, "m_list", {2, 4, 8, 16, 32, 64, 128, 256});
  const PopulationModel model = model_for_spec(spec, seed);
  const std::vector<double> grid =
      log_spaced_grid(population_mu_max(model), get_or<Index>(spec, "mu_count", 64),
                      get_or<double>(spec, "mu_min_ratio", 1e-3));

  csv::Table t;
  t.header = {"mu"};
  std::vector<std::vector<double>> columns;

  const FrequencyTable lasso_table =
      sign_frequency_experiment(model, n, grid, reps, seed, SelectionMethod::plain());
  columns.push_back(correct_pattern_probability(lasso_table, model));
  t.header.push_back("lasso");

  for (Index m : m_list) {
    const FrequencyTable bt =
        sign_frequency_experiment(model, n, grid, reps, seed, SelectionMethod::bootstrap(m));
    columns.push_back(correct_pattern_probability(bt, model));
    t.header.push_back("bolasso_m" + std::to_string(m));
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<std::string> row = {csv::format_double(grid[g])};
    for (const auto& col : columns) row.push_back(csv::format_double(col[g]));
    t.add_row(std::move(row));
  }
  const std::string prob_file = write_table(t, dir, "pattern_prob", format_of(spec));
  save_model(model, (dir / "model.json").string());

  json summary;
  summary["kappa"] = model.p() == model.j_true.size() ? 0.0 : consistency_kappa(model);
  json best = json::object();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    best[t.header[c + 1]] = *std::max_element(columns[c].begin(), columns[c].end());
  }
  summary["best_probability"] = std::move(best);
  summary["outputs"] = {prob_file, "model.json"};

  if (get_or<bool>(spec, "plot", false)) {
    std::vector<svg::Series> series;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      svg::Series s;
      s.label = t.header[c + 1];
      s.x = grid;
      s.y = columns[c];
      series.push_back(std::move(s));
    }
    svg::write_file(svg::line_chart(series, "correct pattern probability", "mu (log)", "probability", true),
                    (dir / "pattern_prob.svg").string());
    summary["outputs"].push_back("pattern_prob.svg");
  }
  return summary;
}

json cmd_compare(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  const std::uint64_t seed = get_or<std::uint64_t>(spec, "seed", 0);
  const Index p = get_or<Index>(spec, "p", 64);
  const Index r = get_or<Index>(spec, "r", 8);
  const Index reps = get_or<Index>(spec, "reps", 32);
  const Index m = get_or<Index>(spec, "m", 128);
  const int max_draws = get_or<int>(spec, "max_draws", 1000);
  const std::vector<Index> n_grid = get_or<std::vector<Index>>(spec, "n_grid", {64, 128, 256, 512});
  const std::vector<std::string> methods = get_or<std::vector<std::string>>(
      spec, "methods", {"lasso", "bolasso", "greedy", "threshold-ls", "adaptive-lasso"});
  const Index grid_count = get_or<Index>(spec, "mu_count", 64);
  const double grid_ratio = get_or<double>(spec, "mu_min_ratio", 1e-3);

  csv::Table t;
  t.header = {"model", "kappa", "n", "method", "mean_error", "std_error"};
  json kappa_summary = json::object();
  json outputs = json::array();

  for (const std::string model_kind : {"consistent", "inconsistent"}) {
    const bool want = model_kind == std::string("consistent");
    Rng model_rng(mix_seed(seed, want ? 0x636f6eULL : 0x696e63ULL));
    const PopulationModel model = find_model_with_kappa(p, r, want, model_rng, max_draws);
    const double kappa = consistency_kappa(model);
    kappa_summary[model_kind] = kappa;
    const std::string model_file = std::string(model_kind) + "_model.json";
    save_model(model, (dir / model_file).string());
    outputs.push_back(model_file);

    std::vector<svg::Series> series(methods.size());
    for (std::size_t mi = 0; mi < methods.size(); ++mi) series[mi].label = methods[mi];

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      const Index n = n_grid[ni];
      // errors[method][rep]
      std::vector<std::vector<double>> errors(methods.size(),
                                              std::vector<double>(static_cast<std::size_t>(reps), 0.0));
      parallel_for(reps, [&](Index rep) {
        Rng rng(mix_seed(mix_seed(seed, want ? 1 : 2, static_cast<std::uint64_t>(ni)),
                         static_cast<std::uint64_t>(rep)));
        const LassoProblem data = sample_dataset(model, n, rng);
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
          const std::string& name = methods[mi];
          IndexSet estimate;
          if (name == "lasso") {
            estimate = lasso_select_r(data, r, grid_count, grid_ratio).support;
          } else if (name == "bolasso") {
            BolassoConfig cfg;
            cfg.replicates = m;
            cfg.mu_grid = log_spaced_grid(mu_max(data), grid_count, grid_ratio);
            cfg.seed = mix_seed(seed, 0xb01ULL, static_cast<std::uint64_t>(rep));
            estimate = bolasso_select_r(run_bolasso(data, cfg), r, p);
          } else if (name == "greedy") {
            estimate = forward_greedy(data, r).support;
          } else if (name == "threshold-ls") {
            estimate = threshold_ls(data, r).support;
          } else if (name == "adaptive-lasso") {
            estimate = adaptive_lasso_select_r(data, r, grid_count, grid_ratio).support;
          } else if (name == "bagged-ls") {
            estimate = bagged_ls_threshold(data, m, r, mix_seed(seed, 0xba6ULL, static_cast<std::uint64_t>(rep))).support;
          } else {
            throw InvalidArgument("compare: unknown method '" + name + "'");
          }
          errors[mi][static_cast<std::size_t>(rep)] =
              static_cast<double>(selection_error(estimate, model.j_true, p));
        }
      });

      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto& e = errors[mi];
        const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
        double var = 0.0;
        for (double v : e) var += (v - mean) * (v - mean);
        var /= std::max<double>(1.0, static_cast<double>(e.size()) - 1.0);
        t.add_row({model_kind, csv::format_double(kappa), std::to_string(n), methods[mi],
                   csv::format_double(mean), csv::format_double(std::sqrt(var))});
        series[mi].x.push_back(static_cast<double>(n));
        series[mi].y.push_back(mean);
      }
    }

    if (get_or<bool>(spec, "plot", false)) {
      const std::string plot_file = std::string(model_kind) + "_selection_error.svg";
      svg::write_file(svg::line_chart(series, "variable selection error (" + std::string(model_kind) + ")",
                                      "n (log)", "mean selection error", true),
                      (dir / plot_file).string());
      outputs.push_back(plot_file);
    }
  }

  outputs.push_back(write_table(t, dir, "selection_error", format_of(spec)));

  json summary;
  summary["kappa"] = std::move(kappa_summary);
  summary["outputs"] = std::move(outputs);
  return summary;
}

json cmd_cv(const json& spec) {
  const fs::path dir = ensure_out_dir(spec);
  const std::uint64_t seed = get_or<std::uint64_t>(spec, "seed", 0);
  const Index folds = get_or<Index>(spec, "folds", 10);
  const Index replications = get_or<Index>(spec, "replications", 10);
  const Index grid_size = get_or<Index>(spec, "grid_size", 32);

  std::vector<CvMethod> methods;
  for (const std::string& name : get_or<std::vector<std::string>>(
           spec, "methods", {"ridge", "lasso", "bolasso", "bagging", "bolasso-s"})) {
    CvMethod method = cv_method_from_name(name);
    method.m = get_or<Index>(spec, "m", 128);
    method.soft_fraction = get_or<double>(spec, "soft", 0.9);
    methods.push_back(method);
  }

  LassoProblem problem;
  json data_info;
  if (spec.contains("data")) {
    CsvData data = load_csv(require_string(spec, "data"), require_string(spec, "target"), delimiter_of(spec));
    data_info["rows"] = data.problem.n();
    data_info["features"] = data.problem.p();
    data_info["dropped_rows"] = data.dropped_rows;
    problem = std::move(data.problem);
  } else {
    const PopulationModel model = model_for_spec(spec, seed);
    const Index n = require_count(spec, "n");
    Rng rng(mix_seed(seed, 0x64617461ULL));
    problem = sample_dataset(model, n, rng);
    save_model(model, (dir / "model.json").string());
    data_info["kappa"] = model.p() == model.j_true.size() ? 0.0 : consistency_kappa(model);
    data_info["rows"] = n;
  }

  const CvReport report = kfold_cv(problem, methods, folds, replications, seed, grid_size);

  csv::Table t;
  t.header = {"method", "mean_mse_x100", "std_mse_x100", "chosen_param"};
  for (const auto& mr : report.methods) {
    t.add_row({mr.method, csv::format_double(mr.mean_mse_x100), csv::format_double(mr.std_mse_x100),
               csv::format_double(mr.chosen_param)});
  }
  const std::string report_file = write_table(t, dir, "cv_report", format_of(spec));

  json summary;
  summary["data"] = std::move(data_info);
  summary["folds"] = folds;
  summary["replications"] = replications;
  json per_method = json::object();
  for (const auto& mr : report.methods) {
    per_method[mr.method] = {{"mean_mse_x100", mr.mean_mse_x100},
                             {"std_mse_x100", mr.std_mse_x100},
                             {"chosen_param", mr.chosen_param}};
  }
  summary["report"] = std::move(per_method);
  summary["outputs"] = json::array();
  summary["outputs"].push_back(report_file);
  if (!spec.contains("data")) summary["outputs"].push_back("model.json");
  return summary;
}

}  // namespace

json run_command(const json& spec) {
  const auto start = std::chrono::steady_clock::now();
  const std::string command = require_string(spec, "command");

  json summary;
  if (command == "synth") {
    summary = cmd_synth(spec);
  } else if (command == "kappa") {
    summary = cmd_kappa(spec);
  } else if (command == "lasso-path") {
    summary = cmd_lasso_path(spec);
  } else if (command == "bolasso") {
    summary = cmd_bolasso(spec);
  } else if (command == "freq") {
    summary = cmd_freq(spec);
  } else if (command == "pattern-prob") {
    summary = cmd_pattern_prob(spec);
  } else if (command == "compare") {
    summary = cmd_compare(spec);
  } else if (command == "cv") {
    summary = cmd_cv(spec);
  } else {
    throw InvalidArgument("unknown command '" + command + "'");
  }

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  summary["command"] = command;
  summary["version"] = kVersion;
  summary["wall_time_ms"] = elapsed.count();

  // Every command that writes artifacts also records a manifest sufficient to
  // reproduce them.
  if (spec.contains("out")) {
    json manifest = summary;
    manifest["spec"] = spec;
    const fs::path dir(spec.at("out").get<std::string>());
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    if (!f) throw IoError("cannot write manifest in " + dir.string());
    f << manifest.dump(2) << "\n";
  }
  return summary;
}

}  // namespace bolasso
