#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "baselines.hpp"
#include "bootstrap.hpp"
#include "lasso.hpp"
#include "population.hpp"
#include "types.hpp"

namespace bolasso {

inline constexpr char kVersion[] = "0.1.0";

// ---------------------------------------------------------------------------
// Dataset ingestion and standardization
// ---------------------------------------------------------------------------

struct CsvData {
  LassoProblem problem;
  std::vector<std::string> feature_names;
  std::string target_name;
  Index dropped_rows = 0;  // rows removed for missing values
};

/// Loads a delimited numeric dataset. `target` is a column name, or a
/// zero-based column index when no header matches and the string parses as an
/// integer. Rows with missing cells are dropped (and counted); columns with
/// non-numeric entries are rejected with a list of the offenders.
CsvData load_csv(const std::string& path, const std::string& target, char delimiter = ',');

struct StandardizeInfo {
  Vector col_mean;    // per kept column
  Vector col_scale;   // per kept column, empirical standard deviation
  double response_mean = 0.0;
  std::vector<Index> kept_cols;     // original indices of retained columns
  std::vector<Index> dropped_cols;  // constant columns removed
};

struct Standardized {
  LassoProblem problem;  // centered, unit-scale columns; centered response
  StandardizeInfo info;
};

/// Centers columns and response, scales columns to unit empirical standard
/// deviation, and drops constant columns. The transform is recorded so
/// raw-scale predictions can be recovered.
Standardized standardize(const LassoProblem& raw);

/// Raw-scale fitted values for the standardized weight vector w (one entry
/// per kept column).
Vector predict(const StandardizeInfo& info, const Vector& w, const Matrix& raw_design);

// ---------------------------------------------------------------------------
// Metrics and cross-validation
// ---------------------------------------------------------------------------

/// Squared distance between support indicator vectors, i.e. the cardinality
/// of the symmetric difference.
Index selection_error(const IndexSet& estimated, const IndexSet& truth, Index p);

enum class CvMethodKind { ridge, lasso, bolasso, bolasso_soft, bagged_lasso };

struct CvMethod {
  CvMethodKind kind = CvMethodKind::lasso;
  Index m = 128;              // bootstrap replicates for bolasso/bagging
  double soft_fraction = 0.9; // bolasso_soft threshold
};

std::string cv_method_name(const CvMethod& method);
CvMethod cv_method_from_name(const std::string& name);

struct CvMethodReport {
  std::string method;
  double mean_mse_x100 = 0.0;  // held-out MSE * 100 at the chosen parameter
  double std_mse_x100 = 0.0;
  double chosen_param = 0.0;
};

struct CvReport {
  std::vector<CvMethodReport> methods;
  Index folds = 0;
  Index replications = 0;
};

/// Near-equal partition of a seeded shuffle of {0..n-1}; sizes differ by at
/// most one, larger folds first.
std::vector<std::vector<Index>> fold_partition(Index n, Index folds, Rng& rng);

/// Replicated k-fold cross-validation: every method's single free parameter
/// is scanned on a 32-point log grid anchored at data scale, the value
/// minimizing the mean held-out MSE pooled over every replication x fold cell
/// is selected, and the report carries mean and standard deviation (x100) of
/// the cell MSEs at that value. `l1_grid_override`, when given, replaces the
/// data-anchored penalty grid of the l1 methods (decreasing, positive).
CvReport kfold_cv(const LassoProblem& raw, const std::vector<CvMethod>& methods, Index folds,
                  Index replications, std::uint64_t seed, Index param_grid_size = 32,
                  const std::vector<double>* l1_grid_override = nullptr);

// ---------------------------------------------------------------------------
// Population model files
// ---------------------------------------------------------------------------

nlohmann::json model_to_json(const PopulationModel& model);
PopulationModel model_from_json(const nlohmann::json& j);
void save_model(const PopulationModel& model, const std::string& path);
PopulationModel load_model(const std::string& path);

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

/// Runs one workbench command described by a JSON spec ("command" selects
/// among synth, kappa, lasso-path, bolasso, freq, pattern-prob, compare, cv;
/// remaining fields are command parameters). Artifacts are written under
/// spec["out"]; the returned summary lists them and carries headline numbers.
nlohmann::json run_command(const nlohmann::json& spec);

}  // namespace bolasso
