#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coda/pipeline.hpp"

namespace coda {

struct Fold {
  std::vector<int> train_years;
  std::vector<int> validation_years;
};

struct FoldPlan {
  std::vector<Fold> folds;
  std::vector<int> test_years;
  int n_folds() const { return static_cast<int>(folds.size()); }
};

enum class Criterion { RMSE, MAE };

inline const char* to_string(Criterion c) { return c == Criterion::RMSE ? "rmse" : "mae"; }

/// Expanding-window layout: the last n_test years are the test set,
/// fold 1 trains on the first T - n_test - n_folds years and validates
/// on everything up to the test set; each later fold adds one training
/// year.
FoldPlan make_fold_plan(const std::vector<int>& years, int n_test, int n_folds);

/// RMSE and MAE over all cells, on densities, reported x100.
std::pair<double, double> score(const Eigen::MatrixXd& observed,
                                const Eigen::MatrixXd& predicted);

struct MethodSpec {
  TransformTag transform;
  ZeroStrategy zeros;
  std::string label() const;
};

struct EvalRow {
  MethodSpec method;
  double rmse_x100 = 0.0;
  double mae_x100 = 0.0;
  std::vector<double> fold_rmse;  // per fold, x100 (empty for test-window eval)
  std::vector<double> fold_mae;
};

struct AlphaGridResult {
  std::vector<double> grid;
  std::vector<EvalRow> rows;  // one per alpha, fold breakdown populated
  double chosen_alpha = 0.0;
  Criterion criterion = Criterion::MAE;
};

/// Cross-validated alpha selection: runs the pipeline per fold per grid
/// value, averages fold metrics with equal weights, returns the
/// minimizer. Ties break toward smaller alpha.
AlphaGridResult tune_alpha(const DeathCountPanel& panel, const std::vector<double>& grid,
                           const FoldPlan& plan, Criterion criterion,
                           const ZeroStrategy& zeros = ZeroStrategy::none(),
                           bool global_factor = false);

/// Head-to-head table: each method is fitted on all pre-test years and
/// scored on the held-out test window.
std::vector<EvalRow> evaluate_methods(const DeathCountPanel& panel,
                                      const std::vector<MethodSpec>& methods,
                                      const std::vector<int>& test_years,
                                      bool global_factor = false);

/// Restricts a panel to a range of years (both inclusive, by label).
DeathCountPanel slice_panel(const DeathCountPanel& panel, int first_year, int last_year);

/// Observed density rows for the given years, restricted to the part
/// set of a forecast (needed when OmitParts dropped columns), re-closed.
Eigen::MatrixXd observed_densities(const DeathCountPanel& panel, const std::vector<int>& years,
                                   const std::vector<Part>& parts);

}  // namespace coda
