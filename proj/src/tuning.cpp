#include "coda/tuning.hpp"

#include <algorithm>
#include <cmath>

namespace coda {

FoldPlan make_fold_plan(const std::vector<int>& years, int n_test, int n_folds) {
  const int T = static_cast<int>(years.size());
  if (n_test < 1 || n_folds < 1)
    throw Error(ErrorCode::InvalidConfig, "n_test and n_folds must be positive");
  const int pre_test = T - n_test;
  const int first_train = pre_test - n_folds;  // fold 1 training length
  if (first_train < 3)
    throw Error(ErrorCode::InsufficientYears,
                "need at least n_test + n_folds + 3 years for the fold plan");

  FoldPlan plan;
  plan.test_years.assign(years.begin() + pre_test, years.end());
  for (int k = 0; k < n_folds; ++k) {
    Fold fold;
    const int train_len = first_train + k;
    fold.train_years.assign(years.begin(), years.begin() + train_len);
    fold.validation_years.assign(years.begin() + train_len, years.begin() + pre_test);
    if (fold.validation_years.empty())
      throw Error(ErrorCode::InsufficientYears, "fold has an empty validation window");
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

std::pair<double, double> score(const Eigen::MatrixXd& observed,
                                const Eigen::MatrixXd& predicted) {
  if (observed.rows() != predicted.rows() || observed.cols() != predicted.cols())
    throw Error(ErrorCode::ShapeMismatch, "observed and predicted shapes differ");
  const double n = static_cast<double>(observed.size());
  Eigen::ArrayXXd diff = (observed - predicted).array();
  const double rmse = std::sqrt(diff.square().sum() / n);
  const double mae = diff.abs().sum() / n;
  return {rmse * 100.0, mae * 100.0};
}

std::string MethodSpec::label() const {
  if (transform.kind == TransformTag::Kind::Alpha || transform.kind == TransformTag::Kind::RDA)
    return transform.label();
  return transform.label() + "-" + zeros.label();
}

DeathCountPanel slice_panel(const DeathCountPanel& panel, int first_year, int last_year) {
  auto it = std::find(panel.years.begin(), panel.years.end(), first_year);
  auto jt = std::find(panel.years.begin(), panel.years.end(), last_year);
  if (it == panel.years.end() || jt == panel.years.end() || last_year < first_year)
    throw Error(ErrorCode::InvalidConfig, "year range not present in panel");
  const int a = static_cast<int>(it - panel.years.begin());
  const int b = static_cast<int>(jt - panel.years.begin());
  DeathCountPanel out = panel;
  out.years.assign(panel.years.begin() + a, panel.years.begin() + b + 1);
  out.counts = panel.counts.middleRows(a, b - a + 1);
  return out;
}

Eigen::MatrixXd observed_densities(const DeathCountPanel& panel, const std::vector<int>& years,
                                   const std::vector<Part>& parts) {
  CompositionMatrix full = build_composition(panel);
  const int C = panel.n_causes();
  Eigen::MatrixXd out(years.size(), parts.size());
  for (size_t j = 0; j < years.size(); ++j) {
    auto it = std::find(panel.years.begin(), panel.years.end(), years[j]);
    if (it == panel.years.end())
      throw Error(ErrorCode::InvalidConfig, "year not present in panel");
    const int t = static_cast<int>(it - panel.years.begin());
    for (size_t p = 0; p < parts.size(); ++p)
      out(static_cast<int>(j), static_cast<int>(p)) =
          full.values(t, part_index(parts[p].age, parts[p].cause, C));
    // re-close when the part set is a subcomposition
    out.row(static_cast<int>(j)) /= out.row(static_cast<int>(j)).sum();
  }
  return out;
}

namespace {

std::pair<double, double> score_window(const DeathCountPanel& panel, const PipelineConfig& cfg,
                                       const std::vector<int>& train_years,
                                       const std::vector<int>& eval_years) {
  DeathCountPanel train = slice_panel(panel, train_years.front(), train_years.back());
  PipelineConfig run_cfg = cfg;
  run_cfg.horizon = static_cast<int>(eval_years.size());
  ForecastSet fs = run_point_forecast(train, run_cfg);
  Eigen::MatrixXd obs = observed_densities(panel, eval_years, fs.parts);
  return score(obs, fs.densities);
}

}  // namespace

AlphaGridResult tune_alpha(const DeathCountPanel& panel, const std::vector<double>& grid,
                           const FoldPlan& plan, Criterion criterion,
                           const ZeroStrategy& zeros, bool global_factor) {
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "alpha grid is empty");
  AlphaGridResult result;
  result.grid = grid;
  result.criterion = criterion;

  for (double a : grid) {
    PipelineConfig cfg;
    cfg.transform = TransformTag::alpha_t(a);
    cfg.zeros = zeros;
    cfg.global_factor = global_factor;

    EvalRow row;
    row.method = {cfg.transform, cfg.zeros};
    double rmse_sum = 0.0, mae_sum = 0.0;
    for (const Fold& fold : plan.folds) {
      auto [rmse, mae] = score_window(panel, cfg, fold.train_years, fold.validation_years);
      row.fold_rmse.push_back(rmse);
      row.fold_mae.push_back(mae);
      rmse_sum += rmse;
      mae_sum += mae;
    }
    row.rmse_x100 = rmse_sum / plan.n_folds();
    row.mae_x100 = mae_sum / plan.n_folds();
    result.rows.push_back(std::move(row));
  }

  int best = 0;
  auto metric = [&](int i) {
    return criterion == Criterion::RMSE ? result.rows[i].rmse_x100 : result.rows[i].mae_x100;
  };
  for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
    // strict improvement only: ties keep the smaller alpha
    if (metric(i) < metric(best) && !(grid[i] > grid[best] && metric(i) == metric(best)))
      best = i;
  }
  // guard against a grid given in descending order
  for (int i = 0; i < static_cast<int>(grid.size()); ++i)
    if (metric(i) == metric(best) && grid[i] < grid[best]) best = i;
  result.chosen_alpha = grid[best];
  return result;
}

std::vector<EvalRow> evaluate_methods(const DeathCountPanel& panel,
                                      const std::vector<MethodSpec>& methods,
                                      const std::vector<int>& test_years,
                                      bool global_factor) {
  if (test_years.empty())
    throw Error(ErrorCode::InvalidConfig, "empty test window");
  std::vector<int> train_years;
  for (int y : panel.years)
    if (y < test_years.front()) train_years.push_back(y);
  if (train_years.size() < 3)
    throw Error(ErrorCode::InsufficientYears, "fewer than 3 training years before the test window");

  std::vector<EvalRow> table;
  for (const MethodSpec& m : methods) {
    PipelineConfig cfg;
    cfg.transform = m.transform;
    cfg.zeros = m.zeros;
    cfg.global_factor = global_factor;
    EvalRow row;
    row.method = m;
    auto [rmse, mae] = score_window(panel, cfg, train_years, test_years);
    row.rmse_x100 = rmse;
    row.mae_x100 = mae;
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace coda
