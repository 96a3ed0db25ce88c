#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "coda/transforms.hpp"

namespace coda {

/// Rank-1 factor fit per cause: w[t, (u,c)] = b[u,c] * k[t,c] + eps.
/// For ILR/alpha inputs of width P-1 the fit operates on the
/// back-mapped P-width representation (H^T z) so the (u,c) block
/// structure exists.
struct LeeCarterFit {
  // One factor per cause still present after zero handling (or a single
  // factor when global_factor is set). Blocks can have different sizes
  // after part omission, so each factor keeps its own loading vector.
  std::vector<Eigen::VectorXd> b;       // per factor, unit norm, sum >= 0
  Eigen::MatrixXd k;                    // T x n_factors
  Eigen::MatrixXd residuals;            // T x P, w-space
  Eigen::MatrixXd w;                    // T x P training values, w-space
  TransformTag tag;
  GeometricMeanVector g;                // reference vector from centring
  std::string normalization = "b:unit-l2,sum-nonneg";
  bool global_factor = false;
  std::vector<bool> degenerate;         // per factor: block was identically zero

  // part bookkeeping (which columns of w belong to which factor)
  std::vector<Part> parts;
  std::vector<int> factor_cause;                // factor -> cause index (-1 when global)
  std::vector<std::vector<int>> factor_columns; // factor -> part column indices
  std::vector<int> year_labels;
  std::vector<std::string> age_labels;
  std::vector<std::string> cause_labels;

  int n_years() const { return static_cast<int>(k.rows()); }
  int n_factors() const { return static_cast<int>(k.cols()); }

  /// Rebuilds the w-space row for a vector of factor values (one per
  /// factor column).
  Eigen::VectorXd reconstruct_row(const Eigen::VectorXd& k_row) const;
};

/// Random walk with drift for one factor series.
struct DriftModel {
  double drift = 0.0;
  double innovation_sd = 0.0;  // divisor T-2 over first differences
  double last_value = 0.0;
  std::vector<double> innovations;  // observed diffs minus drift, for bootstrap
};

struct ClassicalLCFit {
  Eigen::VectorXd mu;  // per age: time-average log rate
  Eigen::VectorXd b;
  Eigen::VectorXd k;
  Eigen::MatrixXd residuals;
};

/// Fits the factor structure via per-cause rank-1 SVD (or a single
/// global SVD when global_factor is set).
LeeCarterFit fit(const TransformedMatrix& tm, bool global_factor = false);

/// One drift model per factor column of the fit.
std::vector<DriftModel> fit_drift(const LeeCarterFit& fit);

/// Deterministic point forecast: last value plus j * drift.
std::vector<double> forecast_k(const DriftModel& dm, int horizon);

/// Classical model on log central death rates for one cause:
/// ln m = mu + b k + eps.
ClassicalLCFit fit_classical_lc(const Eigen::MatrixXd& rates);

}  // namespace coda
