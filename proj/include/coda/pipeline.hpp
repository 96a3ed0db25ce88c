#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coda/lee_carter.hpp"
#include "coda/transforms.hpp"

namespace coda {

struct PipelineConfig {
  TransformTag transform = TransformTag::clr();
  ZeroStrategy zeros = ZeroStrategy::none();
  int horizon = 1;
  bool global_factor = false;
  std::uint64_t seed = 0;  // used by interval paths only

  void validate() const;
};

struct ClampEvent {
  int year;
  int part;  // column index in the forecast composition
  std::string part_name;
};

/// Point forecasts of death densities, back on the simplex.
struct ForecastSet {
  std::vector<int> years;    // T+1 .. T+h
  Eigen::MatrixXd densities; // h x P, rows sum to 1
  std::vector<ClampEvent> clamp_events;
  std::vector<Part> parts;
  std::vector<std::string> age_labels;
  std::vector<std::string> cause_labels;
  ZeroReport zero_report;
  PipelineConfig config;
  std::string normalization;

  std::string part_name(int p) const {
    return age_labels[parts[p].age] + "|" + cause_labels[parts[p].cause];
  }
};

/// Fitted state shared between the point pipeline and the bootstrap.
struct PipelineFit {
  LeeCarterFit lc;
  std::vector<DriftModel> drift;
  GeometricMeanVector g;
  ZeroReport zero_report;
  PipelineConfig config;
};

/// Zero strategy -> composition -> centring -> transform -> factor fit.
PipelineFit fit_pipeline(const DeathCountPanel& panel, const PipelineConfig& cfg);

/// Maps a w-space forecast row back to the simplex: re-apply the forward
/// basis, invert the transform (clamping for alpha), perturb by g.
Eigen::VectorXd back_transform_row(const PipelineFit& fit, const Eigen::VectorXd& w_row,
                                   ClampReport* report = nullptr);

/// Full chain: fit, forecast each factor by random walk with drift,
/// back-transform every horizon row.
ForecastSet run_point_forecast(const DeathCountPanel& panel, const PipelineConfig& cfg);

/// In-sample fitted densities (one per training year), through the same
/// back-transform as the forecast path.
Eigen::MatrixXd fitted_densities(const PipelineFit& fit);

/// Scales density rows by user-supplied totals. Totals are exogenous:
/// this artifact does not forecast them.
Eigen::MatrixXd reconstruct_counts(const ForecastSet& fs, const std::vector<double>& totals);

}  // namespace coda
