#pragma once

#include <cstdint>

#include "coda/pipeline.hpp"

namespace coda {

struct IntervalConfig {
  int n_boot = 500;
  double coverage = 0.9;
  std::uint64_t seed = 0;
  bool reclose_bands = false;  // close the envelopes (documented caveat:
                               // per-cell quantiles of compositions do
                               // not form a composition)

  void validate() const;
};

struct IntervalForecast {
  std::vector<int> years;
  Eigen::MatrixXd lower;   // h x P
  Eigen::MatrixXd point;   // h x P, deterministic pipeline output
  Eigen::MatrixXd upper;   // h x P
  std::vector<Part> parts;
  std::vector<std::string> age_labels;
  std::vector<std::string> cause_labels;
  PipelineConfig config;
  IntervalConfig interval_config;
};

/// Order-statistic quantile with linear interpolation between closest
/// ranks (type 7: h = (n-1) * level + 1 on 1-based ranks).
double empirical_quantile(std::vector<double> samples, double level);

/// Bootstrap bands: resample the observed factor innovations to
/// simulate k-paths, add resampled fit residuals per cell, back-map
/// each replicate to the simplex, take per-cell quantiles.
IntervalForecast bootstrap_intervals(const DeathCountPanel& panel, const PipelineConfig& cfg,
                                     const IntervalConfig& icfg);

}  // namespace coda
