#include "coda/pipeline.hpp"

#include <cmath>

namespace coda {

namespace {

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (horizon < 0) throw Error(ErrorCode::InvalidConfig, "horizon must be non-negative");
  if (transform.kind == TransformTag::Kind::Alpha &&
      !(transform.alpha > 0.0 && transform.alpha <= 1.0))
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1]");
}

PipelineFit fit_pipeline(const DeathCountPanel& panel, const PipelineConfig& cfg) {
  cfg.validate();
  PipelineFit out;
  out.config = cfg;

  auto [comp, report] =
      staged("zero-strategy", [&] { return apply_zero_strategy(panel, cfg.zeros); });
  out.zero_report = report;
  // g is computed after zero handling: Replace makes every column
  // positive, OmitParts removes the offending columns. Under alpha with
  // zeros left in place the log-space mean is taken over the same
  // matrix the transform sees.
  out.g = staged("geometric-mean", [&] {
    if (cfg.transform.kind == TransformTag::Kind::Alpha ||
        cfg.transform.kind == TransformTag::Kind::RDA) {
      // alpha handles zeros itself, but centring still needs positive g;
      // columns with zeros contribute via positive entries only.
      Eigen::VectorXd g(comp.n_parts());
      for (int p = 0; p < comp.n_parts(); ++p) {
        double log_sum = 0.0;
        int n = 0;
        for (int t = 0; t < comp.n_rows(); ++t) {
          if (comp.values(t, p) > 0.0) {
            log_sum += std::log(comp.values(t, p));
            ++n;
          }
        }
        // a part that is zero in every year stays zero through the whole
        // chain; its reference value never multiplies anything nonzero
        g(p) = n == 0 ? 1.0 : std::exp(log_sum / n);
      }
      return GeometricMeanVector(g);
    }
    return compute_geometric_mean(comp);
  });
  CompositionMatrix centred = staged("centring", [&] { return center_rows(comp, out.g); });
  TransformedMatrix tm =
      staged("transform", [&] { return transform_matrix(centred, cfg.transform); });
  out.lc = staged("factor-fit", [&] { return fit(tm, cfg.global_factor); });
  out.drift = staged("drift-fit", [&] { return fit_drift(out.lc); });
  return out;
}

Eigen::VectorXd back_transform_row(const PipelineFit& fit, const Eigen::VectorXd& w_row,
                                   ClampReport* report) {
  const auto& tag = fit.config.transform;
  Eigen::VectorXd centred;
  if (tag.kind == TransformTag::Kind::CLR) {
    centred = clr_inverse(w_row);
  } else {
    const int p = static_cast<int>(w_row.size());
    Eigen::VectorXd z = helmert(p) * w_row;
    centred = inverse_transform_row(z, tag, report);
  }
  return perturb(centred, fit.g);
}

ForecastSet run_point_forecast(const DeathCountPanel& panel, const PipelineConfig& cfg) {
  PipelineFit fit = fit_pipeline(panel, cfg);
  const int h = cfg.horizon;
  const int P = static_cast<int>(fit.lc.parts.size());
  const int F = fit.lc.n_factors();

  ForecastSet out;
  out.config = cfg;
  out.parts = fit.lc.parts;
  out.age_labels = fit.lc.age_labels;
  out.cause_labels = fit.lc.cause_labels;
  out.zero_report = fit.zero_report;
  out.normalization = fit.lc.normalization;
  out.densities.resize(h, P);

  std::vector<std::vector<double>> k_paths(F);
  for (int f = 0; f < F; ++f) k_paths[f] = forecast_k(fit.drift[f], h);

  const int last_year = fit.lc.year_labels.empty() ? 0 : fit.lc.year_labels.back();
  for (int j = 0; j < h; ++j) {
    out.years.push_back(last_year + j + 1);
    Eigen::VectorXd k_row(F);
    for (int f = 0; f < F; ++f) k_row(f) = k_paths[f][j];
    ClampReport rep;
    Eigen::VectorXd row = staged("back-transform", [&] {
      return back_transform_row(fit, fit.lc.reconstruct_row(k_row), &rep);
    });
    out.densities.row(j) = row;
    for (int p : rep.clamped_parts)
      out.clamp_events.push_back({last_year + j + 1, p, out.part_name(p)});
  }
  return out;
}

Eigen::MatrixXd fitted_densities(const PipelineFit& fit) {
  const int T = fit.lc.n_years();
  const int P = static_cast<int>(fit.lc.parts.size());
  Eigen::MatrixXd out(T, P);
  for (int t = 0; t < T; ++t) {
    ClampReport rep;
    out.row(t) = back_transform_row(fit, fit.lc.reconstruct_row(fit.lc.k.row(t)), &rep);
  }
  return out;
}

Eigen::MatrixXd reconstruct_counts(const ForecastSet& fs, const std::vector<double>& totals) {
  if (static_cast<int>(totals.size()) != fs.densities.rows())
    throw Error(ErrorCode::ShapeMismatch, "one total per forecast year required");
  Eigen::MatrixXd out = fs.densities;
  for (int j = 0; j < out.rows(); ++j) {
    if (totals[j] <= 0.0)
      throw Error(ErrorCode::InvalidConfig, "totals must be positive");
    out.row(j) *= totals[j];
  }
  return out;
}

}  // namespace coda
