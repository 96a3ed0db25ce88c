#include "coda/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

namespace coda {

namespace {

// splitmix64: replicate streams are derived from (seed, replicate) so
// parallel and serial execution produce identical results.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int thread_budget() {
  if (const char* env = std::getenv("CODA_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename F>
void parallel_for(int n, F&& body) {
  const int threads = std::min(thread_budget(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

void IntervalConfig::validate() const {
  if (n_boot < 100) throw Error(ErrorCode::InvalidConfig, "n_boot must be at least 100");
  if (!(coverage >= 0.0 && coverage < 1.0))
    throw Error(ErrorCode::InvalidConfig, "coverage must lie in [0, 1)");
}

double empirical_quantile(std::vector<double> samples, double level) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "quantile of an empty sample set");
  if (!(level >= 0.0 && level <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "quantile level must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double h = (static_cast<double>(samples.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return samples[lo] + (h - lo) * (samples[hi] - samples[lo]);
}

IntervalForecast bootstrap_intervals(const DeathCountPanel& panel, const PipelineConfig& cfg,
                                     const IntervalConfig& icfg) {
  icfg.validate();
  PipelineFit fit = fit_pipeline(panel, cfg);
  const int T = fit.lc.n_years();
  if (T < 4) throw Error(ErrorCode::TooFewYears, "bootstrap needs at least 4 years");
  const int h = cfg.horizon;
  const int P = static_cast<int>(fit.lc.parts.size());
  const int F = fit.lc.n_factors();

  ForecastSet point = run_point_forecast(panel, cfg);

  // replicate -> (h x P) density rows
  std::vector<Eigen::MatrixXd> paths(icfg.n_boot);
  parallel_for(icfg.n_boot, [&](int r) {
    std::mt19937_64 rng(mix(cfg.seed + 0x51ED270C0DAULL) ^ mix(static_cast<std::uint64_t>(r)));
    std::uniform_int_distribution<int> pick_innov(0, T - 2);
    std::uniform_int_distribution<int> pick_resid(0, T - 1);

    Eigen::MatrixXd densities(h, P);
    std::vector<double> k_state(F);
    for (int f = 0; f < F; ++f) k_state[f] = fit.drift[f].last_value;
    for (int j = 0; j < h; ++j) {
      Eigen::VectorXd k_row(F);
      for (int f = 0; f < F; ++f) {
        k_state[f] += fit.drift[f].drift + fit.drift[f].innovations[pick_innov(rng)];
        k_row(f) = k_state[f];
      }
      Eigen::VectorXd w = fit.lc.reconstruct_row(k_row);
      for (int p = 0; p < P; ++p) w(p) += fit.lc.residuals(pick_resid(rng), p);
      ClampReport rep;
      densities.row(j) = back_transform_row(fit, w, &rep);
    }
    paths[r] = std::move(densities);
  });

  const double lo_level = (1.0 - icfg.coverage) / 2.0;
  const double hi_level = 1.0 - lo_level;

  IntervalForecast out;
  out.years = point.years;
  out.point = point.densities;
  out.parts = point.parts;
  out.age_labels = point.age_labels;
  out.cause_labels = point.cause_labels;
  out.config = cfg;
  out.interval_config = icfg;
  out.lower.resize(h, P);
  out.upper.resize(h, P);
  std::vector<double> cell(icfg.n_boot);
  for (int j = 0; j < h; ++j)
    for (int p = 0; p < P; ++p) {
      for (int r = 0; r < icfg.n_boot; ++r) cell[r] = paths[r](j, p);
      out.lower(j, p) = empirical_quantile(cell, lo_level);
      out.upper(j, p) = empirical_quantile(cell, hi_level);
    }

  if (icfg.reclose_bands) {
    for (int j = 0; j < h; ++j) {
      out.lower.row(j) /= out.lower.row(j).sum();
      out.upper.row(j) /= out.upper.row(j).sum();
    }
  }
  return out;
}

}  // namespace coda
