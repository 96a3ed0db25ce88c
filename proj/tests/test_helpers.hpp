#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "coda/composition.hpp"

namespace coda::testing {

inline DeathCountPanel make_panel(std::vector<int> years, int n_ages, int n_causes,
                                  const Eigen::MatrixXd& counts, std::string sex = "all") {
  DeathCountPanel panel;
  panel.years = std::move(years);
  for (int u = 0; u < n_ages; ++u) panel.age_bands.push_back("age" + std::to_string(u));
  for (int c = 0; c < n_causes; ++c) panel.causes.push_back("cause" + std::to_string(c));
  panel.counts = counts;
  panel.sex = std::move(sex);
  return panel;
}

/// Random closed composition, optionally with a fraction of zero parts.
inline Eigen::VectorXd random_composition(std::mt19937_64& rng, int p,
                                          double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Eigen::VectorXd v(p);
  for (int i = 0; i < p; ++i)
    v(i) = (zero_fraction > 0.0 && coin(rng) < zero_fraction) ? 0.0 : unif(rng);
  if (v.sum() == 0.0) v(0) = unif(rng);
  return v / v.sum();
}

/// Panel whose densities follow a log-linear trend per part, so every
/// log-ratio pipeline has an exact rank-1 structure.
inline DeathCountPanel log_linear_panel(int n_years, int n_ages, int n_causes,
                                        std::mt19937_64& rng, double trend_scale = 0.05,
                                        double total = 10000.0) {
  const int p = n_ages * n_causes;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd base(p), slope(p);
  for (int i = 0; i < p; ++i) {
    base(i) = unif(rng);
    slope(i) = trend_scale * unif(rng);
  }
  Eigen::MatrixXd counts(n_years, p);
  for (int t = 0; t < n_years; ++t) {
    Eigen::VectorXd logs = base + static_cast<double>(t) * slope;
    Eigen::VectorXd d = logs.array().exp();
    counts.row(t) = (d / d.sum()).transpose() * total;
  }
  std::vector<int> years;
  for (int t = 0; t < n_years; ++t) years.push_back(2000 + t);
  return make_panel(std::move(years), n_ages, n_causes, counts);
}

/// Panel that is exactly self-consistent under the alpha-transform
/// pipeline with the given alpha when tuned with n_test=3, n_folds=1:
/// one age band (so each per-cause rank-1 fit is exact), the powered
/// composition closure(d^alpha) exactly linear in t (so the drift
/// extrapolation is exact), and intercepts solved so the fold-1
/// training-window geometric mean is constant across parts (so the
/// centring step is the identity). Validation error at the generating
/// alpha is then floating-point noise.
inline DeathCountPanel self_consistent_alpha_panel(double alpha, int& n_test, int& n_folds) {
  const int T = 14, P = 5;
  n_test = 3;
  n_folds = 1;
  const int L = T - n_test - n_folds;  // fold-1 training length
  std::vector<double> m = {0.006, -0.004, 0.0075, -0.002, -0.0075};  // sums to zero

  // solve a_p so sum_{t<L} ln(a_p + m_p t) is the same for every part
  // and sum_p a_p = 1 (nested bisections, both objectives monotone)
  auto solve_a = [&](double tau, int p) {
    double lo = 1e-6, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = (lo + hi) / 2, f = 0;
      for (int t = 0; t < L; ++t) f += std::log(mid + m[p] * t);
      (f < tau ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
  };
  std::vector<double> a(P);
  double tlo = -30, thi = 10;
  for (int it = 0; it < 200; ++it) {
    double tau = (tlo + thi) / 2, s = 0;
    for (int p = 0; p < P; ++p) s += solve_a(tau, p);
    (s < 1.0 ? tlo : thi) = tau;
  }
  for (int p = 0; p < P; ++p) a[p] = solve_a((tlo + thi) / 2, p);

  Eigen::MatrixXd counts(T, P);
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd s(P);
    for (int p = 0; p < P; ++p) s(p) = a[p] + m[p] * t;
    Eigen::VectorXd d = s.array().pow(1.0 / alpha);
    counts.row(t) = (d / d.sum()).transpose() * 1e6;
  }
  std::vector<int> years;
  for (int t = 0; t < T; ++t) years.push_back(2001 + t);
  return make_panel(std::move(years), 1, P, counts);
}

}  // namespace coda::testing
