#include "coda/lee_carter.hpp"

#include <cmath>
#include <numeric>

namespace coda {

namespace {

struct Rank1 {
  Eigen::VectorXd b;  // unit norm, sum >= 0
  Eigen::VectorXd k;  // scaled left vector
  bool degenerate = false;
};

Rank1 rank1_factor(const Eigen::MatrixXd& block) {
  Rank1 out;
  const int n = static_cast<int>(block.cols());
  if (block.isZero(0.0)) {
    out.b = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    out.k = Eigen::VectorXd::Zero(block.rows());
    out.degenerate = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.b = svd.matrixV().col(0);
  out.k = svd.matrixU().col(0) * svd.singularValues()(0);
  if (out.b.sum() < 0.0) {
    out.b = -out.b;
    out.k = -out.k;
  }
  return out;
}

}  // namespace

Eigen::VectorXd LeeCarterFit::reconstruct_row(const Eigen::VectorXd& k_row) const {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<int>(parts.size()));
  for (size_t f = 0; f < factor_columns.size(); ++f)
    for (size_t i = 0; i < factor_columns[f].size(); ++i)
      row(factor_columns[f][i]) = b[f](static_cast<int>(i)) * k_row(static_cast<int>(f));
  return row;
}

LeeCarterFit fit(const TransformedMatrix& tm, bool global_factor) {
  const int T = static_cast<int>(tm.values.rows());
  if (T < 3) throw Error(ErrorCode::TooFewYears, "Lee-Carter fit needs at least 3 years");
  if (!tm.values.allFinite())
    throw Error(ErrorCode::InvalidConfig, "transformed matrix contains non-finite entries");

  const int P = static_cast<int>(tm.parts.size());

  LeeCarterFit out;
  out.tag = tm.tag;
  out.global_factor = global_factor;
  out.parts = tm.parts;
  out.year_labels = tm.year_labels;
  out.age_labels = tm.age_labels;
  out.cause_labels = tm.cause_labels;

  // ILR/alpha rows live in the (P-1)-dimensional image; back-map through
  // H^T so each column corresponds to one (age, cause) part again.
  if (tm.tag.kind == TransformTag::Kind::CLR) {
    out.w = tm.values;
  } else {
    out.w = tm.values * helmert(P);
  }

  if (global_factor) {
    std::vector<int> cols(P);
    std::iota(cols.begin(), cols.end(), 0);
    Rank1 r = rank1_factor(out.w);
    out.b.push_back(r.b);
    out.k.resize(T, 1);
    out.k.col(0) = r.k;
    out.factor_cause.push_back(-1);
    out.factor_columns.push_back(cols);
    out.degenerate.push_back(r.degenerate);
  } else {
    const int C = static_cast<int>(tm.cause_labels.size());
    for (int c = 0; c < C; ++c) {
      std::vector<int> cols;
      for (int p = 0; p < P; ++p)
        if (tm.parts[p].cause == c) cols.push_back(p);
      if (cols.empty()) continue;  // cause fully removed by zero handling
      out.factor_cause.push_back(c);
      out.factor_columns.push_back(cols);
    }
    const int F = static_cast<int>(out.factor_columns.size());
    out.k.resize(T, F);
    for (int f = 0; f < F; ++f) {
      const auto& cols = out.factor_columns[f];
      Eigen::MatrixXd block(T, cols.size());
      for (size_t i = 0; i < cols.size(); ++i) block.col(static_cast<int>(i)) = out.w.col(cols[i]);
      Rank1 r = rank1_factor(block);
      out.b.push_back(r.b);
      out.k.col(f) = r.k;
      out.degenerate.push_back(r.degenerate);
    }
  }

  out.residuals.resize(T, P);
  for (int t = 0; t < T; ++t)
    out.residuals.row(t) = out.w.row(t) - out.reconstruct_row(out.k.row(t)).transpose();
  return out;
}

std::vector<DriftModel> fit_drift(const LeeCarterFit& fit) {
  const int T = fit.n_years();
  if (T < 3) throw Error(ErrorCode::TooFewYears, "drift sd needs at least 3 years");
  std::vector<DriftModel> out;
  out.reserve(fit.n_factors());
  for (int f = 0; f < fit.n_factors(); ++f) {
    DriftModel dm;
    dm.last_value = fit.k(T - 1, f);
    dm.drift = (fit.k(T - 1, f) - fit.k(0, f)) / (T - 1);
    double ss = 0.0;
    for (int t = 1; t < T; ++t) {
      const double innov = fit.k(t, f) - fit.k(t - 1, f) - dm.drift;
      dm.innovations.push_back(innov);
      ss += innov * innov;
    }
    dm.innovation_sd = std::sqrt(ss / (T - 2));
    out.push_back(std::move(dm));
  }
  return out;
}

std::vector<double> forecast_k(const DriftModel& dm, int horizon) {
  std::vector<double> out;
  out.reserve(horizon);
  for (int j = 1; j <= horizon; ++j) out.push_back(dm.last_value + j * dm.drift);
  return out;
}

ClassicalLCFit fit_classical_lc(const Eigen::MatrixXd& rates) {
  if ((rates.array() <= 0.0).any())
    throw Error(ErrorCode::NonPositiveRate, "classical LC requires strictly positive rates");
  const int T = static_cast<int>(rates.rows());
  if (T < 3) throw Error(ErrorCode::TooFewYears, "Lee-Carter fit needs at least 3 years");

  Eigen::MatrixXd logm = rates.array().log();
  ClassicalLCFit out;
  out.mu = logm.colwise().mean();
  Eigen::MatrixXd centered = logm.rowwise() - out.mu.transpose();
  Rank1 r = rank1_factor(centered);
  out.b = r.b;
  out.k = r.k;
  out.residuals = centered - out.k * out.b.transpose();
  return out;
}

}  // namespace coda
