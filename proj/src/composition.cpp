#include "coda/composition.hpp"

#include <cmath>

namespace coda {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::NegativeDeaths: return "NegativeDeaths";
    case ErrorCode::YearWithZeroTotal: return "YearWithZeroTotal";
    case ErrorCode::AllZeroVector: return "AllZeroVector";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositivePerturbation: return "NonPositivePerturbation";
    case ErrorCode::ZeroInColumn: return "ZeroInColumn";
    case ErrorCode::AllPartsDropped: return "AllPartsDropped";
    case ErrorCode::PartCountTooSmall: return "PartCountTooSmall";
    case ErrorCode::NonPositiveComponent: return "NonPositiveComponent";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::AllZeroRow: return "AllZeroRow";
    case ErrorCode::AllComponentsClamped: return "AllComponentsClamped";
    case ErrorCode::TooFewYears: return "TooFewYears";
    case ErrorCode::DegenerateBlock: return "DegenerateBlock";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::InsufficientYears: return "InsufficientYears";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

void DeathCountPanel::validate() const {
  const int T = n_years();
  if (counts.rows() != T || counts.cols() != n_parts())
    throw Error(ErrorCode::MissingCell, "panel counts matrix does not match label dimensions");
  for (int t = 1; t < T; ++t)
    if (years[t] != years[t - 1] + 1)
      throw Error(ErrorCode::ParseError, "years must be consecutive calendar years");
  if ((counts.array() < 0.0).any())
    throw Error(ErrorCode::NegativeDeaths, "negative death count in panel");
}

CompositionMatrix build_composition(const DeathCountPanel& panel) {
  panel.validate();
  const int T = panel.n_years();
  const int C = panel.n_causes();
  const int P = panel.n_parts();

  CompositionMatrix m;
  m.values.resize(T, P);
  for (int t = 0; t < T; ++t) {
    const double total = panel.counts.row(t).sum();
    if (total <= 0.0)
      throw Error(ErrorCode::YearWithZeroTotal,
                  "year " + std::to_string(panel.years[t]) + " has zero total deaths");
    m.values.row(t) = panel.counts.row(t) / total;
  }
  m.parts.reserve(P);
  for (int p = 0; p < P; ++p) {
    auto [u, c] = part_coords(p, C);
    m.parts.push_back({u, c});
  }
  m.year_labels = panel.years;
  m.age_labels = panel.age_bands;
  m.cause_labels = panel.causes;
  return m;
}

Eigen::VectorXd closure(const Eigen::VectorXd& v) {
  if ((v.array() < 0.0).any())
    throw Error(ErrorCode::NegativeEntry, "closure input has a negative entry");
  if (v.sum() <= 0.0)
    throw Error(ErrorCode::AllZeroVector, "closure of an all-zero vector is undefined");
  // iterate to a floating-point fixed point so closure(closure(v)) == closure(v)
  Eigen::VectorXd out = v;
  for (int iter = 0; iter < 8; ++iter) {
    const double s = out.sum();
    if (s == 1.0) break;
    Eigen::VectorXd next = out / s;
    if (next == out) break;
    out = std::move(next);
  }
  return out;
}

Eigen::VectorXd perturb(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch, "perturbation of vectors with different lengths");
  if ((y.array() <= 0.0).any())
    throw Error(ErrorCode::NonPositivePerturbation, "perturbing vector must be strictly positive");
  return closure(x.cwiseProduct(y));
}

Eigen::VectorXd inverse_perturb(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch, "perturbation of vectors with different lengths");
  if ((y.array() <= 0.0).any())
    throw Error(ErrorCode::NonPositivePerturbation, "perturbing vector must be strictly positive");
  return closure(x.cwiseQuotient(y));
}

GeometricMeanVector compute_geometric_mean(const CompositionMatrix& m) {
  if ((m.values.array() <= 0.0).any())
    throw Error(ErrorCode::ZeroInColumn,
                "geometric mean undefined with zero entries; apply a zero strategy first");
  // exp(mean(log)) keeps products of up to ~100 densities in range
  return m.values.array().log().colwise().mean().exp();
}

CompositionMatrix center_rows(const CompositionMatrix& m, const GeometricMeanVector& g) {
  CompositionMatrix out = m;
  for (int t = 0; t < m.n_rows(); ++t)
    out.values.row(t) = inverse_perturb(m.values.row(t).transpose(), g).transpose();
  return out;
}

}  // namespace coda
