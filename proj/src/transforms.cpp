#include "coda/transforms.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace coda {

ZeroStrategy ZeroStrategy::replace(double amount) {
  if (amount <= 0.0)
    throw Error(ErrorCode::InvalidConfig, "Replace amount must be positive");
  return {Kind::Replace, amount};
}

std::string ZeroStrategy::label() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::OmitParts: return "omit";
    case Kind::Replace: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "replace:%g", replace_amount);
      return buf;
    }
  }
  return "none";
}

std::pair<CompositionMatrix, ZeroReport> apply_zero_strategy(const DeathCountPanel& panel,
                                                             const ZeroStrategy& s) {
  ZeroReport report;
  switch (s.kind) {
    case ZeroStrategy::Kind::None:
      return {build_composition(panel), report};
    case ZeroStrategy::Kind::Replace: {
      DeathCountPanel bumped = panel;
      for (int t = 0; t < bumped.counts.rows(); ++t)
        for (int p = 0; p < bumped.counts.cols(); ++p)
          if (bumped.counts(t, p) == 0.0) {
            bumped.counts(t, p) = s.replace_amount;
            ++report.replaced_cells;
          }
      return {build_composition(bumped), report};
    }
    case ZeroStrategy::Kind::OmitParts: {
      CompositionMatrix full = build_composition(panel);
      std::vector<int> keep;
      for (int p = 0; p < full.n_parts(); ++p) {
        if ((full.values.col(p).array() == 0.0).any()) {
          report.dropped_parts.push_back(p);
          report.dropped_names.push_back(full.part_name(p));
        } else {
          keep.push_back(p);
        }
      }
      if (keep.empty())
        throw Error(ErrorCode::AllPartsDropped, "every part contains a zero; nothing left to model");
      if (report.dropped_parts.empty()) return {full, report};
      CompositionMatrix out;
      out.values.resize(full.n_rows(), static_cast<int>(keep.size()));
      for (size_t j = 0; j < keep.size(); ++j) {
        out.values.col(static_cast<int>(j)) = full.values.col(keep[j]);
        out.parts.push_back(full.parts[keep[j]]);
      }
      for (int t = 0; t < out.n_rows(); ++t)
        out.values.row(t) /= out.values.row(t).sum();
      out.year_labels = full.year_labels;
      out.age_labels = full.age_labels;
      out.cause_labels = full.cause_labels;
      return {out, report};
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown zero strategy");
}

const Eigen::MatrixXd& helmert(int p) {
  if (p < 2)
    throw Error(ErrorCode::PartCountTooSmall, "Helmert sub-matrix needs at least 2 parts");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return *it->second;

  auto h = std::make_unique<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(p - 1, p));
  for (int j = 1; j < p; ++j) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < j; ++i) (*h)(j - 1, i) = norm;
    (*h)(j - 1, j) = -j * norm;
  }
  return *cache.emplace(p, std::move(h)).first->second;
}

TransformTag TransformTag::alpha_t(double a) {
  if (!(a > 0.0 && a <= 1.0))
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1]");
  return {Kind::Alpha, a};
}

std::string TransformTag::label() const {
  switch (kind) {
    case Kind::CLR: return "clr";
    case Kind::ILR: return "ilr";
    case Kind::RDA: return "rda";
    case Kind::Alpha: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "alpha:%g", alpha);
      return buf;
    }
  }
  return "clr";
}

TransformTag TransformTag::parse(const std::string& s) {
  if (s == "clr") return clr();
  if (s == "ilr") return ilr();
  if (s == "rda") return rda();
  if (s.rfind("alpha:", 0) == 0) return alpha_t(std::stod(s.substr(6)));
  throw Error(ErrorCode::InvalidConfig, "unknown transform '" + s + "'");
}

Eigen::VectorXd clr(const Eigen::VectorXd& row) {
  if ((row.array() <= 0.0).any())
    throw Error(ErrorCode::NonPositiveComponent,
                "clr requires strictly positive parts; use a zero strategy or alpha > 0");
  Eigen::ArrayXd logs = row.array().log();
  return (logs - logs.mean()).matrix();
}

Eigen::VectorXd clr_inverse(const Eigen::VectorXd& w) {
  // subtract max before exp so large coordinates cannot overflow
  Eigen::ArrayXd e = (w.array() - w.maxCoeff()).exp();
  return e.matrix() / e.sum();
}

Eigen::VectorXd ilr(const Eigen::VectorXd& row) {
  return helmert(static_cast<int>(row.size())) * clr(row);
}

Eigen::VectorXd ilr_inverse(const Eigen::VectorXd& z) {
  const int p = static_cast<int>(z.size()) + 1;
  return clr_inverse(helmert(p).transpose() * z);
}

Eigen::VectorXd alpha_forward(const Eigen::VectorXd& row, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1]");
  if ((row.array() < 0.0).any())
    throw Error(ErrorCode::NegativeEntry, "composition row has a negative entry");
  const int p = static_cast<int>(row.size());
  Eigen::ArrayXd powered = row.array().pow(alpha);  // 0^alpha = 0
  const double s = powered.sum();
  if (s <= 0.0) throw Error(ErrorCode::AllZeroRow, "all-zero composition row");
  Eigen::VectorXd w = ((p * powered / s - 1.0) / alpha).matrix();
  return helmert(p) * w;
}

Eigen::VectorXd alpha_inverse(const Eigen::VectorXd& z, double alpha, ClampReport* report) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1]");
  const int p = static_cast<int>(z.size()) + 1;
  Eigen::VectorXd v = alpha * (helmert(p).transpose() * z);
  v.array() += 1.0;
  // components within rounding noise of the boundary are exact zeros, so
  // zero parts survive a forward/inverse roundtrip as zeros
  constexpr double kBoundaryTol = 1e-12;
  int positive = 0;
  for (int i = 0; i < p; ++i) {
    if (v(i) < 0.0) {
      v(i) = 0.0;  // pre-image forced to the boundary -1/alpha
      if (report) report->clamped_parts.push_back(i);
    } else if (v(i) < kBoundaryTol) {
      v(i) = 0.0;
    }
    if (v(i) > 0.0) ++positive;
  }
  if (positive == 0)
    throw Error(ErrorCode::AllComponentsClamped, "inverse alpha transform clamped every part");
  return closure(v.array().pow(1.0 / alpha).matrix());
}

Eigen::VectorXd rda_forward(const Eigen::VectorXd& row) { return alpha_forward(row, 1.0); }

Eigen::VectorXd rda_inverse(const Eigen::VectorXd& z, ClampReport* report) {
  return alpha_inverse(z, 1.0, report);
}

TransformedMatrix transform_matrix(const CompositionMatrix& m, const TransformTag& tag) {
  TransformedMatrix out;
  out.tag = tag;
  out.parts = m.parts;
  out.year_labels = m.year_labels;
  out.age_labels = m.age_labels;
  out.cause_labels = m.cause_labels;
  const int q = tag.width(m.n_parts());
  out.values.resize(m.n_rows(), q);
  for (int t = 0; t < m.n_rows(); ++t) {
    Eigen::VectorXd row = m.values.row(t);
    switch (tag.kind) {
      case TransformTag::Kind::CLR: out.values.row(t) = clr(row); break;
      case TransformTag::Kind::ILR: out.values.row(t) = ilr(row); break;
      case TransformTag::Kind::Alpha: out.values.row(t) = alpha_forward(row, tag.alpha); break;
      case TransformTag::Kind::RDA: out.values.row(t) = rda_forward(row); break;
    }
  }
  return out;
}

Eigen::VectorXd inverse_transform_row(const Eigen::VectorXd& z, const TransformTag& tag,
                                      ClampReport* report) {
  switch (tag.kind) {
    case TransformTag::Kind::CLR: return clr_inverse(z);
    case TransformTag::Kind::ILR: return ilr_inverse(z);
    case TransformTag::Kind::Alpha: return alpha_inverse(z, tag.alpha, report);
    case TransformTag::Kind::RDA: return rda_inverse(z, report);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown transform tag");
}

}  // namespace coda
