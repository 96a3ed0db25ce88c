#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coda/composition.hpp"

namespace coda {

// ---------------------------------------------------------------------------
// Zero handling

struct ZeroStrategy {
  enum class Kind { None, OmitParts, Replace };
  Kind kind = Kind::None;
  double replace_amount = 0.0;  // added to every zero count cell

  static ZeroStrategy none() { return {Kind::None, 0.0}; }
  static ZeroStrategy omit() { return {Kind::OmitParts, 0.0}; }
  static ZeroStrategy replace(double amount);

  std::string label() const;
};

struct ZeroReport {
  std::vector<int> dropped_parts;      // full-grid part indices removed by OmitParts
  std::vector<std::string> dropped_names;
  int replaced_cells = 0;              // count cells bumped by Replace
};

/// Resolves zero counts in the panel per the strategy, then builds the
/// composition matrix. Replace adds to zero COUNT cells before the
/// densities are formed; OmitParts drops every part column that has a
/// zero in any year, then re-closes rows.
std::pair<CompositionMatrix, ZeroReport> apply_zero_strategy(const DeathCountPanel& panel,
                                                             const ZeroStrategy& s);

// ---------------------------------------------------------------------------
// Helmert sub-matrix

/// (P-1) x P orthonormal matrix with rows orthogonal to the constant
/// vector: row j has 1/sqrt(j(j+1)) in positions 0..j-1 and
/// -j/sqrt(j(j+1)) in position j. Cached per P; safe for concurrent
/// readers.
const Eigen::MatrixXd& helmert(int p);

// ---------------------------------------------------------------------------
// Transform tags

struct TransformTag {
  enum class Kind { CLR, ILR, Alpha, RDA };
  Kind kind = Kind::CLR;
  double alpha = 0.0;  // only meaningful for Alpha

  static TransformTag clr() { return {Kind::CLR, 0.0}; }
  static TransformTag ilr() { return {Kind::ILR, 0.0}; }
  static TransformTag alpha_t(double a);
  static TransformTag rda() { return {Kind::RDA, 1.0}; }

  /// "clr" | "ilr" | "alpha:<value>" | "rda"
  std::string label() const;
  static TransformTag parse(const std::string& s);

  /// Width of the transformed row for P parts: P for CLR, P-1 otherwise.
  int width(int p) const { return kind == Kind::CLR ? p : p - 1; }
  bool operator==(const TransformTag&) const = default;
};

struct TransformedMatrix {
  Eigen::MatrixXd values;  // T x Q
  TransformTag tag;
  // part metadata carried through so the fit can recover cause blocks
  std::vector<Part> parts;
  std::vector<int> year_labels;
  std::vector<std::string> age_labels;
  std::vector<std::string> cause_labels;
};

// ---------------------------------------------------------------------------
// Log-ratio transforms

/// w_p = ln(x_p) - mean(ln x); output sums to 0.
Eigen::VectorXd clr(const Eigen::VectorXd& row);
Eigen::VectorXd clr_inverse(const Eigen::VectorXd& w);

/// z = H w(row); length P-1, unconstrained.
Eigen::VectorXd ilr(const Eigen::VectorXd& row);
Eigen::VectorXd ilr_inverse(const Eigen::VectorXd& z);

// ---------------------------------------------------------------------------
// Alpha transform

struct ClampReport {
  std::vector<int> clamped_parts;  // parts pushed to the simplex boundary
  bool empty() const { return clamped_parts.empty(); }
};

/// Power transform with tuning parameter alpha in (0,1]. Defined for
/// zero parts: the pre-image component of a zero part sits exactly at
/// the boundary -1/alpha. Returns H w, length P-1.
Eigen::VectorXd alpha_forward(const Eigen::VectorXd& row, double alpha);

/// Inverse map: v = alpha H^T z + 1; components below 0 are clamped to
/// the boundary (density exactly 0) and reported; result is
/// closure(v^(1/alpha)).
Eigen::VectorXd alpha_inverse(const Eigen::VectorXd& z, double alpha,
                              ClampReport* report = nullptr);

/// Raw-data analysis: alpha transform at alpha = 1, exposed separately
/// so baselines read clearly in configs and reports.
Eigen::VectorXd rda_forward(const Eigen::VectorXd& row);
Eigen::VectorXd rda_inverse(const Eigen::VectorXd& z, ClampReport* report = nullptr);

// ---------------------------------------------------------------------------
// Row-wise application

/// Applies the tagged transform to every row of a (typically centred)
/// composition matrix.
TransformedMatrix transform_matrix(const CompositionMatrix& m, const TransformTag& tag);

/// Inverts one transformed row back to a composition.
Eigen::VectorXd inverse_transform_row(const Eigen::VectorXd& z, const TransformTag& tag,
                                      ClampReport* report = nullptr);

}  // namespace coda
