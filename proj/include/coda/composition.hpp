#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "coda/error.hpp"

namespace coda {

/// Raw death counts indexed by (year, age band, cause) for one sex.
/// Counts are stored as reals: zero-replacement strategies inject
/// fractional counts (0.25 / 0.5) upstream of composition building.
struct DeathCountPanel {
  std::vector<int> years;                // strictly increasing by 1
  std::vector<std::string> age_bands;    // length U
  std::vector<std::string> causes;       // length C
  Eigen::MatrixXd counts;                // T x (U*C), cause runs faster than age
  std::string sex;

  int n_years() const { return static_cast<int>(years.size()); }
  int n_ages() const { return static_cast<int>(age_bands.size()); }
  int n_causes() const { return static_cast<int>(causes.size()); }
  int n_parts() const { return n_ages() * n_causes(); }

  double& at(int t, int u, int c) { return counts(t, u * n_causes() + c); }
  double at(int t, int u, int c) const { return counts(t, u * n_causes() + c); }

  /// Throws if the panel violates its invariants (negative cells,
  /// non-consecutive years, shape mismatch).
  void validate() const;
};

/// One compositional part: which (age band, cause) pair a column of a
/// CompositionMatrix belongs to. After zero-omission the part list can
/// be a strict subset of the full age x cause grid.
struct Part {
  int age;    // index into age_labels
  int cause;  // index into cause_labels
};

/// T x P matrix of death densities; each row is a point on the simplex.
struct CompositionMatrix {
  Eigen::MatrixXd values;  // T x P, rows sum to 1
  std::vector<Part> parts;
  std::vector<int> year_labels;
  std::vector<std::string> age_labels;
  std::vector<std::string> cause_labels;

  int n_rows() const { return static_cast<int>(values.rows()); }
  int n_parts() const { return static_cast<int>(values.cols()); }

  std::string part_name(int p) const {
    return age_labels[parts[p].age] + "|" + cause_labels[parts[p].cause];
  }
};

using GeometricMeanVector = Eigen::VectorXd;  // strictly positive, length P

/// Flat part index for the full grid: p = u*C + c (cause runs faster).
inline int part_index(int u, int c, int n_causes) { return u * n_causes + c; }
inline std::pair<int, int> part_coords(int p, int n_causes) {
  return {p / n_causes, p % n_causes};
}

/// d[t][p] = counts[t][u][c] / (total deaths in year t).
CompositionMatrix build_composition(const DeathCountPanel& panel);

/// Normalizes a non-negative vector onto the simplex.
Eigen::VectorXd closure(const Eigen::VectorXd& v);

/// Simplex group operation: closure of the element-wise product.
Eigen::VectorXd perturb(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Element-wise ratio then closure. Zeros in x stay zero; zeros in y
/// are an error.
Eigen::VectorXd inverse_perturb(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Column-wise geometric mean, computed as exp(mean(log)). Requires
/// every entry strictly positive; callers resolve zeros first.
GeometricMeanVector compute_geometric_mean(const CompositionMatrix& m);

/// Centres each row by inverse perturbation of g.
CompositionMatrix center_rows(const CompositionMatrix& m, const GeometricMeanVector& g);

}  // namespace coda
