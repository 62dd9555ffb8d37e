#pragma once

/**
 * @file rank.hpp
 * @brief Numerical rank by row reduction with partial pivoting, and a
 *        null-space basis from the same elimination.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace jetprolong {

inline constexpr double kDefaultRankTolerance = 1e-8;

struct RankDecision {
  int rank = 0;
  /// Absolute pivot threshold: tol * max |a_ij|.
  double threshold = 0.0;
  /// Smallest pivot that counted, if any.
  std::optional<double> smallest_accepted;
  /// Largest candidate pivot that was rejected, if elimination stopped early.
  std::optional<double> largest_rejected;
  /// Reduced row echelon form (pivot rows normalized) and pivot columns.
  Eigen::MatrixXd rref;
  std::vector<int> pivot_columns;
};

/// Column-wise Gaussian elimination; a pivot counts if |pivot| > tol * max|A|.
inline RankDecision numerical_rank_decision(const Eigen::MatrixXd& a, double tol = kDefaultRankTolerance) {
  RankDecision out;
  Eigen::MatrixXd r = a;
  const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  out.threshold = tol * scale;
  const Eigen::Index rows = r.rows();
  const Eigen::Index cols = r.cols();
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < cols && row < rows; ++c) {
    Eigen::Index best = row;
    for (Eigen::Index i = row + 1; i < rows; ++i) {
      if (std::abs(r(i, c)) > std::abs(r(best, c))) best = i;
    }
    const double p = std::abs(r(best, c));
    if (!(p > out.threshold) || scale == 0.0) {
      if (p > 0.0) out.largest_rejected = std::max(out.largest_rejected.value_or(0.0), p);
      // Treat the column as dependent; flush it below the current row.
      for (Eigen::Index i = row; i < rows; ++i) r(i, c) = 0.0;
      continue;
    }
    out.smallest_accepted = std::min(out.smallest_accepted.value_or(p), p);
    r.row(row).swap(r.row(best));
    r.row(row) /= r(row, c);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i != row && r(i, c) != 0.0) r.row(i) -= r(i, c) * r.row(row);
    }
    out.pivot_columns.push_back(static_cast<int>(c));
    ++row;
  }
  out.rank = static_cast<int>(row);
  out.rref = std::move(r);
  return out;
}

inline int numerical_rank(const Eigen::MatrixXd& a, double tol = kDefaultRankTolerance) {
  return numerical_rank_decision(a, tol).rank;
}

/// Basis of {x : A x = 0} (columns), consistent with `numerical_rank` at `tol`.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol = kDefaultRankTolerance) {
  RankDecision dec = numerical_rank_decision(a, tol);
  const Eigen::Index cols = a.cols();
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : dec.pivot_columns) is_pivot[static_cast<std::size_t>(c)] = true;
  Eigen::MatrixXd basis(cols, cols - dec.rank);
  Eigen::Index k = 0;
  for (Eigen::Index free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(cols);
    v(free) = 1.0;
    for (std::size_t p = 0; p < dec.pivot_columns.size(); ++p) {
      v(dec.pivot_columns[p]) = -dec.rref(static_cast<Eigen::Index>(p), free);
    }
    basis.col(k++) = v;
  }
  return basis;
}

}  // namespace jetprolong
