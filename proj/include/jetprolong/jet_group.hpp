#pragma once

/**
 * @file jet_group.hpp
 * @brief The jet group of origin-preserving invertible j-jets of maps
 *        R^d -> R^d, multiplied by truncated composition.
 */

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/multiindex.hpp"
#include "jetprolong/polymap.hpp"

namespace jetprolong {

/// Determinant threshold separating valid group elements and frames from degenerate ones.
inline constexpr double kDetThreshold = 1e-12;

class JetGroupElement {
 public:
  /// Validates: expanded about 0, square, order >= 1, |det lin| > kDetThreshold.
  /// The constant term is zeroed exactly.
  explicit JetGroupElement(PolyMap<double> poly) : poly_(std::move(poly)) {
    if (poly_.dim_in() != poly_.dim_out()) throw DimensionError("jet group elements are square maps");
    if (poly_.order() < 1) throw DimensionError("jet group elements need order >= 1");
    for (double b : poly_.base_point()) {
      if (b != 0.0) throw AlignmentError("jet group elements are expanded about the origin");
    }
    for (int i = 0; i < poly_.dim_out(); ++i) poly_[static_cast<std::size_t>(i)][0] = 0.0;
    double det = det_linear(poly_);
    if (!(std::abs(det) > kDetThreshold)) {
      throw NotInvertibleError("jet group element has singular linear part (|det| = " + std::to_string(std::abs(det)) +
                               ")");
    }
  }

  static JetGroupElement identity(int d, int j) {
    return JetGroupElement(PolyMap<double>::identity(d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0)));
  }

  /// Element with chart coordinates `coords` (graded-lex flattening, constant term omitted).
  static JetGroupElement from_chart(std::span<const double> coords, int d, int j);

  const PolyMap<double>& poly() const noexcept { return poly_; }
  int dim() const { return poly_.dim_in(); }
  int order() const { return poly_.order(); }

  /// Chart coordinates: coefficients of degree 1..j, multi-index major, component minor.
  std::vector<double> chart() const {
    std::vector<double> out;
    const std::size_t n = poly_[0].size();
    for (std::size_t a = 1; a < n; ++a) {
      for (int e = 0; e < dim(); ++e) out.push_back(poly_[static_cast<std::size_t>(e)][a]);
    }
    return out;
  }

 private:
  PolyMap<double> poly_;
};

/// d * (C(d+j, j) - 1): the dimension of the jet group.
inline std::size_t group_dim(int d, int j) {
  if (d < 1 || j < 1) throw DimensionError("group_dim requires d >= 1 and j >= 1");
  return static_cast<std::size_t>(d) * (count_multi_indices(d, j) - 1);
}

inline JetGroupElement JetGroupElement::from_chart(std::span<const double> coords, int d, int j) {
  if (coords.size() != group_dim(d, j)) throw DimensionError("chart coordinate count does not match group_dim");
  auto poly = PolyMap<double>::zero(d, d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::size_t c = 0;
  for (std::size_t a = 1; a < poly[0].size(); ++a) {
    for (int e = 0; e < d; ++e) poly[static_cast<std::size_t>(e)][a] = coords[c++];
  }
  return JetGroupElement(std::move(poly));
}

inline JetGroupElement group_mul(const JetGroupElement& a, const JetGroupElement& b) {
  if (a.dim() != b.dim() || a.order() != b.order()) throw DimensionError("group_mul: dimension or order mismatch");
  return JetGroupElement(compose(a.poly(), b.poly()));
}

inline JetGroupElement group_inv(const JetGroupElement& a) { return JetGroupElement(invert_jet(a.poly())); }

}  // namespace jetprolong
