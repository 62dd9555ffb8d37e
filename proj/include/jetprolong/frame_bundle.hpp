#pragma once

/**
 * @file frame_bundle.hpp
 * @brief Points of the order-j frame bundle of an open subset of R^D, the
 *        right jet-group action, prolongation of local diffeomorphisms, the
 *        induced maps on polynomial spaces, and the embedding of F^{i+j}X
 *        into F^i(F^j X).
 *
 * A frame of order j is stored as the j-jet at 0 of a reverse chart
 * lambda: R^D -> M, i.e. a PolyMap R^D -> R^D expanded about the origin.
 *
 * Chart coordinates on F^j R^D flatten the coefficients multi-index major,
 * component minor, in graded lexicographic order: the first D entries are
 * the base point, the next D*D the linear part, and so on. The order-j
 * coordinates are therefore a prefix of the order-(j+1) ones.
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/expression.hpp"
#include "jetprolong/jet_group.hpp"
#include "jetprolong/multiindex.hpp"
#include "jetprolong/polymap.hpp"
#include "jetprolong/taylor.hpp"

namespace jetprolong {

struct Interval {
  double lo;
  double hi;
};

/// An open subset of R^D: either all of it or an open box.
class ChartedSpace {
 public:
  static ChartedSpace euclidean(int dim) {
    if (dim < 1) throw DimensionError("space dimension must be positive");
    ChartedSpace s;
    s.dim_ = dim;
    return s;
  }

  static ChartedSpace box(std::vector<Interval> box) {
    if (box.empty()) throw DimensionError("space dimension must be positive");
    for (const auto& iv : box) {
      if (!(iv.lo < iv.hi)) throw PreconditionError("box intervals must satisfy lo < hi");
    }
    ChartedSpace s;
    s.dim_ = static_cast<int>(box.size());
    s.box_ = std::move(box);
    return s;
  }

  int dim() const noexcept { return dim_; }
  bool bounded() const noexcept { return !box_.empty(); }
  std::span<const Interval> intervals() const noexcept { return box_; }

  bool contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) return false;
    if (box_.empty()) return true;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(box_[i].lo < p[i] && p[i] < box_[i].hi)) return false;
    }
    return true;
  }

 private:
  int dim_ = 0;
  std::vector<Interval> box_;
};

/// kappa: coefficients multi-index major, component minor.
template <class T>
std::vector<T> frame_coordinates(const PolyMap<T>& p) {
  std::vector<T> out;
  const std::size_t n = p[0].size();
  out.reserve(n * static_cast<std::size_t>(p.dim_out()));
  for (std::size_t a = 0; a < n; ++a) {
    for (int e = 0; e < p.dim_out(); ++e) out.push_back(p[static_cast<std::size_t>(e)][a]);
  }
  return out;
}

/// Number of chart coordinates on F^j R^d: d * C(d+j, j).
inline std::size_t frame_coordinate_count(int d, int j) {
  return static_cast<std::size_t>(d) * count_multi_indices(d, j);
}

/// Inverse of `frame_coordinates` for maps R^d -> R^d about the origin.
template <class T>
PolyMap<T> frame_from_coordinates(std::span<const T> coords, int d, int j) {
  if (coords.size() != frame_coordinate_count(d, j)) {
    throw DimensionError("expected " + std::to_string(frame_coordinate_count(d, j)) + " frame coordinates, got " +
                         std::to_string(coords.size()));
  }
  auto shape = JetShape::make(d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<Jet<T>> comps(static_cast<std::size_t>(d), Jet<T>(shape));
  std::size_t c = 0;
  for (std::size_t a = 0; a < shape->basis->size(); ++a) {
    for (int e = 0; e < d; ++e) comps[static_cast<std::size_t>(e)][a] = coords[c++];
  }
  return PolyMap<T>(std::move(comps));
}

/// The j-jet at 0 of a reverse chart.
class FramePoint {
 public:
  /// Validates: square, expanded about 0, and (for j >= 1) |det lin| > kDetThreshold.
  explicit FramePoint(PolyMap<double> poly) : poly_(std::move(poly)) {
    if (poly_.dim_in() != poly_.dim_out()) throw DimensionError("frames are jets of square maps");
    for (double b : poly_.base_point()) {
      if (b != 0.0) throw AlignmentError("frames are jets at the parameter origin");
    }
    if (poly_.order() >= 1) {
      double det = det_linear(poly_);
      if (!(std::abs(det) > kDetThreshold)) {
        throw NotInvertibleError("degenerate frame: |det| of linear part = " + std::to_string(std::abs(det)));
      }
    }
  }

  /// Validates additionally that the base point lies in `space`.
  FramePoint(PolyMap<double> poly, const ChartedSpace& space) : FramePoint(std::move(poly)) {
    if (!space.contains(base_point())) throw DomainError("frame base point lies outside the chart domain");
  }

  static FramePoint from_coordinates(std::span<const double> coords, int d, int j) {
    return FramePoint(frame_from_coordinates<double>(coords, d, j));
  }

  /// Jet of the translated identity chart t -> p + t.
  static FramePoint identity_at(std::span<const double> p, int j) {
    auto poly = PolyMap<double>::identity(static_cast<int>(p.size()), j, std::vector<double>(p.size(), 0.0));
    for (std::size_t i = 0; i < p.size(); ++i) poly[i][0] = p[i];
    return FramePoint(std::move(poly));
  }

  const PolyMap<double>& poly() const noexcept { return poly_; }
  int dim() const { return poly_.dim_in(); }
  int order() const { return poly_.order(); }
  std::vector<double> base_point() const { return poly_.value_at_base(); }
  std::vector<double> coordinates() const { return frame_coordinates(poly_); }

  FramePoint truncated(int j) const { return FramePoint(poly_.truncated(j)); }

 private:
  PolyMap<double> poly_;
};

/// Projection to M.
inline std::vector<double> base_point(const FramePoint& q) { return q.base_point(); }

/// q h: jet of lambda o eta. The base point is unchanged because eta(0) = 0.
inline FramePoint right_action(const FramePoint& q, const JetGroupElement& h) {
  if (q.dim() != h.dim() || q.order() != h.order()) throw DimensionError("right_action: dimension or order mismatch");
  return FramePoint(compose(q.poly(), h.poly()));
}

/// (F^j f)(q) for f given by expressions: the j-jet at 0 of f o lambda.
inline FramePoint prolong_map(const VectorExpression& f, const FramePoint& q,
                              const std::optional<ChartedSpace>& domain = std::nullopt) {
  if (static_cast<int>(f.size()) != q.dim()) throw DimensionError("prolong_map: f must map R^D to R^D");
  if (domain && !domain->contains(q.base_point())) throw DomainError("prolong_map: base point outside the domain of f");
  PolyMap<double> image = evaluate_map(f, q.poly());
  try {
    return FramePoint(std::move(image));
  } catch (const NotInvertibleError& e) {
    throw NotInvertibleError(std::string("prolong_map: f is not a local diffeomorphism at the base point (") +
                             e.what() + ")");
  }
}

inline FramePoint prolong_map(const VectorExpression& f, const FramePoint& q, int j) {
  if (j > q.order()) throw DimensionError("prolong_map: requested order exceeds the frame order");
  return prolong_map(f, j == q.order() ? q : q.truncated(j));
}

/// (F^j f)(q) for f given as a jet expanded about base_point(q) with order >= j.
inline FramePoint prolong_map(const PolyMap<double>& f, const FramePoint& q) {
  try {
    return FramePoint(compose(f, q.poly()));
  } catch (const NotInvertibleError& e) {
    throw NotInvertibleError(std::string("prolong_map: f is not a local diffeomorphism at the base point (") +
                             e.what() + ")");
  }
}

/// omega_*(P) = Tay_0^j(omega o P) for P in the space of degree-<=j polynomial maps.
inline PolyMap<double> push_star(const VectorExpression& omega, const PolyMap<double>& p) {
  return evaluate_map(omega, p);
}

inline PolyMap<double> push_star(const PolyMap<double>& omega, const PolyMap<double>& p) { return compose(omega, p); }

namespace detail {

/// Jet<double> seeds t_0..t_{m-1} about 0 truncated at `order`.
inline std::vector<Jet<double>> coordinate_seeds(std::size_t m, int order) {
  auto shape = JetShape::make(static_cast<int>(m), order, std::vector<double>(m, 0.0));
  std::vector<Jet<double>> t;
  t.reserve(m);
  for (std::size_t c = 0; c < m; ++c) t.push_back(Jet<double>::variable(shape, static_cast<int>(c)));
  return t;
}

/// Pack m nested scalars (order-`order` jets in t about 0) as a PolyMap R^m -> R^m about `base`.
inline PolyMap<double> pack_coordinate_jets(const std::vector<Jet<double>>& coords, int order, std::span<const double> base) {
  const int m = static_cast<int>(coords.size());
  auto shape = JetShape::make(m, order, std::vector<double>(base.begin(), base.end()));
  std::vector<Jet<double>> comps;
  comps.reserve(coords.size());
  for (const auto& c : coords) {
    Jet<double> r(shape);
    if (c.shaped()) {
      if (c.dim() != m || c.order() != order) throw DimensionError("coordinate jet has the wrong shape");
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = c[i];
    } else {
      r[0] = c.constant_term();
    }
    comps.push_back(std::move(r));
  }
  return PolyMap<double>(std::move(comps));
}

}  // namespace detail

/**
 * The i-jet at Q of the induced map P -> Tay_0^j(f o P) in frame coordinates.
 *
 * The result is a PolyMap R^m -> R^m (m = D * C(D+j, j)) expanded about the
 * coordinates of Q. Computed exactly by evaluating f on Q + sum_c t_c e_c with
 * coefficients that are order-i jets in t.
 */
inline PolyMap<double> induced_map_jet(const VectorExpression& f, const PolyMap<double>& q, int i) {
  if (q.dim_in() != q.dim_out() || static_cast<int>(f.size()) != q.dim_out()) {
    throw DimensionError("induced_map_jet: f and Q must be maps R^D -> R^D");
  }
  using Nested = Jet<double>;
  const int d = q.dim_in();
  const int j = q.order();
  std::vector<double> base = frame_coordinates(q);
  auto t = detail::coordinate_seeds(base.size(), i);
  std::vector<Nested> moving;
  moving.reserve(base.size());
  for (std::size_t c = 0; c < base.size(); ++c) moving.push_back(t[c] + Nested::constant(base[c]));
  auto p = frame_from_coordinates<Nested>(moving, d, j);
  auto image = evaluate_map(f, p);
  return detail::pack_coordinate_jets(frame_coordinates(image), i, base);
}

/// i-jet of F^j f at q in frame coordinates (the coordinate form of F^j f near q).
inline PolyMap<double> prolonged_map_jet(const VectorExpression& f, const FramePoint& q, int i) {
  return induced_map_jet(f, q.poly(), i);
}

/**
 * Phi: F^{i+j}X -> F^i(F^j X).
 *
 * Given the (i+j)-jet of a reverse chart lambda, returns the i-jet at 0_m of
 * t -> B(F^j lambda (R(t))) where R(t) is the order-j frame whose
 * coordinates are C(q0) + t, q0 the identity frame at 0, and
 * B = C - C(q0). The result is a frame on the m-dimensional chart space.
 */
inline FramePoint iterated_embed(const FramePoint& lambda_jet, int i, int j) {
  if (i < 0 || j < 0) throw DimensionError("iterated_embed: orders must be non-negative");
  if (lambda_jet.order() != i + j) {
    throw DimensionError("iterated_embed: expected a jet of order i + j = " + std::to_string(i + j));
  }
  using Nested = Jet<double>;
  const int d = lambda_jet.dim();
  const std::size_t m = frame_coordinate_count(d, j);
  std::vector<double> q0 = frame_coordinates(PolyMap<double>::identity(d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0)));
  auto t = detail::coordinate_seeds(m, i);
  std::vector<Nested> moving;
  moving.reserve(m);
  for (std::size_t c = 0; c < m; ++c) moving.push_back(t[c] + Nested::constant(q0[c]));
  auto chart = frame_from_coordinates<Nested>(moving, d, j);
  // lambda's jet is a polynomial; substituting the moving frame is exact in
  // the bi-degree (<= j in the frame variable, <= i in t).
  auto image = substitute(lift<Nested>(lambda_jet.poly()), chart);
  auto coords = frame_coordinates(image);
  for (std::size_t c = 0; c < m; ++c) coords[c] -= Nested::constant(q0[c]);
  return FramePoint(detail::pack_coordinate_jets(coords, i, std::vector<double>(m, 0.0)));
}

/**
 * F^i(F^j f) applied to a frame Q on the chart space of F^j M (chart B).
 *
 * Q is an order-i frame R^m -> R^m; the result is the order-i jet of
 * t -> B(F^j f (B^{-1}(Q(t)))).
 */
inline FramePoint prolong_on_frame_bundle(const VectorExpression& f, const FramePoint& big_q, int d, int j) {
  using Nested = Jet<double>;
  const std::size_t m = frame_coordinate_count(d, j);
  if (static_cast<std::size_t>(big_q.dim()) != m) throw DimensionError("prolong_on_frame_bundle: frame dimension mismatch");
  std::vector<double> q0 = frame_coordinates(PolyMap<double>::identity(d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0)));
  std::vector<Nested> moving;
  moving.reserve(m);
  for (std::size_t c = 0; c < m; ++c) moving.push_back(big_q.poly()[c] + Nested::constant(q0[c]));
  auto frame = frame_from_coordinates<Nested>(moving, d, j);
  auto image = evaluate_map(f, frame);
  auto coords = frame_coordinates(image);
  for (std::size_t c = 0; c < m; ++c) coords[c] -= Nested::constant(q0[c]);
  return FramePoint(detail::pack_coordinate_jets(coords, big_q.order(), std::vector<double>(m, 0.0)));
}

}  // namespace jetprolong
