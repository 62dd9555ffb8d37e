#pragma once

/**
 * @file infinitesimal.hpp
 * @brief Local Lie group actions given by expressions, their generator
 *        matrices on frame bundles, and infinitesimal stabilizer dimensions.
 *
 * Group elements are parameterized by s in R^n with s = 0 the identity; the
 * parameter directions stand in for a basis of the Lie algebra.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jetprolong/errors.hpp"
#include "jetprolong/expression.hpp"
#include "jetprolong/frame_bundle.hpp"
#include "jetprolong/polymap.hpp"
#include "jetprolong/rank.hpp"
#include "jetprolong/taylor.hpp"

namespace jetprolong {

/// The hyperplane {x_coordinate = value}, a known measure-zero set of special orbits.
struct Exclusion {
  int coordinate = 0;
  double value = 0.0;
};

struct ActionSpec {
  std::string name;
  int group_dim = 0;
  int space_dim = 0;
  /// space_dim outputs over x1..xD and s1..sn.
  VectorExpression action;
  ChartedSpace space = ChartedSpace::euclidean(1);
  std::vector<Exclusion> exclusions;
};

inline constexpr double kIdentityTolerance = 1e-10;
inline constexpr int kIdentityCheckPoints = 50;

/// Default sampling box when the space is all of R^D.
inline constexpr double kDefaultSampleRadius = 2.0;

/// The box points are drawn from: the declared box, else [-2, 2]^D.
inline std::vector<Interval> sampling_box(const ActionSpec& a) {
  if (a.space.bounded()) return {a.space.intervals().begin(), a.space.intervals().end()};
  return std::vector<Interval>(static_cast<std::size_t>(a.space_dim), Interval{-kDefaultSampleRadius, kDefaultSampleRadius});
}

/// Value of the action at (s, x).
inline std::vector<double> act(const ActionSpec& a, std::span<const double> s, std::span<const double> x) {
  auto jet = taylor_of_expression(a.action, x, 0, s);
  return jet.value_at_base();
}

/// Structural checks plus a(0, x) = x at sample points (fixed internal seed).
inline void validate_action(const ActionSpec& a) {
  if (a.group_dim < 1) throw PreconditionError("action '" + a.name + "': group dimension must be positive");
  if (a.space_dim < 1) throw PreconditionError("action '" + a.name + "': space dimension must be positive");
  if (static_cast<int>(a.action.size()) != a.space_dim) {
    throw DimensionError("action '" + a.name + "': expected " + std::to_string(a.space_dim) + " output expressions, got " +
                         std::to_string(a.action.size()));
  }
  if (a.space.dim() != a.space_dim) throw DimensionError("action '" + a.name + "': domain dimension mismatch");
  for (const auto& e : a.action) {
    if (e.variable_arity() > a.space_dim) throw DimensionError("action '" + a.name + "' uses an undeclared space variable");
    if (e.parameter_arity() > a.group_dim) throw DimensionError("action '" + a.name + "' uses an undeclared group parameter");
  }
  for (const auto& ex : a.exclusions) {
    if (ex.coordinate < 0 || ex.coordinate >= a.space_dim) throw DimensionError("exclusion coordinate out of range");
  }
  std::mt19937_64 rng(0x5eed1d);
  auto box = sampling_box(a);
  std::vector<double> zero(static_cast<std::size_t>(a.group_dim), 0.0);
  std::vector<double> x(static_cast<std::size_t>(a.space_dim));
  for (int t = 0; t < kIdentityCheckPoints; ++t) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::uniform_real_distribution<double>(box[i].lo, box[i].hi)(rng);
    std::vector<double> y;
    try {
      y = act(a, zero, x);
    } catch (const DomainError&) {
      continue;  // outside the natural domain of the formula
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(std::abs(y[i] - x[i]) <= kIdentityTolerance)) {
        throw PreconditionError("action '" + a.name + "' is not the identity at s = 0 (component " + std::to_string(i + 1) +
                                " moves by " + std::to_string(y[i] - x[i]) + ")");
      }
    }
  }
}

/// The frame obtained by acting with the group element s on q.
inline FramePoint act_on_frame(const ActionSpec& a, std::span<const double> s, const FramePoint& q) {
  return FramePoint(evaluate_map(a.action, q.poly(), s));
}

namespace detail {

inline void require_frame(const ActionSpec& a, const FramePoint& q) {
  if (q.dim() != a.space_dim) throw DimensionError("frame dimension does not match the action's space");
}

/// Real parts of a nested map, validated as a frame (catches singular actions).
inline void check_image_frame(const PolyMap<Jet<double>>& image) {
  std::vector<Jet<double>> comps;
  comps.reserve(static_cast<std::size_t>(image.dim_out()));
  for (int e = 0; e < image.dim_out(); ++e) {
    const auto& src = image[static_cast<std::size_t>(e)];
    Jet<double> r(src.shape());
    for (std::size_t k = 0; k < src.size(); ++k) r[k] = real_part(src[k]);
    comps.push_back(std::move(r));
  }
  try {
    FramePoint check{PolyMap<double>(std::move(comps))};
    (void)check;
  } catch (const NotInvertibleError& e) {
    throw NotInvertibleError(std::string("action is singular at the frame: ") + e.what());
  }
}

inline double coefficient(const Jet<double>& x, std::size_t i) { return x.shaped() && i < x.size() ? x[i] : 0.0; }

}  // namespace detail

/// n x m matrix whose row i is d/ds_i at s = 0 of the frame coordinates of s . q.
inline Eigen::MatrixXd generator_matrix(const ActionSpec& a, const FramePoint& q) {
  detail::require_frame(a, q);
  using Nested = Jet<double>;
  const int n = a.group_dim;
  auto sshape = JetShape::make(n, 1, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<Nested> s;
  for (int i = 0; i < n; ++i) s.push_back(Nested::variable(sshape, i));
  auto image = evaluate_map<Nested>(a.action, lift<Nested>(q.poly()), s);
  detail::check_image_frame(image);
  auto coords = frame_coordinates(image);
  Eigen::MatrixXd g(n, static_cast<Eigen::Index>(coords.size()));
  for (int i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < coords.size(); ++c) {
      g(i, static_cast<Eigen::Index>(c)) = detail::coefficient(coords[c], static_cast<std::size_t>(1 + i));
    }
  }
  return g;
}

struct StabilizerResult {
  int rank = 0;
  int stab_dim = 0;
  RankDecision decision;
};

inline StabilizerResult stabilizer(const ActionSpec& a, const FramePoint& q, double tol = kDefaultRankTolerance) {
  StabilizerResult r;
  r.decision = numerical_rank_decision(generator_matrix(a, q), tol);
  r.rank = r.decision.rank;
  r.stab_dim = a.group_dim - r.rank;
  return r;
}

inline int stab_dim(const ActionSpec& a, const FramePoint& q, double tol = kDefaultRankTolerance) {
  return stabilizer(a, q, tol).stab_dim;
}

/// Columns span the parameter directions s with s^T G = 0.
inline Eigen::MatrixXd stabilizer_kernel(const ActionSpec& a, const FramePoint& q, double tol = kDefaultRankTolerance) {
  return null_space(generator_matrix(a, q).transpose(), tol);
}

/**
 * Matrix whose kernel is the first-order stabilizer algebra at q.
 *
 * A generator fixes a frame of the tangent space at q exactly when it fixes
 * q and its linearization at q vanishes. Row i holds d/ds_i of the frame
 * coordinates followed by d/ds_i of their Jacobian in the frame coordinates.
 */
inline Eigen::MatrixXd first_order_matrix(const ActionSpec& a, const FramePoint& q) {
  detail::require_frame(a, q);
  using Nested = Jet<double>;
  const int n = a.group_dim;
  const int d = q.dim();
  const int j = q.order();
  const std::vector<double> base = q.coordinates();
  const int m = static_cast<int>(base.size());
  auto shape = JetShape::make(n + m, 2, std::vector<double>(static_cast<std::size_t>(n + m), 0.0));
  std::vector<Nested> s;
  for (int i = 0; i < n; ++i) s.push_back(Nested::variable(shape, i));
  std::vector<Nested> moving;
  for (int c = 0; c < m; ++c) moving.push_back(Nested::variable(shape, n + c) + Nested::constant(base[static_cast<std::size_t>(c)]));
  auto frame = frame_from_coordinates<Nested>(moving, d, j);
  auto image = evaluate_map<Nested>(a.action, frame, s);
  auto coords = frame_coordinates(image);
  const Basis& basis = *shape->basis;
  Eigen::MatrixXd out(n, m + m * m);
  for (int i = 0; i < n; ++i) {
    const MultiIndex ei = MultiIndex::unit(n + m, i);
    for (int r = 0; r < m; ++r) {
      const auto& cr = coords[static_cast<std::size_t>(r)];
      out(i, r) = detail::coefficient(cr, basis.index_of(ei));
      for (int c = 0; c < m; ++c) {
        out(i, m + r * m + c) = detail::coefficient(cr, basis.index_of(ei + MultiIndex::unit(n + m, n + c)));
      }
    }
  }
  return out;
}

inline int first_order_stab_dim(const ActionSpec& a, const FramePoint& q, double tol = kDefaultRankTolerance) {
  return a.group_dim - numerical_rank(first_order_matrix(a, q), tol);
}

namespace detail {

/// Exact rank of a small integer matrix by fraction-free elimination.
inline int exact_integer_rank(std::vector<std::vector<__int128>> m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  std::size_t rank = 0;
  __int128 prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t k = c + 1; k < cols; ++k) m[i][k] = (m[rank][c] * m[i][k] - m[i][c] * m[rank][k]) / prev;
      m[i][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return static_cast<int>(rank);
}

}  // namespace detail

/**
 * Stabilizer dimension of the polynomial-shear family at level j over a point
 * with first coordinate x0, from the conditions f^(a)(x0) = 0 for a = 0..j
 * on f(x) = s1 x + ... + sn x^n.
 */
inline int closed_form_stab_dim_example(int n, int j, double x0) {
  if (n < 1 || j < 0) throw PreconditionError("closed_form_stab_dim_example requires n >= 1 and j >= 0");
  if (x0 == 0.0) {
    // Only the entries a! at l = a >= 1 survive.
    return n - std::min(j, n);
  }
  // Scaling column l by x0^l and row a by x0^-a leaves the falling factorials l(l-1)...(l-a+1).
  std::vector<std::vector<__int128>> m(static_cast<std::size_t>(j + 1), std::vector<__int128>(static_cast<std::size_t>(n), 0));
  for (int row = 0; row <= j; ++row) {
    for (int l = 1; l <= n; ++l) {
      __int128 v = 1;
      for (int t = 0; t < row; ++t) v *= (l - t);
      m[static_cast<std::size_t>(row)][static_cast<std::size_t>(l - 1)] = v;
    }
  }
  return n - detail::exact_integer_rank(std::move(m));
}

}  // namespace jetprolong
