#pragma once

/**
 * @file polymap.hpp
 * @brief Truncated polynomial maps R^d -> R^e and the operations on them:
 *        composition, compositional inversion, agreement to order k, Taylor
 *        shift to a new base point, and the linear part.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/jet.hpp"
#include "jetprolong/multiindex.hpp"

namespace jetprolong {

/// Default absolute tolerance for agreement and base-point alignment.
inline constexpr double kAgreementTolerance = 1e-9;

/// e jets sharing one shape: a polynomial map truncated at a common order.
template <class T = double>
class PolyMap {
 public:
  PolyMap() = default;

  explicit PolyMap(std::vector<Jet<T>> components) : comps_(std::move(components)) {
    if (comps_.empty()) throw DimensionError("a PolyMap needs at least one component");
    const auto* shaped = static_cast<const Jet<T>*>(nullptr);
    for (const auto& c : comps_) {
      if (c.shaped()) {
        shaped = &c;
        break;
      }
    }
    if (!shaped) throw DimensionError("a PolyMap needs at least one shaped component to fix d, k and the base point");
    auto shape = shaped->shape();
    for (auto& c : comps_) c = c.with_shape(shape);
  }

  /// x -> x about `base`, truncated at `order`.
  static PolyMap identity(int dim, int order, std::vector<double> base) {
    auto shape = JetShape::make(dim, order, std::move(base));
    std::vector<Jet<T>> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) comps.push_back(Jet<T>::variable(shape, i));
    return PolyMap(std::move(comps));
  }

  static PolyMap zero(int dim_in, int dim_out, int order, std::vector<double> base) {
    auto shape = JetShape::make(dim_in, order, std::move(base));
    return PolyMap(std::vector<Jet<T>>(static_cast<std::size_t>(dim_out), Jet<T>(shape)));
  }

  int dim_in() const { return comps_.front().dim(); }
  int dim_out() const { return static_cast<int>(comps_.size()); }
  int order() const { return comps_.front().order(); }
  std::span<const double> base_point() const { return comps_.front().base_point(); }
  const std::shared_ptr<const JetShape>& shape() const { return comps_.front().shape(); }

  const Jet<T>& operator[](std::size_t i) const { return comps_[i]; }
  Jet<T>& operator[](std::size_t i) { return comps_[i]; }
  std::span<const Jet<T>> components() const noexcept { return comps_; }

  std::vector<T> value_at_base() const {
    std::vector<T> v;
    v.reserve(comps_.size());
    for (const auto& c : comps_) v.push_back(c.constant_term());
    return v;
  }

  PolyMap truncated(int k) const {
    std::vector<Jet<T>> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.truncated(k));
    return PolyMap(std::move(out));
  }

  PolyMap& operator+=(const PolyMap& o) {
    check_same_outputs(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  PolyMap& operator-=(const PolyMap& o) {
    check_same_outputs(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  friend PolyMap operator+(PolyMap a, const PolyMap& b) { return a += b; }
  friend PolyMap operator-(PolyMap a, const PolyMap& b) { return a -= b; }

  PolyMap scaled(double c) const {
    PolyMap r = *this;
    for (auto& x : r.comps_) x = x.scaled(c);
    return r;
  }

 private:
  void check_same_outputs(const PolyMap& o) const {
    if (o.comps_.size() != comps_.size()) throw DimensionError("PolyMap output dimension mismatch");
  }

  std::vector<Jet<T>> comps_;
};

/// Degree-1 coefficients as an e x d matrix.
inline Eigen::MatrixXd linear_part(const PolyMap<double>& p) {
  if (p.order() < 1) throw DimensionError("linear_part requires order >= 1");
  Eigen::MatrixXd a(p.dim_out(), p.dim_in());
  for (int r = 0; r < p.dim_out(); ++r) {
    for (int c = 0; c < p.dim_in(); ++c) a(r, c) = p[static_cast<std::size_t>(r)][static_cast<std::size_t>(1 + c)];
  }
  return a;
}

inline double det_linear(const PolyMap<double>& p) {
  if (p.dim_in() != p.dim_out()) throw DimensionError("det_linear requires a square map");
  return linear_part(p).determinant();
}

/**
 * Substitutes `inner` into the polynomial `outer` and truncates at inner's
 * order: sum_alpha c_alpha (inner - b)^alpha over every alpha of `outer`,
 * where b is outer's base point.
 *
 * No alignment is required: `outer` is treated as the exact polynomial its
 * coefficients define. This is what evaluating a known polynomial jet along
 * a moving point needs (inner's constant term may carry nested
 * infinitesimals).
 */
template <class T>
PolyMap<T> substitute(const PolyMap<T>& outer, const PolyMap<T>& inner) {
  if (inner.dim_out() != outer.dim_in()) {
    throw DimensionError("inner output dimension " + std::to_string(inner.dim_out()) +
                         " != outer input dimension " + std::to_string(outer.dim_in()));
  }
  const auto& shape = inner.shape();
  const auto b = outer.base_point();
  std::vector<Jet<T>> shifted;
  shifted.reserve(static_cast<std::size_t>(inner.dim_out()));
  for (int i = 0; i < inner.dim_out(); ++i) {
    Jet<T> c = inner[static_cast<std::size_t>(i)];
    c[0] -= from_real<T>(b[static_cast<std::size_t>(i)]);
    shifted.push_back(std::move(c));
  }

  // (inner - b)^alpha for every alpha of outer, built from predecessors.
  const Basis& outer_basis = outer[0].basis();
  std::vector<Jet<T>> mono;
  mono.reserve(outer_basis.size());
  mono.push_back(Jet<T>::constant(shape, from_real<T>(1.0)));
  for (std::size_t a = 1; a < outer_basis.size(); ++a) {
    auto [prev, v] = outer_basis.predecessor(a);
    mono.push_back(mono[prev] * shifted[static_cast<std::size_t>(v)]);
  }

  std::vector<Jet<T>> out;
  out.reserve(static_cast<std::size_t>(outer.dim_out()));
  for (int e = 0; e < outer.dim_out(); ++e) {
    const auto& oc = outer[static_cast<std::size_t>(e)];
    Jet<T> acc(shape);
    for (std::size_t a = 0; a < mono.size(); ++a) {
      if (is_zero(oc[a])) continue;
      acc += mono[a] * oc[a];
    }
    out.push_back(std::move(acc));
  }
  return PolyMap<T>(std::move(out));
}

/**
 * Order-k truncation of outer o inner, expanded about inner's base point.
 *
 * `outer` must be expanded where `inner` lands: its base point equals
 * inner's value at its base (real parts, within `tol`). The shifted inner
 * components then have no constant term, so the powers (inner - b)^alpha
 * vanish beyond degree k and truncating `outer` at k first is exact.
 */
template <class T>
PolyMap<T> compose(const PolyMap<T>& outer, const PolyMap<T>& inner, double tol = kAgreementTolerance) {
  if (inner.dim_out() != outer.dim_in()) {
    throw DimensionError("compose: inner output dimension " + std::to_string(inner.dim_out()) +
                         " != outer input dimension " + std::to_string(outer.dim_in()));
  }
  if (outer.order() < inner.order()) throw DimensionError("compose: outer order is below inner order");
  const auto b = outer.base_point();
  for (int i = 0; i < inner.dim_out(); ++i) {
    double v = real_part(inner[static_cast<std::size_t>(i)].constant_term());
    if (std::abs(v - b[static_cast<std::size_t>(i)]) > tol) {
      throw AlignmentError("compose: outer is expanded about " + std::to_string(b[static_cast<std::size_t>(i)]) +
                           " but inner lands at " + std::to_string(v) + " (coordinate " + std::to_string(i) + ")");
    }
  }
  if (outer.order() == inner.order()) return substitute(outer, inner);
  return substitute(outer.truncated(inner.order()), inner);
}

/// Apply a constant matrix to the outputs: (A p)_r = sum_c A(r,c) p_c.
inline PolyMap<double> apply_linear(const Eigen::MatrixXd& a, const PolyMap<double>& p) {
  if (a.cols() != p.dim_out()) throw DimensionError("apply_linear: matrix width mismatch");
  std::vector<Jet<double>> out;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    Jet<double> acc(p.shape());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a(r, c) != 0.0) acc += p[static_cast<std::size_t>(c)].scaled(a(r, c));
    }
    out.push_back(std::move(acc));
  }
  return PolyMap<double>(std::move(out));
}

/**
 * Compositional inverse of a square map with invertible linear part.
 *
 * For eta(x) = y0 + A (x - x0) + N(x - x0), with N collecting degrees >= 2,
 * the inverse about y0 satisfies theta = x0 + A^{-1}((y - y0) - N(theta - x0)).
 * Starting from the linear inverse, each pass of this fixed-point map fixes
 * one more degree, so k - 1 passes give the exact order-k inverse.
 */
inline PolyMap<double> invert_jet(const PolyMap<double>& eta, double det_tol = 1e-12) {
  if (eta.dim_in() != eta.dim_out()) throw DimensionError("invert_jet requires a square map");
  const int d = eta.dim_in();
  const int k = eta.order();
  std::vector<double> x0(eta.base_point().begin(), eta.base_point().end());
  std::vector<double> y0 = eta.value_at_base();
  if (k == 0) {
    std::vector<Jet<double>> comps;
    auto shape = JetShape::make(d, 0, y0);
    for (int i = 0; i < d; ++i) comps.push_back(Jet<double>::constant(shape, x0[static_cast<std::size_t>(i)]));
    return PolyMap<double>(std::move(comps));
  }
  Eigen::MatrixXd a = linear_part(eta);
  double det = a.determinant();
  if (!(std::abs(det) > det_tol)) {
    throw NotInvertibleError("invert_jet: linear part is singular (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  Eigen::MatrixXd a_inv = a.inverse();

  // Nonlinear remainder N about x0 (degrees >= 2 only).
  PolyMap<double> nonlinear = eta;
  for (int i = 0; i < d; ++i) {
    auto& c = nonlinear[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < c.basis().degree_begin(2); ++t) c[t] = 0.0;
  }
  // y - y0 about y0.
  PolyMap<double> dy = PolyMap<double>::identity(d, k, y0);
  for (int i = 0; i < d; ++i) dy[static_cast<std::size_t>(i)][0] = 0.0;

  auto with_offset = [&](PolyMap<double> p) {
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)][0] += x0[static_cast<std::size_t>(i)];
    return p;
  };
  PolyMap<double> theta = with_offset(apply_linear(a_inv, dy));
  for (int pass = 1; pass < k; ++pass) {
    // N is expanded about x0 and theta lands at x0, so compose is aligned.
    PolyMap<double> n_theta = compose(nonlinear, theta);
    for (int i = 0; i < d; ++i) n_theta[static_cast<std::size_t>(i)][0] = 0.0;
    theta = with_offset(apply_linear(a_inv, dy - n_theta));
  }
  return theta;
}

/// f ~ g to order k: same base point and every coefficient of degree <= k within tol.
inline bool jets_agree(const PolyMap<double>& f, const PolyMap<double>& g, int k, double tol = kAgreementTolerance) {
  if (f.dim_in() != g.dim_in() || f.dim_out() != g.dim_out()) throw DimensionError("jets_agree: dimension mismatch");
  if (f.order() < k || g.order() < k) throw DimensionError("jets_agree: both jets must have order >= k");
  auto fb = f.base_point();
  auto gb = g.base_point();
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (std::abs(fb[i] - gb[i]) > tol) throw AlignmentError("jets_agree: base points differ");
  }
  const std::size_t n = count_multi_indices(f.dim_in(), k);
  for (int e = 0; e < f.dim_out(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::abs(f[static_cast<std::size_t>(e)][i] - g[static_cast<std::size_t>(e)][i]) <= tol)) return false;
    }
  }
  return true;
}

/// Largest coefficient difference over all degrees <= k.
inline double max_coefficient_gap(const PolyMap<double>& f, const PolyMap<double>& g, int k) {
  if (f.dim_out() != g.dim_out() || f.dim_in() != g.dim_in()) throw DimensionError("coefficient gap: dimension mismatch");
  if (f.order() < k || g.order() < k) throw DimensionError("coefficient gap: both jets must have order >= k");
  const std::size_t n = count_multi_indices(f.dim_in(), k);
  double gap = 0.0;
  for (int e = 0; e < f.dim_out(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      gap = std::max(gap, std::abs(f[static_cast<std::size_t>(e)][i] - g[static_cast<std::size_t>(e)][i]));
    }
  }
  return gap;
}

/**
 * The same polynomial re-expanded about `new_base`. With w = new_base - base,
 * the coefficient of (x - new_base)^rho is sum_{sigma >= rho} c_sigma
 * binom(sigma, rho) w^(sigma - rho).
 */
inline PolyMap<double> recenter(const PolyMap<double>& p, std::vector<double> new_base) {
  if (static_cast<int>(new_base.size()) != p.dim_in()) throw DimensionError("recenter: base point length mismatch");
  const Basis& basis = *Basis::get(p.dim_in(), p.order());
  std::vector<double> w(new_base);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= p.base_point()[i];
  auto shape = JetShape::make(p.dim_in(), p.order(), std::move(new_base));
  std::vector<Jet<double>> out;
  for (int e = 0; e < p.dim_out(); ++e) {
    const auto& src = p[static_cast<std::size_t>(e)];
    Jet<double> dst(shape);
    for (std::size_t s = 0; s < basis.size(); ++s) {
      if (src[s] == 0.0) continue;
      for (std::size_t r = 0; r < basis.size(); ++r) {
        if (!basis[r].leq(basis[s])) continue;
        dst[r] += src[s] * static_cast<double>(multi_binomial(basis[s], basis[r])) * monomial_eval(basis[s] - basis[r], w);
      }
    }
    out.push_back(std::move(dst));
  }
  return PolyMap<double>(std::move(out));
}

/// Lift a real PolyMap to nested scalars (coefficients become constants).
template <class T>
PolyMap<T> lift(const PolyMap<double>& p) {
  std::vector<Jet<T>> out;
  std::vector<double> base(p.base_point().begin(), p.base_point().end());
  auto shape = JetShape::make(p.dim_in(), p.order(), std::move(base));
  for (int e = 0; e < p.dim_out(); ++e) {
    std::vector<T> coeffs;
    coeffs.reserve(p[static_cast<std::size_t>(e)].size());
    for (double c : p[static_cast<std::size_t>(e)].coeffs()) coeffs.push_back(from_real<T>(c));
    out.emplace_back(shape, std::move(coeffs));
  }
  return PolyMap<T>(std::move(out));
}

}  // namespace jetprolong
