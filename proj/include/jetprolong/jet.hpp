#pragma once

/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor series ("jets") over a generic scalar.
 *
 * A `Jet<T>` in d variables truncated at order k stores the Taylor-normalized
 * coefficients (d^alpha f)(b) / alpha! about a real base point b, laid out by
 * `Basis`. The scalar T is either `double` or another `Jet`, which gives
 * nested truncated arithmetic: a `Jet<Jet<double>>` is a series in x whose
 * coefficients are series in a second, independent set of variables.
 *
 * A default-constructed or `constant(c)` jet carries no shape. It behaves as
 * a constant and adopts the shape of whatever shaped jet it is combined with.
 */

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/multiindex.hpp"

namespace jetprolong {

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double from_real(double x) { return x; }
  static double real_part(double x) { return x; }
  static bool is_zero(double x) { return x == 0.0; }
  static bool is_finite(double x) { return std::isfinite(x); }
  static double scaled(double x, double c) { return x * c; }
};

template <class T>
T from_real(double x) {
  return ScalarTraits<T>::from_real(x);
}

template <class T>
double real_part(const T& x) {
  return ScalarTraits<T>::real_part(x);
}

template <class T>
bool is_zero(const T& x) {
  return ScalarTraits<T>::is_zero(x);
}

template <class T>
T scaled(const T& x, double c) {
  return ScalarTraits<T>::scaled(x, c);
}

/// Truncation layout plus base point; shared by all jets of one expansion.
struct JetShape {
  std::shared_ptr<const Basis> basis;
  std::vector<double> base;

  static std::shared_ptr<const JetShape> make(int dim, int order, std::vector<double> base) {
    if (dim < 1) throw DimensionError("jet dimension must be positive");
    if (order < 0) throw DimensionError("jet order must be non-negative");
    if (static_cast<int>(base.size()) != dim) throw DimensionError("base point length must equal jet dimension");
    return std::make_shared<const JetShape>(JetShape{Basis::get(dim, order), std::move(base)});
  }
};

template <class T = double>
class Jet {
 public:
  using scalar_type = T;

  Jet() : coeffs_{from_real<T>(0.0)} {}

  explicit Jet(std::shared_ptr<const JetShape> shape)
      : shape_(std::move(shape)), coeffs_(shape_->basis->size(), from_real<T>(0.0)) {}

  Jet(int dim, int order, std::vector<double> base) : Jet(JetShape::make(dim, order, std::move(base))) {}

  Jet(std::shared_ptr<const JetShape> shape, std::vector<T> coeffs)
      : shape_(std::move(shape)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != shape_->basis->size()) {
      throw DimensionError("coefficient count " + std::to_string(coeffs_.size()) + " does not match C(d+k,k) = " +
                           std::to_string(shape_->basis->size()));
    }
  }

  Jet(int dim, int order, std::vector<double> base, std::vector<T> coeffs)
      : Jet(JetShape::make(dim, order, std::move(base)), std::move(coeffs)) {}

  /// Shapeless constant.
  static Jet constant(T c) {
    Jet j;
    j.coeffs_[0] = std::move(c);
    return j;
  }

  /// Constant with the given shape.
  static Jet constant(std::shared_ptr<const JetShape> shape, T c) {
    Jet j(std::move(shape));
    j.coeffs_[0] = std::move(c);
    return j;
  }

  /// Seed for coordinate i: base_i + (x_i - base_i).
  static Jet variable(std::shared_ptr<const JetShape> shape, int i) {
    if (i < 0 || i >= shape->basis->dim()) throw DimensionError("variable index out of range");
    Jet j(shape);
    j.coeffs_[0] = from_real<T>(shape->base[static_cast<std::size_t>(i)]);
    if (shape->basis->order() >= 1) j.coeffs_[static_cast<std::size_t>(1 + i)] = from_real<T>(1.0);
    return j;
  }

  static Jet variable(int dim, int order, std::vector<double> base, int i) {
    return variable(JetShape::make(dim, order, std::move(base)), i);
  }

  bool shaped() const noexcept { return shape_ != nullptr; }
  const std::shared_ptr<const JetShape>& shape() const noexcept { return shape_; }
  const Basis& basis() const { return *require_shape().basis; }
  int dim() const { return require_shape().basis->dim(); }
  int order() const { return require_shape().basis->order(); }
  std::span<const double> base_point() const { return require_shape().base; }

  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const T> coeffs() const noexcept { return coeffs_; }
  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  T& operator[](std::size_t i) { return coeffs_[i]; }
  const T& constant_term() const { return coeffs_[0]; }

  const T& coeff(const MultiIndex& alpha) const { return coeffs_[basis().index_of(alpha)]; }
  T& coeff(const MultiIndex& alpha) { return coeffs_[basis().index_of(alpha)]; }

  /// Jet with the shape of `shape`; only legal for shapeless or same-shaped jets.
  Jet with_shape(const std::shared_ptr<const JetShape>& shape) const {
    if (shaped()) {
      check_compatible(shape_, shape);
      return *this;
    }
    return constant(shape, coeffs_[0]);
  }

  /// Drop every coefficient of degree > k.
  Jet truncated(int k) const {
    if (!shaped()) return *this;
    if (k > order()) throw DimensionError("cannot truncate a jet to a higher order");
    auto shape = JetShape::make(dim(), k, shape_->base);
    return Jet(shape, std::vector<T>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(shape->basis->size())));
  }

  /// Same coefficients without the constant term.
  Jet tail() const {
    Jet r = *this;
    r.coeffs_[0] = from_real<T>(0.0);
    return r;
  }

  /// The polynomial sum_alpha c_alpha (x - b)^alpha at a real point x.
  T evaluate_at(std::span<const double> x) const {
    if (!shaped()) return coeffs_[0];
    if (static_cast<int>(x.size()) != dim()) throw DimensionError("evaluate_at: dimension mismatch");
    std::vector<double> shifted(x.begin(), x.end());
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= shape_->base[i];
    T acc = from_real<T>(0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      acc += jetprolong::scaled(coeffs_[i], monomial_eval(basis()[i], shifted));
    }
    return acc;
  }

  Jet scaled(double c) const {
    Jet r = *this;
    for (auto& x : r.coeffs_) x = jetprolong::scaled(x, c);
    return r;
  }

  Jet& add_constant(const T& c) {
    coeffs_[0] += c;
    return *this;
  }

  Jet& operator+=(const Jet& o) {
    adopt_shape(o);
    if (o.shaped()) {
      for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    } else {
      coeffs_[0] += o.coeffs_[0];
    }
    return *this;
  }

  Jet& operator-=(const Jet& o) {
    adopt_shape(o);
    if (o.shaped()) {
      for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    } else {
      coeffs_[0] -= o.coeffs_[0];
    }
    return *this;
  }

  Jet& operator*=(const T& c) {
    for (auto& x : coeffs_) x *= c;
    return *this;
  }

  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& x : a.coeffs_) x = -x;
    return a;
  }
  friend Jet operator*(Jet a, const T& c) { return a *= c; }
  friend Jet operator*(const T& c, Jet a) { return a *= c; }

  /// Cauchy product truncated at the common order.
  friend Jet operator*(const Jet& a, const Jet& b) {
    if (!a.shaped()) return b * a.coeffs_[0];
    if (!b.shaped()) return a * b.coeffs_[0];
    check_compatible(a.shape_, b.shape_);
    const Basis& basis = *a.shape_->basis;
    Jet r(a.shape_);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (jetprolong::is_zero(a.coeffs_[i])) continue;
      for (const auto& p : basis.products(i)) {
        if (jetprolong::is_zero(b.coeffs_[p.rhs])) continue;
        r.coeffs_[p.target] += a.coeffs_[i] * b.coeffs_[p.rhs];
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  friend Jet reciprocal(const Jet& u) {
    const T& c0 = u.coeffs_[0];
    if (jetprolong::real_part(c0) == 0.0) throw DomainError("division by a jet with zero constant term");
    T inv0 = from_real<T>(1.0) / c0;
    if (!u.shaped()) return constant(inv0);
    // 1/(c0 + t) = (1/c0) * sum_r (-t/c0)^r, exact because t is nilpotent.
    Jet q = u.tail() * (-inv0);
    return horner(q, std::vector<double>(static_cast<std::size_t>(u.order()) + 1, 1.0)) * inv0;
  }

  friend Jet exp(const Jet& u) {
    using std::exp;
    T e0 = exp(u.coeffs_[0]);
    if (!u.shaped()) return constant(e0);
    std::vector<double> a(static_cast<std::size_t>(u.order()) + 1);
    double f = 1.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r > 0) f /= static_cast<double>(r);
      a[r] = f;
    }
    return horner(u.tail(), a) * e0;
  }

  friend Jet log(const Jet& u) {
    using std::log;
    const T& c0 = u.coeffs_[0];
    if (!(jetprolong::real_part(c0) > 0.0)) throw DomainError("logarithm of a jet with non-positive constant term");
    T l0 = log(c0);
    if (!u.shaped()) return constant(l0);
    Jet q = u.tail() * (from_real<T>(1.0) / c0);
    std::vector<double> a(static_cast<std::size_t>(u.order()) + 1, 0.0);
    for (std::size_t r = 1; r < a.size(); ++r) a[r] = (r % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(r);
    return horner(q, a).add_constant(l0);
  }

  friend Jet sin(const Jet& u) {
    using std::cos;
    using std::sin;
    T s0 = sin(u.coeffs_[0]);
    T c0 = cos(u.coeffs_[0]);
    if (!u.shaped()) return constant(s0);
    Jet t = u.tail();
    return horner(t, cos_series(u.order())) * s0 + horner(t, sin_series(u.order())) * c0;
  }

  friend Jet cos(const Jet& u) {
    using std::cos;
    using std::sin;
    T s0 = sin(u.coeffs_[0]);
    T c0 = cos(u.coeffs_[0]);
    if (!u.shaped()) return constant(c0);
    Jet t = u.tail();
    return horner(t, cos_series(u.order())) * c0 - horner(t, sin_series(u.order())) * s0;
  }

  friend Jet pow(const Jet& u, unsigned n) {
    Jet result = constant(from_real<T>(1.0));
    if (u.shaped()) result = result.with_shape(u.shape_);
    Jet base = u;
    while (n > 0) {
      if (n & 1U) result = result * base;
      n >>= 1U;
      if (n > 0) base = base * base;
    }
    return result;
  }

 private:
  const JetShape& require_shape() const {
    if (!shape_) throw DimensionError("operation requires a shaped jet");
    return *shape_;
  }

  static void check_compatible(const std::shared_ptr<const JetShape>& a, const std::shared_ptr<const JetShape>& b) {
    if (a == b) return;
    if (a->basis != b->basis) {
      throw DimensionError("jet shape mismatch: (d=" + std::to_string(a->basis->dim()) +
                           ", k=" + std::to_string(a->basis->order()) + ") vs (d=" +
                           std::to_string(b->basis->dim()) + ", k=" + std::to_string(b->basis->order()) + ")");
    }
    if (a->base != b->base) throw AlignmentError("jets are expanded about different base points");
  }

  void adopt_shape(const Jet& o) {
    if (!o.shaped()) return;
    if (!shaped()) {
      T c = std::move(coeffs_[0]);
      *this = constant(o.shape_, std::move(c));
      return;
    }
    check_compatible(shape_, o.shape_);
  }

  /// sum_r a_r t^r for a nilpotent t (no constant term).
  static Jet horner(const Jet& t, const std::vector<double>& a) {
    Jet acc = constant(t.shape_, from_real<T>(a.back()));
    for (std::size_t r = a.size() - 1; r-- > 0;) {
      acc = acc * t;
      acc.coeffs_[0] += from_real<T>(a[r]);
    }
    return acc;
  }

  static std::vector<double> sin_series(int k) {
    std::vector<double> a(static_cast<std::size_t>(k) + 1, 0.0);
    double f = 1.0;
    for (std::size_t r = 1; r < a.size(); ++r) {
      f /= static_cast<double>(r);
      if (r % 2 == 1) a[r] = (r % 4 == 1) ? f : -f;
    }
    return a;
  }

  static std::vector<double> cos_series(int k) {
    std::vector<double> a(static_cast<std::size_t>(k) + 1, 0.0);
    double f = 1.0;
    a[0] = 1.0;
    for (std::size_t r = 1; r < a.size(); ++r) {
      f /= static_cast<double>(r);
      if (r % 2 == 0) a[r] = (r % 4 == 0) ? f : -f;
    }
    return a;
  }

  std::shared_ptr<const JetShape> shape_;
  std::vector<T> coeffs_;
};

template <class U>
struct ScalarTraits<Jet<U>> {
  static Jet<U> from_real(double x) { return Jet<U>::constant(jetprolong::from_real<U>(x)); }
  static double real_part(const Jet<U>& x) { return jetprolong::real_part(x.constant_term()); }
  static bool is_zero(const Jet<U>& x) {
    for (const auto& c : x.coeffs()) {
      if (!jetprolong::is_zero(c)) return false;
    }
    return true;
  }
  static bool is_finite(const Jet<U>& x) {
    for (const auto& c : x.coeffs()) {
      if (!ScalarTraits<U>::is_finite(c)) return false;
    }
    return true;
  }
  static Jet<U> scaled(const Jet<U>& x, double c) { return x.scaled(c); }
};

template <class T>
bool is_finite(const T& x) {
  return ScalarTraits<T>::is_finite(x);
}

}  // namespace jetprolong
