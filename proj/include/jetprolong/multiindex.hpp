#pragma once

/**
 * @file multiindex.hpp
 * @brief Multi-index combinatorics and the cached coefficient layout of
 *        truncated multivariate series.
 *
 * Coefficients are laid out in graded lexicographic order: all indices of
 * degree 0, then degree 1, and so on. Within one degree, indices are ordered
 * lexicographically with larger leading exponents first, so for d = 2 the
 * sequence reads (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
 *
 * A consequence used throughout the library: the layout of order k is a
 * prefix of the layout of every order k' > k.
 */

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jetprolong/errors.hpp"

namespace jetprolong {

/// Exponent vector alpha in N_0^d.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_) {
      if (e < 0) throw PreconditionError("multi-index exponents must be non-negative");
    }
  }

  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }

  static MultiIndex unit(int d, int i) {
    MultiIndex m = zero(d);
    m.exps_.at(static_cast<std::size_t>(i)) = 1;
    return m;
  }

  int dim() const noexcept { return static_cast<int>(exps_.size()); }
  int degree() const noexcept { return std::accumulate(exps_.begin(), exps_.end(), 0); }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  std::span<const int> exponents() const noexcept { return exps_; }

  /// alpha! as an exact integer; throws OverflowError beyond 64 bits.
  std::uint64_t factorial() const;

  /// Componentwise partial order: this <= other.
  bool leq(const MultiIndex& other) const {
    if (other.dim() != dim()) throw DimensionError("multi-index dimension mismatch");
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] > other.exps_[i]) return false;
    }
    return true;
  }

  MultiIndex operator+(const MultiIndex& other) const {
    if (other.dim() != dim()) throw DimensionError("multi-index dimension mismatch");
    std::vector<int> r(exps_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += other.exps_[i];
    return MultiIndex(std::move(r));
  }

  MultiIndex operator-(const MultiIndex& other) const {
    if (!other.leq(*this)) throw PreconditionError("multi-index difference requires other <= this");
    std::vector<int> r(exps_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= other.exps_[i];
    return MultiIndex(std::move(r));
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  /// Graded lexicographic order (see file comment).
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    // Larger leading exponents sort first within a degree.
    return std::lexicographical_compare_three_way(b.exps_.begin(), b.exps_.end(), a.exps_.begin(),
                                                  a.exps_.end());
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < exps_.size(); ++i) os << (i ? "," : "") << exps_[i];
    os << ')';
    return os.str();
  }

 private:
  std::vector<int> exps_;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multi-index arithmetic");
  return r;
}

/// C(n, r) in exact arithmetic; every intermediate is itself a binomial.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // acc * (n - r + i) is divisible by i; split by gcd to delay overflow.
    std::uint64_t num = n - r + i;
    std::uint64_t g = std::gcd(acc, i);
    acc = checked_mul(acc / g, num / (i / g));
  }
  return acc;
}

}  // namespace detail

inline std::uint64_t MultiIndex::factorial() const {
  std::uint64_t acc = 1;
  for (int e : exps_) {
    for (int i = 2; i <= e; ++i) acc = detail::checked_mul(acc, static_cast<std::uint64_t>(i));
  }
  return acc;
}

/// Number of multi-indices alpha in N_0^d with |alpha| <= k, i.e. C(d+k, k).
inline std::size_t count_multi_indices(int d, int k) {
  return static_cast<std::size_t>(
      detail::binomial(static_cast<std::uint64_t>(d + k), static_cast<std::uint64_t>(k)));
}

/// Every alpha with |alpha| <= k exactly once, in graded lexicographic order.
inline std::vector<MultiIndex> enumerate(int d, int k) {
  if (d < 1) throw DimensionError("enumerate: dimension must be positive");
  if (k < 0) throw DimensionError("enumerate: order must be non-negative");
  std::vector<MultiIndex> out;
  out.reserve(count_multi_indices(d, k));
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  // Fill positions pos..d-1 with total `remaining`, leading exponent largest first.
  auto fill = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.emplace_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[static_cast<std::size_t>(pos)] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  for (int g = 0; g <= k; ++g) fill(fill, 0, g);
  return out;
}

/// Vector binomial sigma! / (rho! (sigma - rho)!).
inline std::uint64_t multi_binomial(const MultiIndex& sigma, const MultiIndex& rho) {
  if (!rho.leq(sigma)) throw PreconditionError("multi_binomial requires rho <= sigma componentwise");
  std::uint64_t acc = 1;
  for (int i = 0; i < sigma.dim(); ++i) {
    acc = detail::checked_mul(acc, detail::binomial(static_cast<std::uint64_t>(sigma[i]),
                                                    static_cast<std::uint64_t>(rho[i])));
  }
  return acc;
}

/// x^alpha.
inline double monomial_eval(const MultiIndex& alpha, std::span<const double> x) {
  if (static_cast<int>(x.size()) != alpha.dim()) throw DimensionError("monomial_eval: dimension mismatch");
  double acc = 1.0;
  for (int i = 0; i < alpha.dim(); ++i) {
    for (int e = 0; e < alpha[i]; ++e) acc *= x[static_cast<std::size_t>(i)];
  }
  return acc;
}

/**
 * Coefficient layout for series in `dim` variables truncated at `order`.
 *
 * Besides the enumeration itself the basis precomputes the truncated
 * product table (which pairs of coefficients contribute to which target) and,
 * for every non-constant index, a predecessor alpha - e_i with i the first
 * non-zero position. Instances are shared through `Basis::get`.
 */
class Basis {
 public:
  struct Product {
    std::uint32_t rhs;
    std::uint32_t target;
  };

  static std::shared_ptr<const Basis> get(int dim, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const Basis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = std::shared_ptr<const Basis>(new Basis(dim, order));
    return slot;
  }

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  std::span<const MultiIndex> indices() const noexcept { return indices_; }
  int degree(std::size_t i) const { return degrees_[i]; }

  /// First position holding an index of degree g; degree_begin(order+1) == size().
  std::size_t degree_begin(int g) const {
    if (g <= 0) return 0;
    if (g > order_) return size();
    return count_multi_indices(dim_, g - 1);
  }

  std::size_t index_of(const MultiIndex& alpha) const {
    auto it = lookup_.find(std::vector<int>(alpha.exponents().begin(), alpha.exponents().end()));
    if (it == lookup_.end()) {
      throw DimensionError("multi-index " + alpha.to_string() + " is outside the truncated basis");
    }
    return it->second;
  }

  /// Products of coefficient `lhs` with every coefficient whose degree keeps the sum <= order.
  std::span<const Product> products(std::size_t lhs) const {
    return std::span<const Product>(products_).subspan(product_begin_[lhs],
                                                       product_begin_[lhs + 1] - product_begin_[lhs]);
  }

  /// For i > 0: (index of alpha - e_v, v) where v is the first non-zero position of alpha.
  std::pair<std::size_t, int> predecessor(std::size_t i) const { return predecessor_[i]; }

 private:
  Basis(int dim, int order) : dim_(dim), order_(order), indices_(enumerate(dim, order)) {
    degrees_.reserve(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      degrees_.push_back(indices_[i].degree());
      auto e = indices_[i].exponents();
      lookup_.emplace(std::vector<int>(e.begin(), e.end()), i);
    }
    predecessor_.assign(indices_.size(), {0, -1});
    for (std::size_t i = 1; i < indices_.size(); ++i) {
      auto e = indices_[i].exponents();
      int v = static_cast<int>(std::find_if(e.begin(), e.end(), [](int x) { return x > 0; }) - e.begin());
      std::vector<int> prev(e.begin(), e.end());
      --prev[static_cast<std::size_t>(v)];
      predecessor_[i] = {lookup_.at(prev), v};
    }
    product_begin_.reserve(indices_.size() + 1);
    std::vector<int> sum(static_cast<std::size_t>(dim));
    for (std::size_t a = 0; a < indices_.size(); ++a) {
      product_begin_.push_back(products_.size());
      for (std::size_t b = 0; b < indices_.size(); ++b) {
        if (degrees_[a] + degrees_[b] > order_) break;  // degrees are sorted
        for (int v = 0; v < dim; ++v) sum[static_cast<std::size_t>(v)] = indices_[a][v] + indices_[b][v];
        products_.push_back({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(lookup_.at(sum))});
      }
    }
    product_begin_.push_back(products_.size());
  }

  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::map<std::vector<int>, std::size_t> lookup_;
  std::vector<std::pair<std::size_t, int>> predecessor_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_begin_;
};

}  // namespace jetprolong
