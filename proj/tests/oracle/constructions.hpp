#pragma once

/**
 * @file constructions.hpp
 * @brief Pairs of maps with prescribed order of contact, shared by the unit
 *        and acceptance tests.
 */

#include <vector>

#include "jetprolong/jetprolong.hpp"
#include "random_inputs.hpp"

namespace oracle {

/// Random multi-index of the given degree in d variables.
inline std::vector<int> random_multi_index(int d, int degree, Rng& rng) {
  std::vector<int> a(static_cast<std::size_t>(d), 0);
  for (int r = 0; r < degree; ++r) ++a[static_cast<std::size_t>(rng.integer(0, d - 1))];
  return a;
}

/// f and phi = f + c (x - p)^alpha e_k, with |alpha| = contact + 1, so f ~ phi to order `contact` exactly.
struct ContactPair {
  std::vector<double> p;
  VectorExpression f;
  VectorExpression phi;
  int perturbed_degree = 0;
};

inline ContactPair make_contact_pair(int d, int perturbed_degree, int f_degree, Rng& rng) {
  ContactPair pair;
  pair.p = rng.point(static_cast<std::size_t>(d), -1, 1);
  pair.f = random_diffeo(pair.p, f_degree, rng);
  pair.phi = pair.f;
  pair.perturbed_degree = perturbed_degree;
  const int k = rng.integer(0, d - 1);
  const double c = rng.signed_magnitude(0.3, 0.6);
  auto& comp = pair.phi[static_cast<std::size_t>(k)];
  comp = comp + Expression::constant(c) * offset_monomial(random_multi_index(d, perturbed_degree, rng), pair.p);
  return pair;
}

/// Map vanishing to order `order` at y: sum of degree-(order+1) offset monomials times a smooth factor.
inline VectorExpression vanishing_map(const std::vector<double>& y, int order, Rng& rng) {
  const int d = static_cast<int>(y.size());
  VectorExpression f;
  for (int e = 0; e < d; ++e) {
    Expression comp = Expression::constant(rng.signed_magnitude(0.5, 1.0)) *
                      offset_monomial(random_multi_index(d, order + 1, rng), y);
    comp = comp + Expression::constant(rng.uniform(-1, 1)) * offset_monomial(random_multi_index(d, order + 2, rng), y);
    f.push_back(exp(Expression::constant(0.3) * Expression::variable(0)) * comp);
  }
  return f;
}

/// Map with a nonzero coefficient at some degree <= order at y.
inline VectorExpression non_vanishing_map(const std::vector<double>& y, int order, Rng& rng) {
  VectorExpression f = vanishing_map(y, order, rng);
  const int d = static_cast<int>(y.size());
  const int k = rng.integer(0, d - 1);
  f[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k)] +
                                   Expression::constant(rng.signed_magnitude(0.5, 1.0)) *
                                       offset_monomial(random_multi_index(d, rng.integer(0, order), rng), y);
  return f;
}

/// Random element of the polynomial space of degree <= j maps R^d -> R^d about 0.
inline PolyMap<double> random_polynomial(int d, int j, Rng& rng) {
  auto p = PolyMap<double>::zero(d, d, j, std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (int e = 0; e < d; ++e) {
    for (std::size_t a = 0; a < p[0].size(); ++a) p[static_cast<std::size_t>(e)][a] = rng.uniform(-1, 1);
  }
  return p;
}

}  // namespace oracle
