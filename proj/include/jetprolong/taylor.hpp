#pragma once

#include <span>
#include <string>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/expression.hpp"
#include "jetprolong/polymap.hpp"

namespace jetprolong {

/// Truncated jet of f o inputs: each component of `f` evaluated on the jets of `inputs`.
template <class T>
PolyMap<T> evaluate_map(const VectorExpression& f, const PolyMap<T>& inputs, std::span<const T> params = {}) {
  if (f.empty()) throw DimensionError("evaluate_map: expression map has no components");
  JetEvaluator<T> eval(inputs.components(), params);
  std::vector<Jet<T>> out;
  out.reserve(f.size());
  for (const auto& e : f) out.push_back(eval(e));
  return PolyMap<T>(std::move(out));
}

/// Order-k Taylor polynomial of f about x (group parameters fixed to `params`).
inline PolyMap<double> taylor_of_expression(const VectorExpression& f, std::span<const double> x, int k,
                                            std::span<const double> params = {}) {
  if (x.empty()) throw DimensionError("taylor_of_expression: empty base point");
  auto id = PolyMap<double>::identity(static_cast<int>(x.size()), k, std::vector<double>(x.begin(), x.end()));
  return evaluate_map(f, id, params);
}

inline PolyMap<double> taylor_of_expression(const Expression& f, std::span<const double> x, int k,
                                            std::span<const double> params = {}) {
  return taylor_of_expression(VectorExpression{f}, x, k, params);
}

}  // namespace jetprolong
