#pragma once

/**
 * @file fd_taylor.hpp
 * @brief Plain double evaluation of expression trees and central finite
 *        differences for Taylor coefficients up to order 2. Test-only.
 */

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jetprolong/expression.hpp"

namespace oracle {

inline constexpr double kFirstOrderStep = 1e-5;
inline constexpr double kSecondOrderStep = 1e-3;

inline double eval_double(const jetprolong::Expression::Node& n, const std::vector<double>& x,
                          const std::vector<double>& s = {}) {
  using K = jetprolong::Expression::Kind;
  switch (n.kind) {
    case K::Variable: return x.at(static_cast<std::size_t>(n.index));
    case K::Parameter: return s.at(static_cast<std::size_t>(n.index));
    case K::Constant: return n.value;
    case K::Add: return eval_double(*n.lhs, x, s) + eval_double(*n.rhs, x, s);
    case K::Sub: return eval_double(*n.lhs, x, s) - eval_double(*n.rhs, x, s);
    case K::Mul: return eval_double(*n.lhs, x, s) * eval_double(*n.rhs, x, s);
    case K::Div: return eval_double(*n.lhs, x, s) / eval_double(*n.rhs, x, s);
    case K::Neg: return -eval_double(*n.lhs, x, s);
    case K::Pow: return std::pow(eval_double(*n.lhs, x, s), static_cast<double>(n.power));
    case K::Sin: return std::sin(eval_double(*n.lhs, x, s));
    case K::Cos: return std::cos(eval_double(*n.lhs, x, s));
    case K::Exp: return std::exp(eval_double(*n.lhs, x, s));
    case K::Log: return std::log(eval_double(*n.lhs, x, s));
  }
  throw std::logic_error("unknown node kind");
}

inline double eval_double(const jetprolong::Expression& e, const std::vector<double>& x,
                          const std::vector<double>& s = {}) {
  return eval_double(e.node(), x, s);
}

/// Taylor coefficients (value, gradient, Hessian / multiplicity) as a map exponent -> coefficient.
struct FdTaylor {
  double value = 0.0;
  std::vector<double> gradient;
  /// hessian[i][j] is the coefficient of (x-x0)_i (x-x0)_j style monomials:
  /// f_ii / 2 on the diagonal, f_ij off it (each unordered pair once).
  std::vector<std::vector<double>> second;
};

inline FdTaylor fd_taylor(const jetprolong::Expression& f, const std::vector<double>& x, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("fd_taylor supports orders 0..2");
  const std::size_t d = x.size();
  auto at = [&](std::vector<double> p) {
    double v = eval_double(f, p);
    if (std::isnan(v)) throw std::domain_error("fd_taylor: NaN during evaluation");
    return v;
  };
  FdTaylor out;
  out.value = at(x);
  if (k >= 1) {
    const double h = kFirstOrderStep;
    for (std::size_t i = 0; i < d; ++i) {
      auto p = x;
      auto m = x;
      p[i] += h;
      m[i] -= h;
      out.gradient.push_back((at(p) - at(m)) / (2 * h));
    }
  }
  if (k >= 2) {
    const double h = kSecondOrderStep;
    out.second.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
      auto p = x;
      auto m = x;
      p[i] += h;
      m[i] -= h;
      out.second[i][i] = (at(p) - 2 * out.value + at(m)) / (h * h) / 2;
      for (std::size_t j = i + 1; j < d; ++j) {
        auto pp = x, pm = x, mp = x, mm = x;
        pp[i] += h; pp[j] += h;
        pm[i] += h; pm[j] -= h;
        mp[i] -= h; mp[j] += h;
        mm[i] -= h; mm[j] -= h;
        out.second[i][j] = (at(pp) - at(pm) - at(mp) + at(mm)) / (4 * h * h);
      }
    }
  }
  return out;
}

}  // namespace oracle

#include "jetprolong/polymap.hpp"

namespace oracle {

/// The finite-difference coefficients laid out as an order-k jet about x.
inline jetprolong::PolyMap<double> fd_taylor_map(const jetprolong::Expression& f, const std::vector<double>& x, int k) {
  FdTaylor t = fd_taylor(f, x, k);
  const int d = static_cast<int>(x.size());
  jetprolong::Jet<double> jet(d, k, x);
  const auto& basis = jet.basis();
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& e = basis[a].exponents();
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int r = 0; r < e[i]; ++r) vars.push_back(i);
    }
    if (vars.empty()) jet[a] = t.value;
    else if (vars.size() == 1) jet[a] = t.gradient[vars[0]];
    else jet[a] = t.second[vars[0]][vars[1]];
  }
  return jetprolong::PolyMap<double>({jet});
}

}  // namespace oracle
