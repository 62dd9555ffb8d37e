#pragma once

/**
 * @file actions.hpp
 * @brief Built-in group actions and the plain-text action file format.
 *
 * Action file:
 *
 *     n=2 D=1
 *     out1 = exp(s1)*x1 + s2
 *
 * Blank lines and lines starting with '#' are ignored.
 */

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/expression.hpp"
#include "jetprolong/frame_bundle.hpp"
#include "jetprolong/infinitesimal.hpp"

namespace jetprolong {

/// Translations of R^D: x + s.
inline ActionSpec translation_action(int dim) {
  if (dim < 1) throw PreconditionError("translation action needs D >= 1");
  ActionSpec a;
  a.name = "translation D=" + std::to_string(dim);
  a.group_dim = dim;
  a.space_dim = dim;
  for (int i = 0; i < dim; ++i) a.action.push_back(Expression::variable(i) + Expression::parameter(i));
  a.space = ChartedSpace::euclidean(dim);
  return a;
}

/// (x, y) -> (x, y + s1 x + s2 x^2 + ... + sn x^n) on R^2; x = 0 is excluded.
inline ActionSpec poly_example_action(int n) {
  if (n < 1) throw PreconditionError("poly-example needs n >= 1");
  ActionSpec a;
  a.name = "poly-example n=" + std::to_string(n);
  a.group_dim = n;
  a.space_dim = 2;
  Expression shear = Expression::variable(1);
  for (int l = 1; l <= n; ++l) {
    Expression mono = l == 1 ? Expression::variable(0) : pow(Expression::variable(0), static_cast<unsigned>(l));
    shear = shear + Expression::parameter(l - 1) * mono;
  }
  a.action = {Expression::variable(0), shear};
  a.space = ChartedSpace::euclidean(2);
  a.exclusions = {Exclusion{0, 0.0}};
  return a;
}

/// x -> exp(s1) x + s2 on R.
inline ActionSpec affine_action() {
  ActionSpec a;
  a.name = "affine D=1";
  a.group_dim = 2;
  a.space_dim = 1;
  a.action = {exp(Expression::parameter(0)) * Expression::variable(0) + Expression::parameter(1)};
  a.space = ChartedSpace::euclidean(1);
  return a;
}

/// Resolves "translation", "translation D=k", "poly-example n=k", "affine", "affine D=1".
inline std::optional<ActionSpec> builtin_action(std::string_view name) {
  static const std::regex translation(R"(\s*translation(\s+D\s*=\s*(\d+))?\s*)");
  static const std::regex poly(R"(\s*poly-example\s+n\s*=\s*(\d+)\s*)");
  static const std::regex affine(R"(\s*affine(\s+D\s*=\s*1)?\s*)");
  std::string s(name);
  std::smatch m;
  if (std::regex_match(s, m, translation)) return translation_action(m[2].matched ? std::stoi(m[2].str()) : 1);
  if (std::regex_match(s, m, poly)) return poly_example_action(std::stoi(m[1].str()));
  if (std::regex_match(s, m, affine)) return affine_action();
  return std::nullopt;
}

inline ActionSpec parse_action(std::string_view text, std::string name = "file") {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::optional<std::pair<int, int>> header;
  std::vector<std::optional<Expression>> outs;
  static const std::regex header_re(R"(\s*n\s*=\s*(\d+)\s+D\s*=\s*(\d+)\s*)");
  static const std::regex out_re(R"(\s*out(\d+)\s*=(.*))");
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!header) {
      if (!std::regex_match(line, m, header_re)) {
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'n=<int> D=<int>'");
      }
      header = std::pair{std::stoi(m[1].str()), std::stoi(m[2].str())};
      outs.assign(static_cast<std::size_t>(header->second), std::nullopt);
      continue;
    }
    if (!std::regex_match(line, m, out_re)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'out<i> = <expr>'");
    }
    int idx = std::stoi(m[1].str());
    if (idx < 1 || idx > header->second) {
      throw ParseError("line " + std::to_string(line_no) + ": output index out" + std::to_string(idx) + " out of range");
    }
    if (outs[static_cast<std::size_t>(idx - 1)]) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate out" + std::to_string(idx));
    }
    try {
      outs[static_cast<std::size_t>(idx - 1)] = Expression::parse(m[2].str());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ParseError("action file is empty");
  ActionSpec a;
  a.name = std::move(name);
  a.group_dim = header->first;
  a.space_dim = header->second;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (!outs[i]) throw ParseError("missing out" + std::to_string(i + 1));
    a.action.push_back(*outs[i]);
  }
  a.space = ChartedSpace::euclidean(a.space_dim);
  return a;
}

/// A built-in name, or else a path to an action file.
inline ActionSpec load_action(const std::string& source) {
  if (auto b = builtin_action(source)) return *b;
  std::ifstream f(source);
  if (!f) throw PreconditionError("unknown action '" + source + "' (not a built-in name or readable file)");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_action(buf.str(), source);
}

}  // namespace jetprolong
