#pragma once

/**
 * @file expression.hpp
 * @brief Expression trees over space variables x1..xD and group parameters
 *        s1..sn, their text grammar, and evaluation in jet arithmetic.
 *
 * Grammar (whitespace ignored):
 *
 *     expr   := term (('+'|'-') term)*
 *     term   := factor (('*'|'/') factor)*
 *     factor := '-' factor | base ('^' uint)?
 *     base   := 'x' uint | 's' uint | number | '(' expr ')' | func '(' expr ')'
 *     func   := 'sin' | 'cos' | 'exp' | 'log'
 *
 * Variable indices are 1-based in text and 0-based in the API.
 */

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jetprolong/errors.hpp"
#include "jetprolong/jet.hpp"
#include "jetprolong/polymap.hpp"

namespace jetprolong {

class Expression {
 public:
  enum class Kind { Variable, Parameter, Constant, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log };

  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;  // Constant
    int index = 0;       // Variable / Parameter (0-based)
    unsigned power = 0;  // Pow
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expression() : Expression(constant(0.0)) {}

  static Expression variable(int i) {
    Node n = blank(Kind::Variable);
    n.index = check_index(i);
    return Expression(make(std::move(n)));
  }
  static Expression parameter(int i) {
    Node n = blank(Kind::Parameter);
    n.index = check_index(i);
    return Expression(make(std::move(n)));
  }
  static Expression constant(double c) {
    Node n = blank(Kind::Constant);
    n.value = c;
    return Expression(make(std::move(n)));
  }

  Kind kind() const noexcept { return node_->kind; }
  const Node& node() const noexcept { return *node_; }

  /// Largest variable index + 1 (0 if no variables occur).
  int variable_arity() const { return max_index(node_.get(), Kind::Variable); }
  int parameter_arity() const { return max_index(node_.get(), Kind::Parameter); }

  friend Expression operator+(const Expression& a, const Expression& b) { return binary(Kind::Add, a, b); }
  friend Expression operator-(const Expression& a, const Expression& b) { return binary(Kind::Sub, a, b); }
  friend Expression operator*(const Expression& a, const Expression& b) { return binary(Kind::Mul, a, b); }
  friend Expression operator/(const Expression& a, const Expression& b) { return binary(Kind::Div, a, b); }
  friend Expression operator-(const Expression& a) { return unary(Kind::Neg, a); }
  friend Expression pow(const Expression& a, unsigned n) {
    Node node = blank(Kind::Pow);
    node.power = n;
    node.lhs = a.node_;
    return Expression(make(std::move(node)));
  }
  friend Expression sin(const Expression& a) { return unary(Kind::Sin, a); }
  friend Expression cos(const Expression& a) { return unary(Kind::Cos, a); }
  friend Expression exp(const Expression& a) { return unary(Kind::Exp, a); }
  friend Expression log(const Expression& a) { return unary(Kind::Log, a); }

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const { return render(*node_); }
  static std::string node_text(const Node& n) { return render(n); }

  /// Replace every x_i by replacements[i].
  Expression substitute(std::span<const Expression> replacements) const {
    return Expression(substitute_node(node_, replacements));
  }

  static Expression parse(std::string_view text);

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Node blank(Kind k) {
    Node n;
    n.kind = k;
    return n;
  }

  static std::shared_ptr<const Node> make(Node n) { return std::make_shared<const Node>(std::move(n)); }

  static int check_index(int i) {
    if (i < 0) throw DimensionError("expression variable index must be non-negative");
    return i;
  }

  static Expression binary(Kind k, const Expression& a, const Expression& b) {
    Node n = blank(k);
    n.lhs = a.node_;
    n.rhs = b.node_;
    return Expression(make(std::move(n)));
  }

  static Expression unary(Kind k, const Expression& a) {
    Node n = blank(k);
    n.lhs = a.node_;
    return Expression(make(std::move(n)));
  }

  static int max_index(const Node* n, Kind which) {
    if (!n) return 0;
    if (n->kind == which) return n->index + 1;
    return std::max(max_index(n->lhs.get(), which), max_index(n->rhs.get(), which));
  }

  static std::string render(const Node& n) {
    auto fn = [&](const char* name) { return std::string(name) + "(" + render(*n.lhs) + ")"; };
    auto bin = [&](const char* op) { return "(" + render(*n.lhs) + op + render(*n.rhs) + ")"; };
    switch (n.kind) {
      case Kind::Variable: return "x" + std::to_string(n.index + 1);
      case Kind::Parameter: return "s" + std::to_string(n.index + 1);
      case Kind::Constant: {
        std::ostringstream os;
        os.precision(17);
        os << n.value;
        std::string s = os.str();
        return n.value < 0 ? "(" + s + ")" : s;
      }
      case Kind::Add: return bin(" + ");
      case Kind::Sub: return bin(" - ");
      case Kind::Mul: return bin("*");
      case Kind::Div: return bin("/");
      case Kind::Neg: return "(-" + render(*n.lhs) + ")";
      case Kind::Pow: return "(" + render(*n.lhs) + ")^" + std::to_string(n.power);
      case Kind::Sin: return fn("sin");
      case Kind::Cos: return fn("cos");
      case Kind::Exp: return fn("exp");
      case Kind::Log: return fn("log");
    }
    return {};
  }

  static std::shared_ptr<const Node> substitute_node(const std::shared_ptr<const Node>& n,
                                                     std::span<const Expression> repl) {
    if (!n) return n;
    if (n->kind == Kind::Variable) {
      if (static_cast<std::size_t>(n->index) >= repl.size()) {
        throw DimensionError("substitute: no replacement for x" + std::to_string(n->index + 1));
      }
      return repl[static_cast<std::size_t>(n->index)].node_;
    }
    if (!n->lhs) return n;
    Node copy = *n;
    copy.lhs = substitute_node(n->lhs, repl);
    copy.rhs = substitute_node(n->rhs, repl);
    return make(std::move(copy));
  }

  std::shared_ptr<const Node> node_;
};

/// A map given componentwise by expressions.
using VectorExpression = std::vector<Expression>;

namespace detail {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  Expression parse() {
    Expression e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expression term() {
    Expression e = factor();
    for (;;) {
      if (accept('*')) {
        e = e * factor();
      } else if (accept('/')) {
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expression factor() {
    if (accept('-')) return -factor();
    Expression b = base();
    if (accept('^')) {
      skip_ws();
      return pow(b, static_cast<unsigned>(uint_literal()));
    }
    return b;
  }

  unsigned long uint_literal() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an unsigned integer");
    return std::stoul(std::string(text_.substr(start, pos_ - start)));
  }

  Expression base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x" || word == "s") {
        std::size_t at = pos_;
        unsigned long i = uint_literal();
        if (i == 0) {
          pos_ = at;
          fail("variable indices are 1-based");
        }
        return word == "x" ? Expression::variable(static_cast<int>(i - 1))
                           : Expression::parameter(static_cast<int>(i - 1));
      }
      Expression (*fn)(const Expression&) = nullptr;
      if (word == "sin") fn = [](const Expression& e) { return sin(e); };
      if (word == "cos") fn = [](const Expression& e) { return cos(e); };
      if (word == "exp") fn = [](const Expression& e) { return exp(e); };
      if (word == "log") fn = [](const Expression& e) { return log(e); };
      if (!fn) {
        pos_ = start;
        fail("unknown identifier '" + std::string(word) + "'");
      }
      expect('(');
      Expression arg = expr();
      expect(')');
      return fn(arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expression number() {
    char* end = nullptr;
    std::string copy(text_.substr(pos_));
    double v = std::strtod(copy.c_str(), &end);
    std::size_t used = static_cast<std::size_t>(end - copy.c_str());
    if (used == 0) fail("malformed number");
    pos_ += used;
    return Expression::constant(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expression Expression::parse(std::string_view text) { return detail::ExpressionParser(text).parse(); }

/**
 * Evaluates an expression in jet arithmetic.
 *
 * `x` holds one jet per space variable (all sharing a shape); `s` holds the
 * group parameters as scalars of the coefficient type. Singular nodes raise
 * DomainError naming the offending subexpression.
 */
template <class T>
class JetEvaluator {
 public:
  JetEvaluator(std::span<const Jet<T>> x, std::span<const T> s) : x_(x), s_(s) {
    for (const auto& j : x_) {
      if (j.shaped()) {
        shape_ = j.shape();
        break;
      }
    }
  }

  Jet<T> operator()(const Expression& e) const {
    Jet<T> r = eval(e.node());
    return shape_ ? r.with_shape(shape_) : r;
  }

 private:
  using Kind = Expression::Kind;
  using Node = Expression::Node;

  static std::string render(const Node& n) { return Expression::node_text(n); }

  Jet<T> eval(const Node& n) const {
    switch (n.kind) {
      case Kind::Variable:
        if (static_cast<std::size_t>(n.index) >= x_.size()) {
          throw DimensionError("expression uses x" + std::to_string(n.index + 1) + " but only " +
                               std::to_string(x_.size()) + " space variables are bound");
        }
        return x_[static_cast<std::size_t>(n.index)];
      case Kind::Parameter:
        if (static_cast<std::size_t>(n.index) >= s_.size()) {
          throw DimensionError("expression uses s" + std::to_string(n.index + 1) + " but only " +
                               std::to_string(s_.size()) + " group parameters are bound");
        }
        return Jet<T>::constant(s_[static_cast<std::size_t>(n.index)]);
      case Kind::Constant: return Jet<T>::constant(from_real<T>(n.value));
      case Kind::Add: return eval(*n.lhs) + eval(*n.rhs);
      case Kind::Sub: return eval(*n.lhs) - eval(*n.rhs);
      case Kind::Mul: return eval(*n.lhs) * eval(*n.rhs);
      case Kind::Neg: return -eval(*n.lhs);
      case Kind::Pow: return pow(eval(*n.lhs), n.power);
      case Kind::Div: {
        Jet<T> den = eval(*n.rhs);
        if (real_part(den.constant_term()) == 0.0) {
          throw DomainError("division by zero constant term in node '" + render(n) + "'");
        }
        return eval(*n.lhs) / den;
      }
      case Kind::Log: {
        Jet<T> arg = eval(*n.lhs);
        if (!(real_part(arg.constant_term()) > 0.0)) {
          throw DomainError("logarithm of non-positive constant term in node '" + render(n) + "'");
        }
        return log(arg);
      }
      case Kind::Sin: return sin(eval(*n.lhs));
      case Kind::Cos: return cos(eval(*n.lhs));
      case Kind::Exp: return exp(eval(*n.lhs));
    }
    throw Error("unknown expression node");
  }

  std::span<const Jet<T>> x_;
  std::span<const T> s_;
  std::shared_ptr<const JetShape> shape_;
};

}  // namespace jetprolong
