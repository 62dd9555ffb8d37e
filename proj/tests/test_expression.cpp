#include <gtest/gtest.h>

#include "jetprolong/jetprolong.hpp"
#include "oracle/fd_taylor.hpp"
#include "oracle/random_inputs.hpp"

using namespace jetprolong;

TEST(ExpressionParse, PrecedenceAndRoundTrip) {
  auto e = Expression::parse("x1 + 2*x2^2 - sin(s1)/3");
  auto again = Expression::parse(e.to_string());
  EXPECT_EQ(again.to_string(), e.to_string());
  EXPECT_EQ(e.variable_arity(), 2);
  EXPECT_EQ(e.parameter_arity(), 1);
  std::vector<double> x{1.5, -0.5};
  std::vector<double> s{0.4};
  EXPECT_DOUBLE_EQ(oracle::eval_double(e, x, s), 1.5 + 2 * 0.25 - std::sin(0.4) / 3);
}

TEST(ExpressionParse, UnaryMinusAndScientificNotation) {
  auto e = Expression::parse("-x1^2 + 1.5e-1");
  std::vector<double> x{2.0};
  EXPECT_DOUBLE_EQ(oracle::eval_double(e, x), -4.0 + 0.15);
}

TEST(ExpressionParse, ErrorsCarryPosition) {
  try {
    Expression::parse("x1 + * x2");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
  EXPECT_THROW(Expression::parse("foo(x1)"), ParseError);
  EXPECT_THROW(Expression::parse("x0"), ParseError);
  EXPECT_THROW(Expression::parse("(x1"), ParseError);
  EXPECT_THROW(Expression::parse("x1 x2"), ParseError);
  EXPECT_THROW(Expression::parse(""), ParseError);
}

TEST(ExpressionSubstitute, Composition) {
  auto f = Expression::parse("x1*x2");
  std::vector<Expression> repl{Expression::parse("x1+1"), Expression::parse("x1-1")};
  auto g = f.substitute(repl);
  std::vector<double> x{3.0};
  EXPECT_DOUBLE_EQ(oracle::eval_double(g, x), 8.0);
}

TEST(TaylorOfExpression, IdentityMap) {
  VectorExpression id{Expression::variable(0), Expression::variable(1)};
  std::vector<double> x{0.3, -2.0};
  auto t = taylor_of_expression(id, x, 3);
  EXPECT_EQ(t.value_at_base(), x);
  EXPECT_TRUE(linear_part(t).isIdentity());
}

TEST(TaylorOfExpression, ExpAtZero) {
  auto t = taylor_of_expression(Expression::parse("exp(x1)"), std::vector<double>{0.0}, 2);
  auto fd = oracle::fd_taylor_map(Expression::parse("exp(x1)"), {0.0}, 2);
  for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(t[0][a], fd[0][a], 1e-5);
  EXPECT_DOUBLE_EQ(t[0][2], 0.5);
}

TEST(TaylorOfExpression, ProductOfVariables) {
  auto t = taylor_of_expression(Expression::parse("x1*x2"), std::vector<double>{1.0, 2.0}, 1);
  EXPECT_DOUBLE_EQ(t[0][0], 2.0);
  EXPECT_DOUBLE_EQ(t[0][1], 2.0);
  EXPECT_DOUBLE_EQ(t[0][2], 1.0);
}

TEST(TaylorOfExpression, SingularNodesAreNamed) {
  try {
    taylor_of_expression(Expression::parse("1/x1"), std::vector<double>{0.0}, 2);
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(1/x1)"), std::string::npos);
  }
  EXPECT_THROW(taylor_of_expression(Expression::parse("log(x1 - 1)"), std::vector<double>{0.5}, 1), DomainError);
  EXPECT_THROW(taylor_of_expression(Expression::parse("x3"), std::vector<double>{0.5}, 1), DimensionError);
}

TEST(TaylorOfExpression, MatchesFiniteDifferences) {
  constexpr double rel_tol = 1e-5;
  oracle::Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const int d = rng.integer(1, 2);
    auto f = oracle::random_expression(d, 4, rng);
    auto x = rng.point(static_cast<std::size_t>(d), -1, 1);
    auto jet = taylor_of_expression(f, x, 2);
    auto fd = oracle::fd_taylor_map(f, x, 2);
    for (std::size_t a = 0; a < jet[0].size(); ++a) {
      const double want = fd[0][a];
      EXPECT_LE(std::abs(jet[0][a] - want), rel_tol * std::max(std::abs(want), 1.0))
          << f.to_string() << " coefficient " << a;
    }
  }
}
