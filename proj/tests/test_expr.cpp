#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cvf/error.hpp"
#include "cvf/expr.hpp"
#include "cvf/jet.hpp"
#include "support.hpp"

using namespace cvf;

namespace {

std::vector<double> pt(std::initializer_list<double> v) { return v; }

}  // namespace

TEST(Parse, SumOfSquaresEvaluates) {
  const Expr e = parse("x1^2 + x2^2", 2);
  EXPECT_DOUBLE_EQ(evaluate(e, pt({1, 2})), 5.0);
}

TEST(Parse, UnaryFunctionInOneDimension) {
  const Expr e = parse("sin(x1)", 1);
  EXPECT_EQ(e.kind(), Expr::Kind::Sin);
  EXPECT_NEAR(evaluate(e, pt({0.5})), std::sin(0.5), 1e-15);
}

TEST(Parse, SphereFactorAtOrigin) {
  const Expr e = parse("4/(1+x1^2+x2^2)^2", 2);
  EXPECT_DOUBLE_EQ(evaluate(e, pt({0, 0})), 4.0);
  EXPECT_DOUBLE_EQ(evaluate(e, pt({1, 0})), 1.0);
}

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(evaluate(parse("2+3*4", 1), pt({0})), 14.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("8-3-2", 1), pt({0})), 3.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("8/4/2", 1), pt({0})), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("-x1^2", 1), pt({3})), -9.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("2^3^2", 1), pt({0})), 512.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("(x1+1)^-2", 1), pt({1})), 0.25);
}

TEST(Parse, ScientificLiterals) {
  EXPECT_DOUBLE_EQ(evaluate(parse("1.5e-3*x1", 1), pt({2})), 3e-3);
  EXPECT_DOUBLE_EQ(evaluate(parse(".5 + 2E1", 1), pt({0})), 20.5);
}

TEST(Parse, AllFunctions) {
  const Expr e = parse("sin(x1)+cos(x1)+exp(x1)+log(x1)+sqrt(x1)", 1);
  const double x = 0.7;
  EXPECT_NEAR(evaluate(e, pt({x})), std::sin(x) + std::cos(x) + std::exp(x) + std::log(x) + std::sqrt(x), 1e-14);
}

TEST(ParseErrors, SyntaxErrorCarriesPosition) {
  try {
    parse("x1 + * x2", 2);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(ParseErrors, UnknownIdentifier) {
  try {
    parse("tan(x1)", 1);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown identifier"), std::string::npos);
    EXPECT_EQ(e.position(), 0u);
  }
}

TEST(ParseErrors, VariableOutOfRange) {
  EXPECT_THROW(parse("x3", 2), ParseError);
  EXPECT_THROW(parse("x0", 2), ParseError);
}

TEST(ParseErrors, MalformedInputs) {
  EXPECT_THROW(parse("", 1), ParseError);
  EXPECT_THROW(parse("(x1", 1), ParseError);
  EXPECT_THROW(parse("x1)", 1), ParseError);
  EXPECT_THROW(parse("x1^x1", 1), ParseError);
  EXPECT_THROW(parse("x1^0.5", 1), ParseError);
  EXPECT_THROW(parse("sin x1", 1), ParseError);
}

TEST(ParseErrors, DenominatorsCheckedAtEvaluation) {
  const Expr e = parse("1/x1", 1);
  EXPECT_THROW(evaluate(e, pt({0})), DomainError);
  EXPECT_THROW(evaluate(parse("log(x1)", 1), pt({0})), DomainError);
  EXPECT_THROW(evaluate(parse("sqrt(x1)", 1), pt({-1})), DomainError);
}

TEST(Jet, SineAtZeroOrderThree) {
  const Jet j = eval_jet(parse("sin(x1)", 1), pt({0}), 3);
  EXPECT_DOUBLE_EQ(j.value(), 0.0);
  EXPECT_DOUBLE_EQ(j.d1(0), 1.0);
  EXPECT_DOUBLE_EQ(j.d2(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(j.d3(0, 0, 0), -1.0);
}

TEST(Jet, SumOfSquaresHessian) {
  const Jet j = eval_jet(parse("x1^2 + x2^2", 2), pt({1, 2}), 2);
  EXPECT_DOUBLE_EQ(j.value(), 5.0);
  EXPECT_DOUBLE_EQ(j.d1(0), 2.0);
  EXPECT_DOUBLE_EQ(j.d1(1), 4.0);
  EXPECT_DOUBLE_EQ(j.d2(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(j.d2(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(j.d2(0, 1), 0.0);
}

TEST(Jet, SphereFactorGradientMatchesDifferences) {
  const Expr e = parse("4/(1+x1^2+x2^2)^2", 2);
  const Jet j = eval_jet(e, pt({0, 0}), 1);
  EXPECT_DOUBLE_EQ(j.value(), 4.0);
  const auto f = oracle::as_function(e);
  for (int i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(j.d1(i), 0.0);
    EXPECT_NEAR(oracle::fd_first(f, {0, 0}, i, 1e-5), 0.0, 1e-9);
  }
}

TEST(Jet, DomainErrorNamesSubexpression) {
  try {
    eval_jet(parse("x2 + log(x1)", 2), pt({0, 1}), 1);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("log(x1)"), std::string::npos);
  }
  EXPECT_THROW(eval_jet(parse("sqrt(x1)", 1), pt({0}), 1), DomainError);
  EXPECT_NO_THROW(eval_jet(parse("sqrt(x1)", 1), pt({0}), 0));
  EXPECT_THROW(eval_jet(parse("1/(x1-x2)", 2), pt({1, 1}), 2), DomainError);
}

TEST(Jet, OrderZeroMatchesEvaluate) {
  const Expr e = parse("exp(x1)*cos(x2) - x1/(2+x2^2)", 2);
  EXPECT_DOUBLE_EQ(eval_jet(e, pt({0.3, -0.4}), 0).value(), evaluate(e, pt({0.3, -0.4})));
}

TEST(Jet, ThirdDerivativesOfProduct) {
  // f = x1^2 x2: d3(0,0,1) = 2, all permutations equal.
  const Jet j = eval_jet(parse("x1^2*x2", 2), pt({0.4, -1.3}), 3);
  EXPECT_DOUBLE_EQ(j.d3(0, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(j.d3(0, 1, 0), 2.0);
  EXPECT_DOUBLE_EQ(j.d3(1, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(j.d3(0, 0, 0), 0.0);
}

TEST(Expr, SubstituteComposes) {
  const Expr e = parse("x1*x2 + sin(x1)", 2);
  const std::vector<Expr> r = {parse("x1+x2", 2), parse("x1-x2", 2)};
  const Expr s = substitute(e, r);
  const double a = 0.3, b = -0.8;
  EXPECT_NEAR(evaluate(s, pt({a, b})), (a + b) * (a - b) + std::sin(a + b), 1e-15);
}

TEST(Expr, StrRoundTrips) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Expr e = oracle::random_expr(rng, 3, 3);
    const Expr again = parse(e.str(), 3);
    const std::vector<double> p = {0.2, -0.7, 0.5};
    EXPECT_EQ(evaluate(again, p), evaluate(e, p)) << e.str();
  }
}

// Property: jet derivatives agree with Richardson central differences.
TEST(JetProperty, MatchesFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const int dim = 1 + static_cast<int>(rng() % 4);
    const Expr e = oracle::random_expr(rng, dim, 3);
    std::vector<double> p(dim);
    for (double& v : p) v = coord(rng);
    const Jet j = eval_jet(e, p, 2);
    const auto f = oracle::as_function(e);
    for (int i = 0; i < dim; ++i) {
      ASSERT_LT(oracle::relative_error(j.d1(i), oracle::fd_first(f, p, i, 1e-5)), 1e-7) << e.str();
      for (int l = 0; l < dim; ++l)
        ASSERT_LT(oracle::relative_error(j.d2(i, l), oracle::fd_second(f, p, i, l, 1e-3)), 1e-5) << e.str();
    }
  }
}

// Property: derivative arrays are exactly symmetric.
TEST(JetProperty, ExactSymmetry) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const int dim = 2 + static_cast<int>(rng() % 3);
    const Expr e = oracle::random_expr(rng, dim, 3);
    std::vector<double> p(dim);
    for (double& v : p) v = coord(rng);
    const Jet j = eval_jet(e, p, 3);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        ASSERT_EQ(j.d2(a, b), j.d2(b, a));
        for (int c = 0; c < dim; ++c) {
          ASSERT_EQ(j.d3(a, b, c), j.d3(b, a, c));
          ASSERT_EQ(j.d3(a, b, c), j.d3(c, b, a));
          ASSERT_EQ(j.d3(a, b, c), j.d3(a, c, b));
        }
      }
  }
}

// Third derivatives against differences of the exact second derivatives.
TEST(JetProperty, ThirdOrderMatchesDifferencedHessian) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const Expr e = oracle::random_expr(rng, dim, 3);
    std::vector<double> p(dim);
    for (double& v : p) v = coord(rng);
    const Jet j = eval_jet(e, p, 3);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        const oracle::Fn h = [&](const std::vector<double>& x) { return eval_jet(e, x, 2).d2(a, b); };
        for (int c = 0; c < dim; ++c)
          ASSERT_LT(oracle::relative_error(j.d3(a, b, c), oracle::fd_first(h, p, c, 1e-4)), 1e-6) << e.str();
      }
  }
}
