#include "anharm/expr.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "anharm/errors.hpp"

namespace anharm {
namespace {

double eval1(const char* text, double x, double xi = 0.0) {
  return Expression::parse(text)(std::span<const double>(&x, 1), std::span<const double>(&xi, 1));
}

TEST(Expression, ArithmeticAndPrecedence) {
  EXPECT_DOUBLE_EQ(eval1("1 + 2 * 3", 0.0), 7.0);
  EXPECT_DOUBLE_EQ(eval1("(1 + 2) * 3", 0.0), 9.0);
  EXPECT_DOUBLE_EQ(eval1("2 ^ 3 ^ 2", 0.0), 512.0);
  EXPECT_DOUBLE_EQ(eval1("-2 ^ 2", 0.0), -4.0);
  EXPECT_DOUBLE_EQ(eval1("8 / 4 / 2", 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval1("2e-1 * 10", 0.0), 2.0);
}

TEST(Expression, IntegerPowersKeepNegativeBases) {
  EXPECT_DOUBLE_EQ(eval1("x^3", -2.0), -8.0);
  EXPECT_DOUBLE_EQ(eval1("x^-2", -2.0), 0.25);
  EXPECT_TRUE(std::isnan(eval1("x^0.5", -2.0)));
}

TEST(Expression, Functions) {
  EXPECT_DOUBLE_EQ(eval1("br(x)", 3.0), std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(eval1("abs(x) + sqrt(4)", -1.5), 3.5);
  EXPECT_NEAR(eval1("log(exp(x))", 0.7), 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(eval1("pi", 0.0), std::numbers::pi);
}

TEST(Expression, VariablesAndIndices) {
  const Expression e = Expression::parse("x[1]^2 + xi[0]");
  EXPECT_EQ(e.max_index(), 1);
  EXPECT_TRUE(e.uses_x());
  EXPECT_TRUE(e.uses_xi());
  const std::vector<double> x{5.0, 3.0};
  const std::vector<double> xi{2.0, 7.0};
  EXPECT_DOUBLE_EQ(e(x, xi), 11.0);
  // Indices past the argument read as zero.
  const std::vector<double> short_x{5.0};
  EXPECT_DOUBLE_EQ(e(short_x, xi), 2.0);
}

TEST(Expression, ParseErrorsCarryOffset) {
  try {
    Expression::parse("1 + foo(x)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(Expression::parse("(1 + 2"), ParseError);
  EXPECT_THROW(Expression::parse("1 +"), ParseError);
  EXPECT_THROW(Expression::parse("x[]"), ParseError);
  EXPECT_THROW(Expression::parse("2 3"), ParseError);
  EXPECT_THROW(Expression::parse(""), ParseError);
}

TEST(Expression, TextIsKept) {
  EXPECT_EQ(Expression::parse("x^2 + 1").text(), "x^2 + 1");
}

}  // namespace
}  // namespace anharm
