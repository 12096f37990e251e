#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anicon/expr.hpp"

using namespace anicon;

namespace {

// Random tree over the four variables, non-negative constants and all node
// kinds the grammar can produce.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 13);
  std::uniform_int_distribution<int> var(0, 3);
  std::uniform_real_distribution<double> val(0.0, 5.0);
  switch (pick(rng)) {
    case 0:
      return Expr::constant(std::round(val(rng) * 100.0) / 100.0);
    case 1:
      return Expr::variable(var(rng));
    case 2:
      return Expr::constant(val(rng));
    case 3:
      return Expr::unary(Op::kNeg, random_expr(rng, depth - 1));
    case 4:
      return Expr::unary(Op::kSqrt, random_expr(rng, depth - 1));
    case 5:
      return Expr::unary(Op::kSin, random_expr(rng, depth - 1));
    case 6:
      return Expr::unary(Op::kCos, random_expr(rng, depth - 1));
    case 7:
      return Expr::unary(Op::kExp, random_expr(rng, depth - 1));
    case 8:
      return Expr::unary(Op::kLn, random_expr(rng, depth - 1));
    case 9:
      return Expr::binary(Op::kAdd, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 10:
      return Expr::binary(Op::kSub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 11:
      return Expr::binary(Op::kMul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 12:
      return Expr::binary(Op::kDiv, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: {
      const double exps[] = {2.0, 3.0, 0.5, -1.0, -2.5, 1.0 / 3.0};
      std::uniform_int_distribution<int> e(0, 5);
      return Expr::power(random_expr(rng, depth - 1), exps[e(rng)]);
    }
  }
}

// Random polynomial as (expr, exact evaluator of a partial derivative).
struct Monomial {
  double c;
  MultiIndex a;
};

}  // namespace

TEST(ExprParse, SumOfSquares) {
  const Expr e = parse("y1^2 + y2^2");
  const Expr expected = Expr::binary(Op::kAdd, Expr::power(Expr::variable(kY1), 2.0),
                                     Expr::power(Expr::variable(kY2), 2.0));
  EXPECT_TRUE(e == expected);
}

TEST(ExprParse, SphereNormWithParameter) {
  const Expr e = parse("sqrt((1 - a^2*sin(x1)^2)*y1^2 + sin(x1)^2*y2^2)", {"a"});
  EXPECT_EQ(e.root().op, Op::kSqrt);
  EXPECT_EQ(e.parameters(), std::vector<std::string>{"a"});
  EXPECT_TRUE(e.depends_on(kX1));
  EXPECT_FALSE(e.depends_on(kX2));
  const double theta = 1.1, a = 0.5;
  const double expected =
      std::sqrt((1 - a * a * std::sin(theta) * std::sin(theta)) * 0.3 * 0.3 +
                std::sin(theta) * std::sin(theta) * 0.8 * 0.8);
  EXPECT_NEAR(evaluate(e, {theta, 0.0, 0.3, 0.8}, {{"a", a}}), expected, 1e-15);
}

TEST(ExprParse, DoubleCaretReportsColumn) {
  try {
    parse("y1^^2");
    FAIL() << "expected a syntax error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 4);
  }
}

TEST(ExprParse, ErrorsCarryLineAndColumn) {
  try {
    parse("y1 +\n  foo");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 3);
    EXPECT_NE(e.detail().find("unknown identifier"), std::string::npos);
  }
  EXPECT_THROW(parse("y1^y2"), ParseError);
  EXPECT_THROW(parse("y1^(a)", {"a"}), ParseError);
  EXPECT_THROW(parse("y1 + "), ParseError);
  EXPECT_THROW(parse("(y1"), ParseError);
  EXPECT_THROW(parse("sin y1"), ParseError);
  EXPECT_THROW(parse("y1 $ y2"), ParseError);
  EXPECT_THROW(parse("abs(y1)"), ParseError);
  try {
    parse("y1^x1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.detail().find("non-constant exponent"), std::string::npos);
  }
}

TEST(ExprParse, Precedence) {
  // pow binds tighter than unary minus, which binds tighter than mul.
  EXPECT_TRUE(parse("-y1^2") == Expr::unary(Op::kNeg, Expr::power(Expr::variable(kY1), 2)));
  EXPECT_NEAR(evaluate(parse("-2^2"), {}), -4.0, 0.0);
  EXPECT_NEAR(evaluate(parse("8/4/2"), {}), 1.0, 0.0);
  EXPECT_NEAR(evaluate(parse("2 - 3 - 4"), {}), -5.0, 0.0);
  EXPECT_NEAR(evaluate(parse("2*-3"), {}), -6.0, 0.0);
  EXPECT_NEAR(evaluate(parse("4^(1/2)"), {}), 2.0, 0.0);
  EXPECT_NEAR(evaluate(parse("4^-1"), {}), 0.25, 0.0);
  EXPECT_NEAR(evaluate(parse("1.5e2 + .5"), {}), 150.5, 0.0);
  EXPECT_NEAR(evaluate(parse("cos(pi)"), {}), -1.0, 1e-15);
}

TEST(ExprPrint, RoundTripGeneratedTrees) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const Expr e = random_expr(rng, 5);
    const std::string text = print(e);
    const Expr back = parse(text);
    EXPECT_TRUE(back == e) << text;
  }
}

TEST(ExprPrint, RoundTripParsedSources) {
  for (const char* src : {"sqrt(y1^2+x1^2*y2^2)+b*(cos(x2)*y1 - x1*sin(x2)*y2)", "-(-y1)", "y1^(-1)",
                          "(y1 - y2) - (x1 - x2)", "y1/(y2/x1)", "(-y1)^2", "exp(ln(y1))*2e-3"}) {
    const Expr e = parse(src, {"b"});
    EXPECT_TRUE(parse(print(e), {"b"}) == e) << src << " -> " << print(e);
  }
}

TEST(ExprJet, BilinearMixedPartial) {
  const Expr e = parse("y1*y2");
  const Jet j = eval_jet(e, Point4{0, 0, 1.5, -2.0}, 2);
  EXPECT_EQ(j.partial({0, 0, 1, 1}), 1.0);
  EXPECT_EQ(j.value(), -3.0);
}

TEST(ExprJet, EuclideanNormGradient) {
  const Jet j = eval_jet(parse("sqrt(y1^2+y2^2)"), Point4{0, 0, 3, 4}, 3);
  EXPECT_DOUBLE_EQ(j.value(), 5.0);
  EXPECT_DOUBLE_EQ(j.partial({0, 0, 1, 0}), 0.6);
}

TEST(ExprJet, ExpOfLogMatchesIdentityJet) {
  const Point4 p{0.1, 0.2, 2.0, 0.5};
  const Jet j = eval_jet(parse("exp(ln(y1))"), p, 3);
  const Jet id = Jet::variable(kY1, p, 3);
  for (std::size_t k = 0; k < j.coeffs().size(); ++k) EXPECT_NEAR(j.coeffs()[k], id.coeffs()[k], 1e-14);
}

TEST(ExprJet, ExactOnPolynomials) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> deg(0, 3);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const Point4 p{0.7, -0.4, 1.2, 0.9};
  const int K = 6;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Monomial> terms;
    std::string src;
    for (int t = 0; t < 5; ++t) {
      MultiIndex a{deg(rng), deg(rng), deg(rng), deg(rng)};
      while (a[0] + a[1] + a[2] + a[3] > K) a[rng() % 4] = 0;
      const double c = std::round(coef(rng) * 1000.0) / 1000.0;
      terms.push_back({c, a});
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s(0%+.3f)*x1^%d*x2^%d*y1^%d*y2^%d", t ? " + " : "", c, a[0], a[1], a[2], a[3]);
      src += buf;
    }
    const Jet j = eval_jet(parse(src), p, K);
    for (std::size_t k = 0; k < monomial_count(K); ++k) {
      const MultiIndex& alpha = monomial(k);
      double exact = 0.0;
      for (const auto& m : terms) {
        double d = m.c;
        for (int v = 0; v < 4; ++v) {
          if (alpha[v] > m.a[v]) {
            d = 0.0;
            break;
          }
          for (int r = 0; r < alpha[v]; ++r) d *= (m.a[v] - r);
          d *= std::pow(p[v], m.a[v] - alpha[v]);
        }
        exact += d;
      }
      EXPECT_NEAR(j.partial(alpha), exact, 1e-11 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST(ExprJet, ChainRuleAgainstFiniteDifferences) {
  std::mt19937_64 rng(5);
  const Point4 p{0.35, 0.6, 1.25, 0.8};
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 60; ++trial) {
    const Expr e = random_expr(rng, 4);
    Jet j;
    try {
      j = eval_jet(e, p, 1);
    } catch (const DomainError&) {
      continue;
    }
    bool ok = true;
    for (int v = 0; v < 4 && ok; ++v) {
      const double h = 1e-6;
      Point4 lo = p, hi = p;
      lo[v] -= h;
      hi[v] += h;
      double fl = 0, fh = 0;
      try {
        fl = evaluate(e, lo);
        fh = evaluate(e, hi);
      } catch (const DomainError&) {
        ok = false;
        break;
      }
      const double fd = (fh - fl) / (2 * h);
      MultiIndex a{};
      a[v] = 1;
      const double jd = j.partial(a);
      // Skip expressions whose magnitude makes a difference quotient meaningless.
      if (std::abs(j.value()) > 1e6 || std::abs(jd) > 1e6) {
        ok = false;
        break;
      }
      EXPECT_NEAR(jd, fd, 1e-6 * std::max(1.0, std::abs(jd))) << print(e) << " var " << v;
    }
    if (ok) ++checked;
  }
  EXPECT_GE(checked, 40);
}

TEST(ExprJet, DomainErrors) {
  EXPECT_THROW(eval_jet(parse("sqrt(y1)"), Point4{0, 0, -1, 1}, 2), DomainError);
  EXPECT_THROW(eval_jet(parse("ln(y1 - y1)"), Point4{0, 0, 1, 1}, 2), DomainError);
  EXPECT_THROW(eval_jet(parse("1/(y1 - 1)"), Point4{0, 0, 1, 1}, 2), DomainError);
  EXPECT_THROW(evaluate(parse("1/(y1 - 1)"), Point4{0, 0, 1, 1}), DomainError);
}

TEST(ExprParams, Validation) {
  EXPECT_THROW(validate_params({{"a", 1.0}, {"a", 2.0}}), std::invalid_argument);
  EXPECT_THROW(validate_params({{"y1", 1.0}}), std::invalid_argument);
  EXPECT_THROW(validate_params({{"b", std::nan("")}}), std::invalid_argument);
  EXPECT_THROW(validate_params({{"2b", 1.0}}), std::invalid_argument);
  EXPECT_NO_THROW(validate_params({{"a", 0.5}, {"b", -1.0}}));
  EXPECT_THROW(evaluate(parse("a*y1", {"a"}), Point4{}), std::invalid_argument);
}
