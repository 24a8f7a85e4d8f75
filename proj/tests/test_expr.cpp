#include <doctest.h>

#include <cmath>
#include <random>

#include "rce/expr.hpp"

using namespace rce;

namespace {

double central_difference(const Expr& e, double t, double h = 1e-5) {
  return (evaluate(e, t + h) - evaluate(e, t - h)) / (2.0 * h);
}

// random expression trees for the derivative property, biased toward leaves
Expr random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> leaf(0, 2);
  std::uniform_real_distribution<double> cval(-3.0, 3.0);
  if (depth <= 0 || leaf(rng) == 0) {
    return leaf(rng) == 1 ? Expr::time() : Expr::constant(cval(rng));
  }
  std::uniform_int_distribution<int> pick(0, 8);
  Expr a = random_expr(rng, depth - 1);
  Expr b = random_expr(rng, depth - 1);
  switch (pick(rng)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / b;
    case 4: return -a;
    case 5: return cos(a);
    case 6: return sin(a);
    case 7: return exp(Expr::constant(0.3) * sin(a));
    default: {
      std::uniform_int_distribution<int> ex(1, 3);
      return pow(a, Rational(ex(rng), 1));
    }
  }
}

}  // namespace

TEST_CASE("parser handles calls, precedence and arithmetic") {
  Expr e = parse_expression("cos(t)");
  CHECK(e.kind() == ExprKind::Cos);
  CHECK(e.child(0).kind() == ExprKind::Time);

  // (4*5^2-1)/(4*t^2)-1 evaluates to 99/4 - 1 at t = 1
  Expr f = parse_expression("(4*5^2-1)/(4*t^2)-1");
  CHECK(evaluate(f, 1.0) == doctest::Approx(23.75).epsilon(1e-15));

  CHECK(evaluate(parse_expression("2^3^2"), 0.0) == doctest::Approx(512.0));
  CHECK(evaluate(parse_expression("-2^2"), 0.0) == doctest::Approx(-4.0));
  CHECK(evaluate(parse_expression("2*t^-1"), 4.0) == doctest::Approx(0.5));
}

TEST_CASE("syntax errors carry byte offsets") {
  CHECK_THROWS_AS(parse_expression("2+*3"), ParseError);
  try {
    parse_expression("2+*3");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_expression("foo(t)"), ParseError);
  CHECK_THROWS_AS(parse_expression("2+x"), ParseError);
  CHECK_THROWS_AS(parse_expression("(1+t"), ParseError);
}

TEST_CASE("general real exponents are rejected, rationals kept exact") {
  Expr e = parse_expression("t^(3/2)");
  CHECK(e.exponent() == Rational(3, 2));
  CHECK(evaluate(e, 4.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(parse_expression("t^(2^(1/2))"), ParseError);
  CHECK_THROWS_AS(parse_expression("t^t"), ParseError);
}

TEST_CASE("evaluation flags singular points") {
  CHECK(evaluate(parse_expression("cos(t)"), 0.0) == doctest::Approx(1.0));
  CHECK(evaluate(parse_expression("2/t^2"), 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(evaluate(parse_expression("1/t"), 0.0), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expression("ln(t)"), -1.0), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expression("sqrt(t)"), -1.0), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expression("t^(1/2)"), -2.0), EvalError);
}

TEST_CASE("symbolic differentiation matches closed forms") {
  Expr t2 = parse_expression("t^2");
  CHECK(evaluate(differentiate(t2), 3.0) == doctest::Approx(6.0));

  Expr c = parse_expression("cos(t)");
  CHECK(evaluate(differentiate(c), 0.0) == doctest::Approx(0.0));

  // d/dt (-1/(2t)) = 1/(2t^2), cross-checked by central differences at t = 2
  Expr shift = parse_expression("-1/(2*t)");
  Expr d = differentiate(shift);
  CHECK(evaluate(d, 2.0) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  CHECK(evaluate(d, 2.0) == doctest::Approx(central_difference(shift, 2.0)).epsilon(1e-8));

  Expr frac = parse_expression("t^(3/2)");
  CHECK(evaluate(differentiate(frac), 4.0) == doctest::Approx(3.0));
}

TEST_CASE("derivatives agree with central differences on random expressions") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> tt(-2.0, 2.0);
  int checked = 0;
  for (int i = 0; i < 600 && checked < 200; ++i) {
    Expr e = random_expr(rng, 4);
    Expr d;
    try {
      d = differentiate(e);
    } catch (const std::exception&) {
      continue;
    }
    double t = tt(rng);
    double v, sym, num;
    try {
      v = evaluate(e, t);
      sym = evaluate(d, t);
      num = central_difference(e, t);
      // skip near-singular samples where the finite difference itself is bad
      double probe = std::max({std::abs(evaluate(e, t + 1e-5)), std::abs(evaluate(e, t - 1e-5)),
                               std::abs(v)});
      if (!std::isfinite(sym) || !std::isfinite(num) || probe > 1e6) continue;
      if (std::abs(sym) > 1e5) continue;
    } catch (const EvalError&) {
      continue;
    }
    ++checked;
    CHECK(std::abs(sym - num) <= 1e-6 * (1.0 + std::abs(v)) + 1e-4 * std::abs(sym));
  }
  CHECK(checked == 200);
}

TEST_CASE("print then parse is the identity on simplified trees") {
  std::mt19937 rng(77);
  for (int i = 0; i < 120; ++i) {
    Expr e = simplify(random_expr(rng, 4));
    Expr round = parse_expression(to_string(e));
    CHECK(structurally_equal(round, e));
  }
  // identity elimination examples
  Expr x = parse_expression("t+0");
  CHECK(structurally_equal(x, Expr::time()));
  CHECK(parse_expression("t*0").is_constant(0.0));
  CHECK(structurally_equal(parse_expression("1*t"), Expr::time()));
}

TEST_CASE("eager singular point detection") {
  auto pts = detect_singular_points(parse_expression("2/t^2"));
  REQUIRE(pts.size() == 1);
  CHECK(pts[0] == doctest::Approx(0.0));

  pts = detect_singular_points(parse_expression("ln(2*t-4)"));
  REQUIRE(pts.size() == 1);
  CHECK(pts[0] == doctest::Approx(2.0));

  pts = detect_singular_points(parse_expression("sqrt(t+1)/t"));
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == doctest::Approx(-1.0));
  CHECK(pts[1] == doctest::Approx(0.0));
}

TEST_CASE("coefficient functions carry exact derivatives") {
  CoefficientFn f = CoefficientFn::parse("1-25/t^2", {}, {0.0});
  CHECK(f(1.0) == doctest::Approx(-24.0));
  CHECK(f.derivative_at(1.0) == doctest::Approx(50.0));
  REQUIRE(f.singular_points().size() == 1);
  CHECK(f.singular_points()[0] == doctest::Approx(0.0));
  CHECK(structurally_equal(f.derivative(), differentiate(f.value())));
}
