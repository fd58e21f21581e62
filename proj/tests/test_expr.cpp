#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "liouville/expr.hpp"

using namespace liouville;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("parse builds the expected trees", "[expr]") {
  CHECK(parse("0") == Expr::constant(0.0));
  const Expr e = parse("log(16/m^2)");
  const Expr expected = Expr::unary(
      Expr::Func::log,
      Expr::binary(Expr::Op::div, Expr::constant(16.0),
                   Expr::binary(Expr::Op::pow, Expr::parameter("m"), Expr::constant(2.0))));
  CHECK(e == expected);
  CHECK(evaluate(parse("2*x + sin(x)^2"), 0.0) == 0.0);
}

TEST_CASE("operator precedence and associativity", "[expr]") {
  CHECK(evaluate(parse("2^3^2"), 0.0) == 512.0);
  CHECK(evaluate(parse("-2^2"), 0.0) == -4.0);
  CHECK(evaluate(parse("8/4/2"), 0.0) == 1.0);
  CHECK(evaluate(parse("1 - 2 - 3"), 0.0) == -4.0);
  CHECK(evaluate(parse("2*x^2"), 3.0) == 18.0);
  CHECK(evaluate(parse("1.5e1 + .5"), 0.0) == 15.5);
}

TEST_CASE("evaluate examples", "[expr]") {
  CHECK(evaluate(parse("exp(x)"), 0.0) == 1.0);
  for (double x : {-3.0, 0.0, 7.5}) CHECK(evaluate(parse("m^2/16"), x, {{"m", 4.0}}) == 1.0);
  CHECK_THROWS_AS(evaluate(parse("log(x)"), -1.0), DomainError);
}

TEST_CASE("evaluation errors are reported, never silent", "[expr]") {
  CHECK_THROWS_AS(evaluate(parse("log(x)"), 0.0), DomainError);
  CHECK_THROWS_AS(evaluate(parse("1/x"), 0.0), DomainError);
  CHECK_THROWS_AS(evaluate(parse("sqrt(x)"), -1.0), DomainError);
  CHECK_THROWS_AS(evaluate(parse("exp(exp(x))"), 10.0), DomainError);
  CHECK_THROWS_AS(evaluate(parse("x^0.5"), -2.0), DomainError);
  CHECK(evaluate(parse("x^3"), -2.0) == -8.0);
  CHECK_THROWS_AS(evaluate(parse("m*x"), 1.0), UnboundParameter);
}

TEST_CASE("parse errors carry position and expectation", "[expr]") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1 +"), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("sin x"), ParseError);
  CHECK_THROWS_AS(parse("2 3"), ParseError);
  try {
    parse("x + )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("unknown identifiers list the known symbols", "[expr]") {
  try {
    parse("sech(x)");
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name() == "sech");
    const std::string msg = e.what();
    CHECK(msg.find("cosh") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("y + 1"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("k*x", {"m"}), UnknownIdentifier);
  CHECK_NOTHROW(parse("k*x", {"k"}));
}

TEST_CASE("the variable name is configurable", "[expr]") {
  CHECK(parse("sin(s)", {}, "s") == parse("sin(x)"));
  CHECK_THROWS_AS(parse("sin(x)", {}, "s"), UnknownIdentifier);
}

TEST_CASE("differentiate examples", "[expr]") {
  CHECK(evaluate(differentiate(parse("x")), 2.0) == 1.0);
  CHECK(evaluate(differentiate(parse("tanh(x)")), 0.0) == 1.0);
  const Expr e = parse("exp(2*x)");
  const double delta = 1e-5, x = 0.5;
  const double fd = (evaluate(e, x + delta) - evaluate(e, x - delta)) / (2 * delta);
  CHECK_THAT(evaluate(differentiate(e), x), WithinAbs(fd, 1e-8));
  CHECK_THROWS_AS(differentiate(parse("abs(x)")), NotDifferentiable);
}

TEST_CASE("derivatives of every function match their closed forms", "[expr]") {
  const double x = 0.37;
  const struct {
    const char* f;
    double derivative;
  } cases[] = {
      {"sin(x)", std::cos(x)},
      {"cos(x)", -std::sin(x)},
      {"tan(x)", 1.0 / (std::cos(x) * std::cos(x))},
      {"sinh(x)", std::cosh(x)},
      {"cosh(x)", std::sinh(x)},
      {"log(x)", 1.0 / x},
      {"sqrt(x)", 0.5 / std::sqrt(x)},
      {"x^x", std::pow(x, x) * (std::log(x) + 1.0)},
      {"neg(x)", -1.0},
      {"3/x", -3.0 / (x * x)},
  };
  for (const auto& c : cases) {
    INFO(c.f);
    CHECK_THAT(evaluate(differentiate(parse(c.f)), x), WithinRel(c.derivative, 1e-13));
  }
}

namespace {

// Random trees built only from operations that are smooth on [-1, 1].
Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  switch (pick(rng)) {
    case 0: return Expr::variable();
    case 1: return Expr::constant(std::round(coef(rng) * 100.0) / 100.0);
    case 2: return Expr::unary(Expr::Func::sin, random_tree(rng, depth - 1));
    case 3: return Expr::unary(Expr::Func::cos, random_tree(rng, depth - 1));
    case 4: return Expr::unary(Expr::Func::tanh, random_tree(rng, depth - 1));
    case 5:
      return Expr::unary(Expr::Func::exp, Expr::unary(Expr::Func::sin, random_tree(rng, depth - 1)));
    case 6: return Expr::binary(Expr::Op::add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7: return Expr::binary(Expr::Op::sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 8: return Expr::binary(Expr::Op::mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    default:
      return Expr::binary(Expr::Op::pow, random_tree(rng, depth - 1),
                          Expr::constant(static_cast<double>(std::uniform_int_distribution<int>(2, 3)(rng))));
  }
}

double central(const Expr& e, double x, double d) { return (evaluate(e, x + d) - evaluate(e, x - d)) / (2 * d); }

}  // namespace

TEST_CASE("symbolic derivatives agree with central differences to second order", "[expr][property]") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  const double delta = 1e-4;
  int ratio_checks = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Expr e = random_tree(rng, 6);
    const Expr d1 = differentiate(e);
    const Expr d3 = differentiate(differentiate(d1));
    const Expr d5 = differentiate(differentiate(d3));
    INFO(to_string(e));
    for (int k = 0; k < 100; ++k) {
      const double x = point(rng);
      double exact = 0.0, third = 0.0, fifth = 0.0;
      try {
        exact = evaluate(d1, x);
        third = std::abs(evaluate(d3, x));
        fifth = std::abs(evaluate(d5, x));
      } catch (const DomainError&) {
        // Nested powers of exponentials can overflow; such points are outside the domain.
        continue;
      }
      const double scale = std::abs(evaluate(e, x)) + 1.0;
      const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * scale / delta;
      const double err = std::abs(central(e, x, delta) - exact);
      CHECK(err <= 1.5 * third / 6.0 * delta * delta + roundoff);

      // Where the leading delta^2 term dominates both round-off and the
      // delta^4 term, halving delta must cut the error by 4.
      const double coarse = central(e, x, 1e-2) - exact;
      const double fine = central(e, x, 5e-3) - exact;
      const double fine_roundoff = roundoff * delta / 5e-3;
      const bool leading = fifth / 120.0 * 1e-4 <= 0.02 * third / 6.0;
      if (std::abs(fine) > 1e3 * fine_roundoff && third > 1e-3 && leading) {
        ++ratio_checks;
        CHECK_THAT(coarse / fine, WithinAbs(4.0, 1.0));
      }
    }
  }
  CHECK(ratio_checks > 1000);
}

TEST_CASE("printing is stable under re-parsing", "[expr][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Expr e = random_tree(rng, 6);
    const std::string printed = to_string(e);
    INFO(printed);
    const Expr once = parse(printed);
    CHECK(parse(to_string(once)) == once);
    for (double x : {-0.9, 0.1, 0.7}) {
      try {
        const double expected = evaluate(e, x);
        CHECK(evaluate(once, x) == expected);
      } catch (const DomainError&) {
        CHECK_THROWS_AS(evaluate(once, x), DomainError);
      }
    }
  }
  for (const char* text : {"-x^2", "(-3)*x", "x - (1 - x)", "2^(1/2)", "neg(neg(x))", "1e-7*x", "m/(4*m)"}) {
    const Expr e = parse(text);
    CHECK(parse(to_string(e)) == e);
  }
}

TEST_CASE("parameter and integer helpers", "[expr]") {
  CHECK(parameters_of(parse("a*x + m", {"a", "m"})) == std::vector<std::string>{"a", "m"});
  CHECK(constant_integer(parse("3")) == 3);
  CHECK_FALSE(constant_integer(parse("2.5")).has_value());
  CHECK_FALSE(constant_integer(parse("x")).has_value());
}
