#include <doctest.h>

#include <cmath>
#include <random>

#include "liouplan/errors.hpp"
#include "liouplan/expr.hpp"
#include "support.hpp"

using namespace liouplan;
using testing_support::random_any_tree;
using testing_support::random_smooth_tree;

namespace {

Expr v(const char* name) { return Expr::variable(name); }
Expr c(double x) { return Expr::constant(x); }

}  // namespace

TEST_CASE("parse builds the grammar-forced trees") {
  CHECK(parse_expression("x2 + x3^2") == v("x2") + Expr::power(v("x3"), 2));
  CHECK(parse_expression("y + y'^2") == v("y") + Expr::power(v("y'"), 2));
  CHECK(parse_expression("a - b - c") == (v("a") - v("b")) - v("c"));
  CHECK(parse_expression("a / b * c") == (v("a") / v("b")) * v("c"));
  CHECK(parse_expression("-x^2") == -Expr::power(v("x"), 2));
  CHECK(parse_expression("-3") == c(-3));
  CHECK(parse_expression("2^-1") == Expr::power(c(2), -1));
  CHECK(parse_expression("sin ( t )") == Expr::unary(UnaryFn::Sin, v("t")));
  CHECK(parse_expression("1.5e-3").value() == 1.5e-3);
  CHECK(parse_expression(".5").value() == 0.5);
}

TEST_CASE("parse errors carry the byte offset") {
  auto offset_of = [](const char* text) -> std::size_t {
    try {
      parse_expression(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    FAIL("no ParseError for " << text);
    return 0;
  };
  CHECK(offset_of("sin(") == 4);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("x +") == 3);
  CHECK(offset_of("(x") == 2);
  CHECK(offset_of("x ) ") == 2);
  CHECK(offset_of("x^y") == 2);
  CHECK(offset_of("x^2.5") == 3);
  CHECK(offset_of("foo(x)") == 0);
  CHECK(offset_of("2 * * 3") == 4);
  CHECK(offset_of("x \xc3\xa9") == 2);
  CHECK_THROWS_AS(parse_expression("1e999"), ParseError);
}

TEST_CASE("unknown function is reported by name") {
  try {
    parse_expression("x + frob(1)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(std::string(e.what()).find("frob") != std::string::npos);
  }
}

TEST_CASE("evaluate") {
  CHECK(evaluate(parse_expression("sin(t)"), {{"t", 0.0}}) == 0.0);
  CHECK(evaluate(parse_expression("y + y'^2"), {{"y", 4.0}, {"y'", 2.0}}) == 8.0);
  CHECK(evaluate(parse_expression("2^-2"), {}) == 0.25);
  CHECK(evaluate(parse_expression("sign(x)"), {{"x", 0.0}}) == 0.0);
  CHECK(evaluate(parse_expression("sign(x)"), {{"x", -2.0}}) == -1.0);
}

TEST_CASE("evaluate fails loudly") {
  CHECK_THROWS_AS(evaluate(parse_expression("1/xi"), {{"xi", 0.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("ln(x)"), {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("sqrt(x)"), {{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("asin(x)"), {{"x", 1.5}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("x^-1"), {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("exp(x)"), {{"x", 1000.0}}), DomainError);
  try {
    evaluate(parse_expression("x + q"), {{"x", 1.0}});
    FAIL("expected UnboundVariable");
  } catch (const UnboundVariable& e) {
    CHECK(e.name() == "q");
  }
}

TEST_CASE("partial derivatives") {
  CHECK(partial_derivative(parse_expression("x2 + x3^2"), "x3") == c(2) * v("x3"));
  CHECK(partial_derivative(parse_expression("cos(v2)"), "v2") == -Expr::unary(UnaryFn::Sin, v("v2")));
  CHECK(partial_derivative(parse_expression("u1"), "x1") == c(0));
  CHECK(partial_derivative(parse_expression("abs(x)"), "x") == Expr::unary(UnaryFn::Sign, v("x")));
  CHECK(partial_derivative(parse_expression("y'^2"), "y") == c(0));
}

TEST_CASE("simplify examples") {
  CHECK(simplify(parse_expression("0*u + x2")) == v("x2"));
  CHECK(simplify(parse_expression("2+3")) == c(5));
  CHECK(simplify(parse_expression("sin(x)+0*cos(x)")) == Expr::unary(UnaryFn::Sin, v("x")));
  CHECK(simplify(parse_expression("x^1")) == v("x"));
  CHECK(simplify(parse_expression("x^0")) == c(1));
  CHECK(simplify(parse_expression("-(-x)")) == v("x"));
  CHECK(simplify(parse_expression("1/0")) == parse_expression("1/0"));
}

TEST_CASE("property: print then parse is the identity on trees") {
  std::mt19937_64 rng(0xC0FFEE);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_any_tree(rng, 5);
    const std::string text = to_string(e);
    const Expr back = parse_expression(text);
    REQUIRE_MESSAGE(back == e, text);
    CHECK(to_string(back) == text);
  }
}

TEST_CASE("property: derivatives match central differences") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vars{"a", "b", "c"};
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Expr e = random_smooth_tree(rng, 4, vars);
    Binding at;
    for (const auto& name : vars) at[name] = testing_support::uniform(rng, -1.2, 1.2);
    const std::string& var = vars[static_cast<std::size_t>(i % 3)];
    const double h = 1e-5;
    Binding lo = at, hi = at;
    lo[var] -= h;
    hi[var] += h;
    const double fd = (evaluate(e, hi) - evaluate(e, lo)) / (2 * h);
    const double exact = evaluate(partial_derivative(e, var), at);
    CHECK_MESSAGE(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)), to_string(e));
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("property: simplify preserves value and is idempotent") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vars{"a", "b", "c"};
  for (int i = 0; i < 500; ++i) {
    Expr e = random_smooth_tree(rng, 5, vars);
    // Sprinkle in neutral and absorbing elements.
    if (i % 3 == 0) e = c(0) * random_smooth_tree(rng, 2, vars) + e * c(1);
    if (i % 5 == 0) e = Expr::power(e, 1) - c(0);
    const Expr s = simplify(e);
    CHECK(simplify(s) == s);
    Binding at;
    for (const auto& name : vars) at[name] = testing_support::uniform(rng, -1.5, 1.5);
    const double a = evaluate(e, at);
    const double b = evaluate(s, at);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("property: derivative output round-trips through text") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> vars{"a", "b"};
  for (int i = 0; i < 300; ++i) {
    const Expr d = partial_derivative(random_smooth_tree(rng, 4, vars), "a");
    CHECK(parse_expression(to_string(d)) == d);
  }
}

TEST_CASE("names and primes") {
  CHECK(is_valid_variable_name("y''"));
  CHECK(is_valid_variable_name("x_1"));
  CHECK_FALSE(is_valid_variable_name("1x"));
  CHECK_FALSE(is_valid_variable_name("y'a"));
  CHECK(split_primes("y''").first == "y");
  CHECK(split_primes("y''").second == 2);
  CHECK(with_primes("y", 3) == "y'''");
  CHECK(variables(parse_expression("x + sin(y') * x")) == std::set<std::string>{"x", "y'"});
  CHECK(mentions(parse_expression("x + 1"), "x"));
  CHECK_FALSE(mentions(parse_expression("x + 1"), "y"));
  CHECK_THROWS_AS(Expr::variable("2x"), InputError);
  CHECK_THROWS_AS(Expr::constant(NAN), InputError);
}
