// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "degenkernel/expr.hpp"

using namespace degenkernel;

TEST_CASE("precedence and associativity") {
  CHECK(expr::eval(expr::parse("2^3^2"), 0.0) == 512.0);
  CHECK(expr::eval(expr::parse("-x^2"), 3.0) == -9.0);
  CHECK(expr::eval(expr::parse("1 + 2*x - 6/3"), 2.0) == 3.0);
  CHECK(expr::eval(expr::parse("pow(x, 0.5) * exp(-x)"), 4.0) == doctest::Approx(2.0 * std::exp(-4.0)));
}

TEST_CASE("syntax errors report the offset") {
  try {
    expr::parse("x^");
    FAIL("expected a syntax error");
  } catch (const expr::SyntaxError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(expr::parse("2x"), UsageError);
  CHECK_THROWS_AS(expr::parse("foo(x)"), UsageError);
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(expr::eval(expr::parse("log(x)"), -1.0), DomainError);
  CHECK_THROWS_AS(expr::eval(expr::parse("1/x"), 0.0), DomainError);
}

TEST_CASE("printing round-trips") {
  const auto e = expr::parse("x^1.5 * exp(-x) + 0.1");
  CHECK(expr::equal(expr::parse(expr::print(e)), e));
}
