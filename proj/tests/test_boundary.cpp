// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "degenkernel/boundary.hpp"
#include "degenkernel/error.hpp"

using namespace degenkernel;

TEST_CASE("power coefficients: natural, exit, regular") {
  CHECK(classify(expression_coefficients("x^2", "0")).boundary_type == "natural");
  CHECK(classify(expression_coefficients("x^1.5", "0")).boundary_type == "exit");
  CHECK(classify(expression_coefficients("x^0.5", "0")).boundary_type == "regular");
  CHECK(classify(power_coefficients(1.0), 0.5).boundary_type == "exit");
}

TEST_CASE("strong outward drift gives an entrance boundary") {
  const auto r = classify(expression_coefficients("x", "1"));
  CHECK(r.boundary_type == "entrance");
  CHECK(r.note == "classification only, kernel construction unsupported");
}

TEST_CASE("finite limits carry a value") {
  const auto r = classify(power_coefficients(0.0));  // a = 1: S(0+) = -1
  CHECK(r.S0.status == Finiteness::finite);
  CHECK(r.S0.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("anchor must be positive") { CHECK_THROWS_AS(classify(power_coefficients(1.0), 0.0), DomainError); }
