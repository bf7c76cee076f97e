// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <string>

#include "degenkernel/error.hpp"
#include "degenkernel/transform.hpp"

using namespace degenkernel;

TEST_CASE("identity and heat transforms") {
  const auto p1 = TransformBundle::build(power_coefficients(1.0));
  CHECK(p1.nu() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p1.phi(2.3) == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(p1.potential_free());

  const auto heat = TransformBundle::build(expression_coefficients("1", "0"));
  CHECK(heat.nu() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(heat.phi(2.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(heat.psi(1.0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("power family index") {
  for (double a : {0.5, 1.5}) {
    const auto b = TransformBundle::build(power_coefficients(a));
    CHECK(b.nu() == doctest::Approx((1.0 - a) / (2.0 - a)).epsilon(1e-12));
  }
}

TEST_CASE("a = x^2 violates the integrability condition") {
  try {
    TransformBundle::build(expression_coefficients("x^2", "0"));
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("scale condition violated") != std::string::npos);
  }
}

TEST_CASE("drift family potential is bounded and gauge is positive") {
  const auto b = TransformBundle::build(
      power_drift_coefficients(1.0, 2.0, [](double x) { return std::exp(-x); },
                               [](double x) { return -std::exp(-x); }));
  CHECK_FALSE(b.drift_free());
  CHECK(b.V_sup() > 0.0);
  CHECK(b.V_sup() < 1.0);
  for (double z : {1e-3, 0.1, 1.0, 10.0}) {
    CHECK(std::fabs(b.V(z)) <= b.V_sup());
    CHECK(b.theta(z) > 0.0);
  }
}
