// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "degenkernel/closed_forms.hpp"
#include "degenkernel/error.hpp"
#include "degenkernel/quadrature.hpp"

using namespace degenkernel;

TEST_CASE("p_alpha reference values and the alpha = 1 reduction") {
  CHECK(p_alpha(1.5, 1.0, 1.0, 0.5) == doctest::Approx(0.35350170206677403).epsilon(1e-13));
  for (double x : {0.05, 0.7, 3.0}) {
    for (double y : {0.1, 2.0}) {
      CHECK(p_alpha(1.0, x, y, 0.7) == doctest::Approx(q_sigma(0.0, {x, y, 0.7})).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(p_alpha(2.0, 1, 1, 1), DomainError);
}

TEST_CASE("mass loss") {
  CHECK(mass_loss(1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(mass_loss(1.5, 1.0, 0.5) == doctest::Approx(0.0030191636511226065).epsilon(1e-12));
  CHECK(mass_loss(1e-12, 1.0, 1.0) == doctest::Approx(std::erfc(0.5)).epsilon(1e-10));
  CHECK(mass_loss(1.2, 0.5, 1.0) > mass_loss(1.2, 0.8, 1.0));  // decreasing in x
  CHECK(mass_loss(1.2, 0.5, 1.0) > mass_loss(1.2, 0.5, 0.7));  // increasing in t
  CHECK(mass_loss_exponent_ratio(1.9, 1, 1) == doctest::Approx(0.71262046098307497).epsilon(1e-12));
  CHECK(mass_loss_exponent_ratio(1.99, 1, 1) == doctest::Approx(0.944730056022277).epsilon(1e-12));
  CHECK_THROWS_AS(mass_loss(2.5, 1, 1), DomainError);
}

TEST_CASE("reference kernels") {
  CHECK(reference_kernel("heat_dirichlet", 1, 1, 1) == doctest::Approx(0.17831791741872947).epsilon(1e-14));
  CHECK(reference_kernel("example4_dirichlet", 0.7, 1.1, 0.5) ==
        doctest::Approx(q_sigma(0.5, {0.7, 1.1, 0.5})).epsilon(1e-12));
  const auto m = integrate_pieces([](double y) { return reference_kernel("geometric_alpha2", 1.0, y, 0.8); },
                                  {1e-12, 0.01, 0.1, 1, 10, 100, 1e4, 1e7}, 1e-14, 1e-12);
  CHECK(m.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(reference_kernel("nope", 1, 1, 1), UsageError);
}

TEST_CASE("drift variant") {
  DriftVariant zero(1.2, 1.0, [](double) { return 0.0; });
  CHECK(zero.trivial());
  CHECK(zero.p(0.6, 0.9, 0.4).value == doctest::Approx(p_alpha(1.2, 0.6, 0.9, 0.4)).epsilon(1e-14));

  DriftVariant dv(1.0, 2.0, [](double x) { return std::exp(-x); }, [](double x) { return -std::exp(-x); }, 4);
  CHECK(dv.drift_integral(0.3, 1.1) == doctest::Approx(-dv.drift_integral(1.1, 0.3)).epsilon(1e-15));
  const double t = 0.5;
  const auto v = dv.p(0.5, 1.0, t);
  CHECK(std::fabs(v.value / dv.base(0.5, 1.0, t) - 1.0) <= std::expm1(dv.Lambda_sup() * t));
  CHECK_THROWS_AS(DriftVariant(1.0, 0.5, [](double x) { return std::exp(-x); }), DomainError);
  CHECK_THROWS_AS(DriftVariant(1.0, 2.0, [](double) { return 1.0; }), DomainError);  // no decay
}
