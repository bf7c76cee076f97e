// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "degenkernel/error.hpp"
#include "degenkernel/specfun.hpp"

using namespace degenkernel;

TEST_CASE("gamma function, including negative non-integers") {
  CHECK(degenkernel::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(degenkernel::gamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(degenkernel::gamma(-1.5) == doctest::Approx(2.3632718012073547).epsilon(1e-13));
  CHECK_THROWS_AS(degenkernel::gamma(-2.0), DomainError);
}

TEST_CASE("modified Bessel I and its scaled form") {
  CHECK(bessel_i(0.0, 1.0) == doctest::Approx(1.2660658777520083).epsilon(1e-14));
  CHECK(bessel_i(1.0, 1.0) == doctest::Approx(0.56515910399248503).epsilon(1e-14));
  CHECK(bessel_i_scaled(2.5, 30.0) == doctest::Approx(0.065795694375656317).epsilon(1e-13));
  // series and asymptotic branches meet
  for (double x : {20.0, 40.0, 80.0}) {
    CHECK(bessel_i_scaled_series(1.3, x) == doctest::Approx(bessel_i_scaled_asymptotic(1.3, x)).epsilon(1e-11));
  }
}

TEST_CASE("incomplete gamma") {
  CHECK(gamma_q(2.5, 1.7) == doctest::Approx(0.63856992310379509).epsilon(1e-13));
  CHECK(gamma_q(1.0, 3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK(gamma_p(0.5, 0.25) == doctest::Approx(std::erf(0.5)).epsilon(1e-14));
  CHECK(gamma_p(3.0, 2.0) + gamma_q(3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  // log form stays finite where the value underflows
  CHECK(std::isfinite(log_gamma_q(100.0, 1e4)));
  CHECK(log_gamma_q(100.0, 1e4) / 1e4 == doctest::Approx(-0.944730056022277).epsilon(1e-10));
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(7, 0) == 1.0);
  CHECK(binomial(3, 4) == 0.0);
}
