// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "degenkernel/duhamel.hpp"
#include "degenkernel/error.hpp"

using namespace degenkernel;

TEST_CASE("tail factor and default order") {
  CHECK(duhamel_tail_factor(1.0, 0.0, 3) == 0.0);
  CHECK(duhamel_tail_factor(0.5, 1.0, 1) == doctest::Approx(std::exp(0.5) * 0.125).epsilon(1e-14));
  CHECK(default_order(0.5, 0.0) == 0);
  CHECK(duhamel_tail_factor(0.5, 1.0, default_order(0.5, 1.0)) <= 1e-6);
}

TEST_CASE("constant potential reproduces e^{ct} q") {
  const double c = -0.8;
  PotentialKernel pk(0.4, [c](double) { return c; }, -c, 8);
  for (auto pt : {KernelPoint{0.5, 1.2, 0.6}, KernelPoint{2.0, 0.3, 0.2}}) {
    const auto v = q_nu_V(pk, pt);
    const double exact = std::exp(c * pt.t) * q_sigma(0.4, pt);
    CHECK(std::fabs(v.value - exact) <= v.truncation_bound + v.quadrature_estimate);
    CHECK(std::fabs(v.value / exact - 1.0) < 1e-7);
  }
}

TEST_CASE("ratio table mass defect is small") {
  PotentialKernel pk(0.0, [](double z) { return std::sin(z); }, 1.25, 4);
  const auto tab = pk.table(1.0, 1.0, PotentialKernel::cover_for(1.0, 1.0, 1.0));
  CHECK(tab->mass_defect() < 1e-7);
}

TEST_CASE("symmetry and Chapman-Kolmogorov with a smooth potential") {
  PotentialKernel pk(0.0, [](double z) { return 0.5 * std::cos(z) / (1.0 + z); }, 0.625, 4);
  CHECK(symmetry_residual(pk, {0.7, 1.3, 0.5}, 4) < 1e-7);
  CHECK(chapman_kolmogorov_residual(pk, 0.7, 1.3, 0.4, 0.5, 4) < 1e-4);
}

TEST_CASE("orders beyond the table depth are rejected") {
  PotentialKernel pk(0.0, [](double) { return 1.0; }, 1.0);
  CHECK_THROWS_AS(q_nu_V(pk, {1.0, 1.0, 0.5}, 13), DomainError);
}
