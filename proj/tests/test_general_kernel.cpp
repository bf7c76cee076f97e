// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "degenkernel/closed_forms.hpp"
#include "degenkernel/general_kernel.hpp"

using namespace degenkernel;

TEST_CASE("Touchard and partial Bell polynomials") {
  CHECK(touchard(0, 3.0) == 1.0);
  CHECK(touchard(1, 3.0) == 3.0);
  CHECK(touchard(2, 3.0) == 12.0);  // x + x²
  CHECK(touchard(3, 2.0) == 22.0);  // x + 3x² + x³
  CHECK(bell_partial(3, 2, {1.0, 1.0}) == 3.0);
  CHECK(bell_partial(4, 2, {2.0, 3.0, 5.0}) == doctest::Approx(4 * 2.0 * 5.0 + 3 * 3.0 * 3.0));
}

TEST_CASE("potential-free pipelines collapse to closed forms") {
  GeneralKernel heat(TransformBundle::build(expression_coefficients("1", "0")));
  CHECK(heat.p(1, 1, 1).value == doctest::Approx(0.17831791741872947).epsilon(1e-12));
  GeneralKernel p15(TransformBundle::build(power_coefficients(1.5)));
  CHECK(p15.p(1, 1, 0.5).value == doctest::Approx(0.35350170206677403).epsilon(1e-12));
  CHECK(p15.p_approx(0.4, 2.0, 0.3) == p15.p(0.4, 2.0, 0.3).value);
  const auto u = p15.u_f([](double) { return 1.0; }, 1.0, 0.5);
  CHECK(u.value == doctest::Approx(1.0 - mass_loss(1.5, 1.0, 0.5)).epsilon(1e-12));
}

TEST_CASE("drift family agrees with the direct x-space construction") {
  auto shape = [](double x) { return std::exp(-x); };
  auto shape_prime = [](double x) { return -std::exp(-x); };
  GeneralKernel gk(TransformBundle::build(power_drift_coefficients(1.0, 2.0, shape, shape_prime)), 4);
  DriftVariant dv(1.0, 2.0, shape, shape_prime, 4);
  const auto a = gk.p(0.5, 1.0, 0.5);
  const auto b = dv.p(0.5, 1.0, 0.5);
  CHECK(std::fabs(a.value - b.value) <= a.truncation_bound + a.quadrature_estimate + b.quadrature_estimate);
  CHECK(gk.symmetry_residual(0.3, 1.1, 0.5) < 1e-7);
}

TEST_CASE("second-order PDE residual decay") {
  GeneralKernel ex4(TransformBundle::build(expression_coefficients("x", "0.5")));
  const double r1 = std::fabs(ex4.pde_residual_backward(1.0, 1.3, 0.5, 1e-2));
  const double r2 = std::fabs(ex4.pde_residual_backward(1.0, 1.3, 0.5, 5e-3));
  CHECK(std::log2(r1 / r2) > 1.9);
}
