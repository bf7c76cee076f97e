// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "degenkernel/error.hpp"
#include "degenkernel/model_kernel.hpp"
#include "degenkernel/numerics.hpp"

using namespace degenkernel;

TEST_CASE("q_sigma reference values") {
  CHECK(q_sigma(0.0, {1.0, 1.0, 1.0}) == doctest::Approx(0.21526928924893766).epsilon(1e-14));
  CHECK(q_sigma(-0.3, {0.7, 1.1, 0.5}) == doctest::Approx(0.22757135883949114).epsilon(1e-13));
  CHECK(q_sigma_series(-0.3, {0.7, 1.1, 0.5}) == doctest::Approx(0.22757135883949114).epsilon(1e-13));
}

TEST_CASE("excluded indices and points") {
  CHECK_THROWS_AS(q_sigma(2.0, {1, 1, 1}), DomainError);
  CHECK_THROWS_AS(q_sigma(3.0 + 1e-10, {1, 1, 1}), DomainError);
  CHECK_NOTHROW(q_sigma(2.5, {1, 1, 1}));
  CHECK_THROWS_AS(q_sigma(0.0, {0.0, 1, 1}), DomainError);
  CHECK_THROWS_AS(ModelIndex(1.0), DomainError);
}

TEST_CASE("large arguments do not overflow") {
  const KernelPoint pt{10.0, 10.0, 0.01};  // zw/t² = 1e6
  const double v = q_sigma(0.4, pt);
  CHECK(std::isfinite(v));
  CHECK(std::log(v) == doctest::Approx(log_q_sigma_series(0.4, pt)).epsilon(1e-12));
}

TEST_CASE("total mass") {
  CHECK(total_mass(0.0, 0.7, 0.5) == doctest::Approx(1.0 - std::exp(-1.4)).epsilon(1e-14));
  CHECK(total_mass(-0.3, 0.7, 0.5) == doctest::Approx(0.64788627925782293).epsilon(1e-13));
  const auto q = v_g(-0.3, [](double) { return 1.0; }, 0.7, 0.5);
  CHECK(q.value == doctest::Approx(0.64788627925782293).epsilon(1e-11));
  CHECK(q.tail_bound < 1e-15);
}

TEST_CASE("derivative recurrence, integer and non-integer nu") {
  for (double nu : {-1.0, 0.4}) {
    for (int k = 1; k <= 3; ++k) {
      auto lower = [&](double z) { return dz_k_q(nu, k - 1, {z, 1.3, 0.6}); };
      CHECK(dz_k_q(nu, k, {0.8, 1.3, 0.6}) == doctest::Approx(richardson_derivative(lower, 0.8, 0.01)).epsilon(1e-8));
    }
  }
}

TEST_CASE("convolution identity and admissibility") {
  CHECK(conv_admissible(-1.0, 2, 1));
  CHECK_FALSE(conv_admissible(0.4, 1, 0));
  CHECK_FALSE(conv_admissible(0.0, 1, 2));
  const auto num = conv_Q(-1.0, 2, 1, 0.7, 1.2, 0.3, 0.5);
  CHECK(num.value == doctest::Approx(conv_Q_closed(-1.0, 2, 1, 0.7, 1.2, 0.3, 0.5)).epsilon(1e-10));
}

TEST_CASE("upper bound dominates the kernel") {
  for (double sigma : {-1.5, 0.4, 2.5}) {
    for (double w : {0.01, 0.5, 3.0, 20.0}) {
      const KernelPoint pt{0.8, w, 0.4};
      CHECK(std::fabs(q_sigma(sigma, pt)) <= q_upper_bound(sigma, pt));
    }
  }
}
