// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "degenkernel/error.hpp"
#include "degenkernel/sde_oracle.hpp"

using namespace degenkernel;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == A{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("serial and parallel runs are identical") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 3000;
  cfg.bridge_correction = true;
  cfg.seed = 42;
  cfg.parallel = false;
  const auto a = simulate_model(-0.5, {}, 0.8, 0.7, cfg);
  cfg.parallel = true;
  omp_set_num_threads(4);
  const auto b = simulate_model(-0.5, {}, 0.8, 0.7, cfg);
  CHECK(a.survival == b.survival);
  CHECK(a.histogram.mass == b.histogram.mass);
  CHECK(a.hitting_times == b.hitting_times);
  CHECK(a.n_survived + a.n_absorbed == a.n_paths);
}

TEST_CASE("survival matches the analytic mass within 4 SE") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 20000;
  cfg.bridge_correction = true;
  const auto r = simulate_model(0.0, {}, 1.0, 1.0, cfg);
  CHECK(std::fabs(r.survival - (1.0 - std::exp(-1.0))) < 4.0 * r.survival_se);
  double binned = 0.0;
  for (double m : r.histogram.mass) binned += m;
  CHECK(binned + static_cast<double>(r.beyond_histogram) / r.n_paths == doctest::Approx(r.survival));
}

TEST_CASE("invalid configurations") {
  SimConfig cfg;
  cfg.n_paths = 0;
  CHECK_THROWS_AS(simulate_model(0.0, {}, 1.0, 1.0, cfg), DomainError);
  cfg.n_paths = 10;
  CHECK_THROWS_AS(simulate_model(0.0, {}, 1.0, -1.0, cfg), DomainError);
  // start at the absorption level: everything absorbed at time 0
  cfg.absorb_below = 2.0;
  const auto r = simulate_model(0.0, {}, 1.0, 1.0, cfg);
  CHECK(r.n_absorbed == 10);
  CHECK(r.hitting_times.front() == 0.0);
}
