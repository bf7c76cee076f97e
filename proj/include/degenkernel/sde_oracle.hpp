// SPDX-License-Identifier: MIT
/**
 * @file sde_oracle.hpp
 * @brief Monte Carlo simulation of the absorbed diffusions
 *   dY = √(2|Y|) dB + (nu + d̃(Y)) dt,   X = psi(Y) with Y started at phi(x0).
 *
 * Every path draws from its own Philox4x32-10 stream keyed by (seed, path
 * index), and results are reduced in path order, so output does not depend
 * on the thread count.
 */
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "degenkernel/general_kernel.hpp"
#include "degenkernel/transform.hpp"

namespace degenkernel {

/// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

enum class Scheme {
  radial,  // Euler on R = √Y: dR = dB/√2 + ((nu - 1/2) + d̃(R²))/(2R) dt
  direct,  // Euler on Y as written
};

struct SimConfig {
  double dt = 1e-3;
  long n_paths = 10000;
  std::uint64_t seed = 1;
  double absorb_below = 0.0;
  bool bridge_correction = false;
  Scheme scheme = Scheme::radial;
  int bins = 40;
  double hist_hi = 0.0;  // upper histogram edge; <= 0 picks one from the start point and t
  bool parallel = true;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<double> mass;   // fraction of all paths surviving into the bin
  std::vector<double> se;     // √(m(1-m)/n)
};

struct SimResult {
  double survival = 0.0;
  double survival_se = 0.0;
  long n_paths = 0;
  long n_survived = 0;
  long n_absorbed = 0;
  long beyond_histogram = 0;  // survivors past the last edge
  Histogram histogram;
  std::vector<double> hitting_times;  // in path order
};

/// Model process in z. `d_tilde` may be empty.
SimResult simulate_model(ModelIndex nu, const RealFn& d_tilde, double z0, double t, const SimConfig& cfg);

/// General process X = psi(Ỹ), Ỹ started at phi(x0); histogram over x.
SimResult simulate_general(const TransformBundle& bundle, double x0, double t, const SimConfig& cfg);
SimResult simulate_general(const GeneralKernel& gk, double x0, double t, const SimConfig& cfg);

}  // namespace degenkernel
