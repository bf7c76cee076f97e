// SPDX-License-Identifier: MIT
/**
 * @file boundary.hpp
 * @brief Feller classification of the boundary 0 from the scale and speed
 * measures.
 *
 * With s(x) = exp(-∫_{x0}^x b/a), S(x) = ∫_{x0}^x s, M(x) = ∫_{x0}^x 1/(2as):
 *   S0 = -S(0+), M0 = -M(0+),
 *   Σ = ∫_0^{x0} (M(x0) - M(u)) dS(u),  N = ∫_0^{x0} (S(x0) - S(u)) dM(u).
 */
#pragma once

#include <string>

#include "degenkernel/transform.hpp"

namespace degenkernel {

enum class Finiteness { finite, infinite, indeterminate };

std::string to_string(Finiteness f);

struct LimitVerdict {
  Finiteness status = Finiteness::indeterminate;
  double value = 0.0;        // partial sum (plus geometric tail when finite)
  double last_ratio = 0.0;   // ratio of the last two increments
  int nodes = 0;             // geometric nodes used
  std::string evidence;
};

struct ClassificationReport {
  LimitVerdict S0, M0, Sigma, N;
  std::string boundary_type;  // regular, exit, entrance, natural or indeterminate
  double x0 = 1.0;
  std::string note;
};

/// Integrates toward 0 on x_j = x0·2^{-j}, j <= 60. A limit is infinite when
/// the last 10 increment ratios all stay >= 0.999, or the partial sum passes
/// 1e8; finite when they all stay below 0.999; indeterminate otherwise.
ClassificationReport classify(const Coefficients& coeffs, double x0 = 1.0);

}  // namespace degenkernel
