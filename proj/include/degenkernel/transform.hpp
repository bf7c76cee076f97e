// SPDX-License-Identifier: MIT
/**
 * @file transform.hpp
 * @brief Change of variables taking a u'' + b u' to the model operator plus
 * a bounded potential.
 *
 * For coefficients a > 0 and b on (0,∞):
 *   I(x)   = ∫_0^x a^{-1/2},  phi = I²/4,  psi = phi^{-1}
 *   d(x)   = (2b - a')/(4√a) · I(x) + 1/2 - nu, nu chosen so d(0+) = 0
 *   d̃      = d∘psi,  theta(z) = exp(-∫_0^z d̃(u)/(2u) du)
 *   V(z)   = -d̃²/(4z) - d̃'/2 + (1-nu) d̃/(2z)
 */
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "degenkernel/model_kernel.hpp"

namespace degenkernel {

/// Diffusion and drift coefficients. Empty derivative slots are filled by
/// Richardson-extrapolated central differences with step 1e-3·x.
struct Coefficients {
  RealFn a;
  RealFn b;
  RealFn a_prime;
  RealFn b_prime;
  RealFn a_second;
  std::string label;
};

/// a = x^alpha, b = 0, with analytic derivatives.
Coefficients power_coefficients(double alpha);

/// a = x^alpha, b = x^beta·shape(x). `shape_prime` may be empty.
Coefficients power_drift_coefficients(double alpha, double beta, RealFn shape, RealFn shape_prime = {});

/// Coefficients parsed from expression text (variable x).
Coefficients expression_coefficients(const std::string& a_src, const std::string& b_src);

struct ConditionEntry {
  std::string name;
  std::string status;  // "pass", "fail", "not falsified on grid", "falsified on grid"
  double value = 0.0;
  std::string detail;
};

struct ConditionsReport {
  std::vector<ConditionEntry> entries;
  bool all_pass = true;
  double nu = 0.0;  // NaN when the drift limit could not be formed
};

/// Numerical screening of the integrability, drift-limit and growth
/// hypotheses. Never throws for hypothesis failures.
ConditionsReport validate_conditions(const Coefficients& coeffs);

/// Immutable, cheaply copyable bundle of the transformed quantities.
class TransformBundle {
 public:
  /// Throws DomainError naming the violated condition.
  static TransformBundle build(const Coefficients& coeffs);

  double nu() const;
  double inner_integral(double x) const;  // I(x)
  double phi(double x) const;
  double phi_prime(double x) const;       // ½ I(x) a(x)^{-1/2}
  double phi_second(double x) const;
  double psi(double z) const;

  double d(double x) const;
  double d_prime(double x) const;
  double d_tilde(double z) const;
  double d_tilde_exact(double z) const;  // bypasses the interpolation cache

  /// theta at z = phi(x), from ∫_0^x d(s)/(I(s)√a(s)) ds.
  double theta_at_x(double x) const;
  double theta(double z) const;
  double theta_prime(double z) const;

  double V(double z) const;             // cached; constant below the cache floor
  double V_exact(double z) const;
  double V_sup() const;                  // 1.25 × largest sampled |V|
  /// 1.25 × max_{j<=k} of the sampled sup |V^{(j)}| over a log grid with
  /// `per_decade` points per decade.
  double C_V(int k, int per_decade = 16) const;

  /// d vanished to rounding on the sample grid; theta ≡ 1, V ≡ 0.
  bool drift_free() const;
  bool potential_free() const;

  const Coefficients& coefficients() const;
  double vanishing_order() const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

}  // namespace degenkernel
