// SPDX-License-Identifier: MIT
/**
 * @file closed_forms.hpp
 * @brief Closed-form kernels used as references: the x^alpha family, its
 * mass loss, the drift variant and the classical half-line kernels.
 */
#pragma once

#include <string>
#include <vector>

#include "degenkernel/duhamel.hpp"

namespace degenkernel {

/// Kernel of x^alpha ∂x² on (0,∞) with absorption at 0, 0 < alpha < 2:
/// x^{1/2} y^{1/2-alpha}/(t(2-alpha)) e^{-(x^{2-alpha}+y^{2-alpha})/((2-alpha)²t)}
///   · I_{1/(2-alpha)}(2(xy)^{1-alpha/2}/((2-alpha)²t)).
double p_alpha(double alpha, double x, double y, double t);
double log_p_alpha(double alpha, double x, double y, double t);

/// Absorbed mass 1 - ∫ p_alpha dy = Γ(eta, T)/Γ(eta), eta = 1/(2-alpha),
/// T = x^{2-alpha}/((2-alpha)²t).
double mass_loss(double alpha, double x, double t);
/// log of mass_loss; finite where mass_loss underflows.
double log_mass_loss(double alpha, double x, double t);
/// Leading behaviour as alpha → 2:
/// x^{alpha-1}e^{-T}/(Γ(eta)((2-alpha)²t)^{(alpha-1)/(2-alpha)})·(1 + (2-alpha)t/x^{2-alpha}).
double mass_loss_asymptotic(double alpha, double x, double t);
double log_mass_loss_asymptotic(double alpha, double x, double t);
/// -ln(mass_loss)/T.
double mass_loss_exponent_ratio(double alpha, double x, double t);

/// Kernel of x^alpha ∂x² + x^beta shape(x) ∂x as the order-k partial sum
///   Σ_{n<=k} p_{alpha,n},  p_{alpha,0} = p_alpha·exp(½∫_x^y u^{beta-alpha} shape(u) du),
/// with Λ = -x^{2beta-alpha}shape²/4 - (beta-alpha)x^{beta-1}shape/2 - x^beta shape'/2
/// as the potential.
class DriftVariant {
 public:
  /// Validates beta >= 1 and the shape function (finite, non-zero at 0+,
  /// rapid decay) on a sample grid. shape ≡ 0 is accepted.
  DriftVariant(double alpha, double beta, RealFn shape, RealFn shape_prime = {}, int order = -1);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double Lambda(double x) const;
  double Lambda_sup() const { return lambda_sup_; }
  /// ∫_x^y u^{beta-alpha} shape(u) du, antisymmetric in (x,y).
  double drift_integral(double x, double y) const;
  double base(double x, double y, double t) const;  // p_{alpha,0}
  /// Order-k partial sum; truncation_bound = e^{‖Λ‖t}(‖Λ‖t)^{k+1}/(k+1)!·p_{alpha,0}.
  KernelValue p(double x, double y, double t) const;
  KernelValue p(double x, double y, double t, int order) const;
  bool trivial() const { return lambda_sup_ == 0.0; }
  void set_parallel(bool on) { parallel_ = on; }

 private:
  double alpha_;
  double beta_;
  RealFn shape_;
  RealFn shape_prime_;
  int order_;
  double lambda_sup_ = 0.0;
  bool parallel_ = true;
  TableSpec grid_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

KernelValue drift_variant_p(double alpha, double beta, const RealFn& shape, double x, double y, double t, int order);

/// Printed half-line kernels by name: heat_dirichlet, heat_neumann,
/// geometric_alpha2, example4_dirichlet, example4_free.
double reference_kernel(const std::string& name, double x, double y, double t);
const std::vector<std::string>& reference_kernel_names();

}  // namespace degenkernel
