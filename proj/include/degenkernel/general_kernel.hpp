// SPDX-License-Identifier: MIT
/**
 * @file general_kernel.hpp
 * @brief Fundamental solution of ∂t u = a u'' + b u' on (0,∞) with absorption at 0:
 *   p(x,y,t) = q_nu^V(phi(x), phi(y), t) · theta(phi(x))/theta(phi(y)) · phi'(y).
 */
#pragma once

#include <vector>

#include "degenkernel/duhamel.hpp"
#include "degenkernel/transform.hpp"

namespace degenkernel {

/// Touchard polynomial 𝔗_k(x) = Σ_j S(k,j) x^j (Stirling numbers of the second kind).
double touchard(int k, double x);

/// Partial Bell polynomial B_{k,j}(x_1, ..., x_{k-j+1}); `xs[i]` holds x_{i+1}.
double bell_partial(int k, int j, const std::vector<double>& xs);

struct PDerivativeCheck {
  bool pass = true;
  double worst_ratio = 0.0;  // max lhs/rhs over the grid
  double worst_x = 0.0;
  double worst_y = 0.0;
  double lhs = 0.0;          // at the worst point
  double rhs = 0.0;
  double C_theta = 0.0;
  double C_phi = 0.0;
  double C_V = 0.0;
};

class GeneralKernel {
 public:
  /// Order < 0 selects the default order per t.
  explicit GeneralKernel(TransformBundle bundle, int order = -1, TableSpec grid = {});

  const TransformBundle& bundle() const { return bundle_; }
  const PotentialKernel& potential_kernel() const { return pk_; }
  int order_for(double t) const { return pk_.order_for(t); }
  void set_parallel(bool on) { pk_.set_parallel(on); }

  /// Assembled kernel. truncation_bound and quadrature_estimate carry the
  /// Duhamel budgets through the theta/phi' factors.
  KernelValue p(double x, double y, double t) const;
  KernelValue p(double x, double y, double t, int order) const;
  /// q_nu in place of q_nu^V.
  double p_approx(double x, double y, double t) const;
  /// Order-k partial series in place of q_nu^V.
  double p_approx_k(int k, double x, double y, double t) const;

  /// ∫_0^∞ p(x,y,t) f(y) dy, computed in w = phi(y).
  IntegralValue u_f(const RealFn& f, double x, double t) const;

  /// |m(y)p(x,y,t) - m(x)p(y,x,t)| relative to the larger term, with
  /// m(u) = phi(u)^{1-nu} theta(phi(u))² / phi'(u).
  double symmetry_residual(double x, double y, double t) const;
  /// |p(x,y,t+s) - ∫ p(x,u,t) p(u,y,s) du| relative to p(x,y,t+s).
  double ck_residual(double x, double y, double t, double s) const;
  /// (∂t - a∂x² - b∂x) p. Central differences; forward one-sided
  /// differences when x < 3h.
  double pde_residual_backward(double x, double y, double t, double h) const;
  /// ∂t p - ∂y²(a p) + ∂y(b p).
  double pde_residual_forward(double x, double y, double t, double h) const;

  /// |∂_x^k p| (finite differences) against
  /// C^theta·𝔗_k(C^phi)·e^{3^k C_k^V t}·(1/t + k + 1)^k·S_k(phi(x),phi(y),t)·|phi'(y)|/theta(phi(y))
  /// on an n×n grid in (0, M]².
  PDerivativeCheck p_derivative_bound_check(int k, double M, double t, int n = 5) const;

 private:
  // value with the Duhamel table chosen explicitly; horizon/cover <= 0 select defaults
  KernelValue p_target(double x, double y, double t, int order, double horizon, double cover) const;
  KernelValue p_source(double x, double y, double t, int order, double horizon, double cover) const;

  TransformBundle bundle_;
  PotentialKernel pk_;
};

}  // namespace degenkernel
