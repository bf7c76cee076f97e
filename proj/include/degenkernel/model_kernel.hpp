// SPDX-License-Identifier: MIT
/**
 * @file model_kernel.hpp
 * @brief Model kernels of z d²/dz² + nu d/dz with absorption at 0.
 *
 * q_sigma(z,w,t) = z^{(1-σ)/2} w^{(σ-1)/2} t^{-1} e^{-(z+w)/t} I_{1-σ}(2√(zw)/t)
 * for σ outside {2,3,...}; q_nu with nu < 1 is the absorbed fundamental
 * solution.
 */
#pragma once

#include <functional>
#include <vector>

#include "degenkernel/specfun.hpp"

namespace degenkernel {

/// Drift index of the model operator; always < 1.
class ModelIndex {
 public:
  ModelIndex(double nu);  // NOLINT(google-explicit-constructor): used as a plain number
  double value() const { return nu_; }
  operator double() const { return nu_; }  // NOLINT
  /// True when -nu is a non-negative integer (within 1e-8).
  bool is_nonpositive_integer() const;

 private:
  double nu_;
};

struct KernelPoint {
  double z;
  double w;
  double t;
};

/// Throws DomainError when σ is within 1e-8 of {2,3,...}.
void require_admissible_sigma(double sigma);

double q_sigma(double sigma, const KernelPoint& pt);

/// log q_sigma for σ < 2, where the kernel is positive.
double log_q_sigma(double sigma, const KernelPoint& pt);

/// Ascending-series form summed in log space: returns log|q_sigma| and the
/// sign through `sign`. Independent of the Bessel routines.
double log_q_sigma_series(double sigma, const KernelPoint& pt, int* sign = nullptr);
double q_sigma_series(double sigma, const KernelPoint& pt);

/// Zero-flux companion kernel.
double q_star(ModelIndex nu, const KernelPoint& pt);

/// Extended family Q_{nu+k}.
double Q(ModelIndex nu, int k, const KernelPoint& pt);

/// ∂_z^k q_nu via the binomial recurrence over Q_{nu+j}.
double dz_k_q(ModelIndex nu, int k, const KernelPoint& pt);

/// γ(1-nu, z/t) / Γ(1-nu).
double total_mass(ModelIndex nu, double z, double t);

/// Explicit upper bound on |q_sigma|.
double q_upper_bound(double sigma, const KernelPoint& pt);

/// ∫_W^∞ of the σ < 1 upper bound in w.
double q_tail_bound(double sigma, double z, double t, double W);

/// Smallest W for which the tail bound drops below abs_tol.
double truncation_point(double sigma, double z, double t, double abs_tol);

struct IntegralValue {
  double value = 0.0;
  double quad_error = 0.0;
  double tail_bound = 0.0;
};

using RealFn = std::function<double(double)>;

/// ∫_0^∞ q_nu(z,w,t) g(w) dw on [0, W]; the tail beyond W is bounded by
/// integrating q_upper_bound·|g|.
IntegralValue v_g(ModelIndex nu, const RealFn& g, double z, double t, const EvalTolerance& tol = {});

/// ∫_0^∞ Q_{nu+k}(z,w,t) g^{(k)}(w) dw.
IntegralValue dz_k_v_g(ModelIndex nu, int k, const RealFn& g_k, double z, double t,
                       const EvalTolerance& tol = {});

/// Admissible (nu,k,l) for the convolution identity.
bool conv_admissible(ModelIndex nu, int k, int l);

/// ∫_0^∞ Q_{nu+k}(z,ξ,t) Q_{nu+l}(ξ,w,s) dξ by quadrature.
IntegralValue conv_Q(ModelIndex nu, int k, int l, double z, double w, double t, double s,
                     const EvalTolerance& tol = {});

/// Closed form of the same convolution at time t+s.
double conv_Q_closed(ModelIndex nu, int k, int l, double z, double w, double t, double s);

/// Σ_m C(k,m) Q_{nu+m}.
double S_k(ModelIndex nu, int k, const KernelPoint& pt);

/// ∫_0^W f(ξ) dξ for an integrand concentrated around the points ξ = c²,
/// c in `centers_r`, with spread `scale_r` in the √ξ variable. Panel breaks
/// are laid on that grid so narrow peaks are never stepped over.
IntegralValue integrate_kernel_product(const RealFn& f, const std::vector<double>& centers_r, double scale_r,
                                       double W, double abs_tol, double rel_tol);

}  // namespace degenkernel
