// SPDX-License-Identifier: MIT
/**
 * @file specfun.hpp
 * @brief Gamma, modified Bessel I and incomplete gamma functions.
 */
#pragma once

namespace degenkernel {

struct EvalTolerance {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_terms = 500;
};

/// Gamma function. Negative non-integer arguments are reduced by the
/// downward recursion Γ(α) = Γ(α+n+1) / (α(α+1)...(α+n)), n = floor(-α).
/// Throws DomainError at non-positive integers.
double gamma(double alpha, const EvalTolerance& tol = {});

/// log Γ(a) for a > 0 (reentrant; does not touch the global signgam).
double lgamma_positive(double a);

/// log|Γ(α)| together with the sign of Γ(α) (+1 or -1).
double log_abs_gamma(double alpha, int* sign = nullptr);

/// Modified Bessel function of the first kind I_order(x), x >= 0.
double bessel_i(double order, double x, const EvalTolerance& tol = {});

/// e^{-x} I_order(x). Series for x <= 30, asymptotic expansion beyond.
double bessel_i_scaled(double order, double x, const EvalTolerance& tol = {});

/// Ascending series for e^{-x} I_order(x), summed in log space outward from
/// the largest term. Valid for every x; used to cross-check the asymptotic
/// branch.
double bessel_i_scaled_series(double order, double x, const EvalTolerance& tol = {});

/// Large-argument expansion for e^{-x} I_order(x).
double bessel_i_scaled_asymptotic(double order, double x);

/// Lower incomplete gamma γ(s, x) = ∫_0^x u^{s-1} e^{-u} du.
double lower_incomplete_gamma(double s, double x, const EvalTolerance& tol = {});

/// Regularized lower incomplete gamma P(s, x) = γ(s, x) / Γ(s).
double gamma_p(double s, double x, const EvalTolerance& tol = {});

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double gamma_q(double s, double x, const EvalTolerance& tol = {});

/// log Q(s, x), finite even when Q underflows.
double log_gamma_q(double s, double x, const EvalTolerance& tol = {});

/// Binomial coefficient C(n, k) as a double.
double binomial(int n, int k);

}  // namespace degenkernel
