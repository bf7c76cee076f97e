// SPDX-License-Identifier: MIT
#include "degenkernel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "degenkernel/error.hpp"

namespace degenkernel {
namespace {

constexpr double kSwitchover = 30.0;

bool is_nonpositive_integer(double a, double tol) {
  return a <= 0.5 && std::fabs(a - std::round(a)) <= tol;
}

// Integer orders are snapped so that I_{-n} = I_n applies.
double normalized_order(double order) {
  const double r = std::round(order);
  if (order < 0 && std::fabs(order - r) < 1e-14) return -r;
  return order;
}

}  // namespace

double lgamma_positive(double a) {
  int s = 0;
  return lgamma_r(a, &s);
}

double gamma(double alpha, const EvalTolerance& tol) {
  if (!std::isfinite(alpha)) throw DomainError("gamma: non-finite argument");
  if (is_nonpositive_integer(alpha, tol.abs_tol) || alpha == 0.0) {
    throw DomainError("gamma: pole at non-positive integer " + std::to_string(alpha));
  }
  if (alpha > 0) return std::tgamma(alpha);
  const int n = static_cast<int>(std::floor(-alpha));
  double denom = 1.0;
  for (int j = 0; j <= n; ++j) denom *= alpha + j;
  return std::tgamma(alpha + n + 1) / denom;
}

double log_abs_gamma(double alpha, int* sign) {
  if (alpha > 0) {
    if (sign) *sign = 1;
    return lgamma_positive(alpha);
  }
  if (alpha == std::round(alpha)) throw DomainError("log_abs_gamma: pole at non-positive integer");
  const int n = static_cast<int>(std::floor(-alpha));
  double log_denom = 0.0;
  for (int j = 0; j <= n; ++j) log_denom += std::log(std::fabs(alpha + j));
  // n+1 negative factors in the denominator
  if (sign) *sign = ((n + 1) % 2 == 0) ? 1 : -1;
  return lgamma_positive(alpha + n + 1) - log_denom;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return std::round(c);
}

namespace {

// Plain ascending series for I_order(x), x <= switchover, times `scale`.
double bessel_series_direct(double nu, double x, double scale, const EvalTolerance& tol) {
  int sgn = 1;
  const double lg = log_abs_gamma(nu + 1.0, &sgn);
  const double half = 0.5 * x;
  double term = sgn * std::exp(nu * std::log(half) - lg) * scale;
  double sum = term;
  const double q = half * half;
  for (int n = 0; n < tol.max_terms; ++n) {
    term *= q / ((n + 1.0) * (n + nu + 1.0));
    sum += term;
    const bool past_peak = (n + 1.0) * (n + nu + 2.0) > q && n + nu + 1.0 > 0;
    if (past_peak && (std::fabs(term) <= tol.rel_tol * std::fabs(sum) || std::fabs(term) <= tol.abs_tol)) {
      return sum;
    }
  }
  throw ConvergenceError("bessel_i: series did not converge within max_terms");
}

}  // namespace

double bessel_i_scaled_series(double order, double x, const EvalTolerance& tol) {
  const double nu = normalized_order(order);
  if (x < 0) throw DomainError("bessel_i: negative argument");
  if (x == 0.0) return bessel_i(nu, 0.0, tol);
  const double lhalf = std::log(0.5 * x);
  auto log_term = [&](int n, int* sgn) {
    int s = 1;
    const double lg = log_abs_gamma(n + nu + 1.0, &s);
    *sgn = s;
    return (2.0 * n + nu) * lhalf - lgamma_positive(n + 1.0) - lg - x;
  };
  const double disc = std::sqrt(nu * nu + x * x);
  const int peak = std::max(0, static_cast<int>(std::lround(0.5 * (disc - nu - 2.0))));
  int s0 = 1;
  const double lpeak = log_term(peak, &s0);
  const double cut = std::log(tol.rel_tol) - 8.0;
  double sum = s0;
  for (int n = peak - 1; n >= 0; --n) {
    int s = 1;
    const double l = log_term(n, &s);
    const double rel = l - lpeak;
    if (rel < cut && n + nu + 1.0 > 0) break;
    sum += s * std::exp(rel);
  }
  const int budget = peak + std::max(tol.max_terms, 4 * static_cast<int>(std::sqrt(x)) + 200);
  for (int n = peak + 1;; ++n) {
    if (n > budget) throw ConvergenceError("bessel_i: scaled series did not converge");
    int s = 1;
    const double rel = log_term(n, &s) - lpeak;
    sum += s * std::exp(rel);
    if (rel < cut) break;
  }
  return sum * std::exp(lpeak);
}

double bessel_i_scaled_asymptotic(double order, double x) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::fabs(next) >= prev && k > 2) break;  // expansion started to diverge
    prev = std::fabs(next);
    term = next;
    sum += term;
    if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i_scaled(double order, double x, const EvalTolerance& tol) {
  const double nu = normalized_order(order);
  if (x < 0 || !std::isfinite(x)) throw DomainError("bessel_i: argument must be finite and >= 0");
  if (x == 0.0) return bessel_i(nu, 0.0, tol);
  if (x <= kSwitchover) return bessel_series_direct(nu, x, std::exp(-x), tol);
  if (4.0 * nu * nu <= x) return bessel_i_scaled_asymptotic(nu, x);
  return bessel_i_scaled_series(nu, x, tol);
}

double bessel_i(double order, double x, const EvalTolerance& tol) {
  const double nu = normalized_order(order);
  if (x < 0 || !std::isfinite(x)) throw DomainError("bessel_i: argument must be finite and >= 0");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0) return 0.0;
    int sgn = 1;
    log_abs_gamma(nu + 1.0, &sgn);
    return sgn * std::numeric_limits<double>::infinity();
  }
  if (x <= kSwitchover) return bessel_series_direct(nu, x, 1.0, tol);
  return std::exp(x) * bessel_i_scaled(nu, x, tol);
}

namespace {

// Σ x^n / ((s+1)...(s+n)), the series part of P(s, x).
double p_series(double s, double x, const EvalTolerance& tol) {
  double term = 1.0;
  double sum = 1.0;
  const int budget = std::max(tol.max_terms, static_cast<int>(4 * x) + 100);
  for (int n = 1; n < budget; ++n) {
    term *= x / (s + n);
    sum += term;
    if (term <= tol.rel_tol * 1e-3 * sum) return sum;
  }
  throw ConvergenceError("incomplete gamma: series did not converge");
}

// Continued fraction for Γ(s,x) e^x x^{-s} (modified Lentz).
double q_continued_fraction(double s, double x, const EvalTolerance& tol) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  const int budget = std::max(tol.max_terms, 2000);
  for (int i = 1; i < budget; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) <= tol.rel_tol * 1e-3) return h;
  }
  throw ConvergenceError("incomplete gamma: continued fraction did not converge");
}

void check_gamma_args(double s, double x) {
  if (!(s > 0)) throw DomainError("incomplete gamma: s must be > 0");
  if (!(x >= 0)) throw DomainError("incomplete gamma: x must be >= 0");
}

}  // namespace

double gamma_p(double s, double x, const EvalTolerance& tol) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) {
    return std::exp(-x + s * std::log(x) - lgamma_positive(s + 1.0)) * p_series(s, x, tol);
  }
  return 1.0 - std::exp(-x + s * std::log(x) - lgamma_positive(s)) * q_continued_fraction(s, x, tol);
}

double gamma_q(double s, double x, const EvalTolerance& tol) {
  check_gamma_args(s, x);
  if (x == 0.0) return 1.0;
  if (x <= s + 1.0) return 1.0 - gamma_p(s, x, tol);
  return std::exp(-x + s * std::log(x) - lgamma_positive(s)) * q_continued_fraction(s, x, tol);
}

double log_gamma_q(double s, double x, const EvalTolerance& tol) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (x <= s + 1.0) return std::log1p(-gamma_p(s, x, tol));
  return -x + s * std::log(x) - lgamma_positive(s) + std::log(q_continued_fraction(s, x, tol));
}

double lower_incomplete_gamma(double s, double x, const EvalTolerance& tol) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return std::exp(-x + s * std::log(x)) / s * p_series(s, x, tol);
  return std::tgamma(s) * (1.0 - gamma_q(s, x, tol));
}

}  // namespace degenkernel
