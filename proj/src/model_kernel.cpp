// SPDX-License-Identifier: MIT
#include "degenkernel/model_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "degenkernel/error.hpp"
#include "degenkernel/quadrature.hpp"

namespace degenkernel {

ModelIndex::ModelIndex(double nu) : nu_(nu) {
  if (!(nu < 1.0)) throw DomainError("model index nu must be < 1, got " + std::to_string(nu));
}

bool ModelIndex::is_nonpositive_integer() const {
  return nu_ <= 0.5 && std::fabs(nu_ - std::round(nu_)) < 1e-8;
}

void require_admissible_sigma(double sigma) {
  if (!std::isfinite(sigma)) throw DomainError("q_sigma: sigma must be finite");
  const double m = std::round(sigma);
  if (m >= 2 && std::fabs(sigma - m) < 1e-8) {
    throw DomainError("q_sigma: sigma = " + std::to_string(sigma) + " lies in the excluded set {2,3,...}");
  }
}

namespace {

void require_point(const KernelPoint& pt) {
  if (!(pt.z > 0 && pt.w > 0 && pt.t > 0) || !std::isfinite(pt.z) || !std::isfinite(pt.w) ||
      !std::isfinite(pt.t)) {
    throw DomainError("kernel point requires z, w, t > 0");
  }
}

double gauss_gap(const KernelPoint& pt) {
  const double d = std::sqrt(pt.z) - std::sqrt(pt.w);
  return d * d / pt.t;
}

// log|e^{-x} I_order(x)| and its sign
double log_scaled_bessel(double order, double x, int* sign) {
  const double v = bessel_i_scaled(order, x);
  *sign = v < 0 ? -1 : 1;
  return std::log(std::fabs(v));
}

}  // namespace

double q_sigma(double sigma, const KernelPoint& pt) {
  require_admissible_sigma(sigma);
  require_point(pt);
  const double x = 2.0 * std::sqrt(pt.z * pt.w) / pt.t;
  const double log_pref = 0.5 * (1.0 - sigma) * (std::log(pt.z) - std::log(pt.w)) - std::log(pt.t);
  int sign = 1;
  const double lb = log_scaled_bessel(1.0 - sigma, x, &sign);
  return sign * std::exp(log_pref - gauss_gap(pt) + lb);
}

double log_q_sigma(double sigma, const KernelPoint& pt) {
  require_admissible_sigma(sigma);
  require_point(pt);
  if (!(sigma < 2.0)) throw DomainError("log_q_sigma: kernel may change sign for sigma > 2");
  const double x = 2.0 * std::sqrt(pt.z * pt.w) / pt.t;
  const double log_pref = 0.5 * (1.0 - sigma) * (std::log(pt.z) - std::log(pt.w)) - std::log(pt.t);
  int sign = 1;
  return log_pref - gauss_gap(pt) + log_scaled_bessel(1.0 - sigma, x, &sign);
}

double log_q_sigma_series(double sigma, const KernelPoint& pt, int* sign_out) {
  require_admissible_sigma(sigma);
  require_point(pt);
  const double lz = std::log(pt.z);
  const double lt = std::log(pt.t);
  const double lxi = std::log(pt.z) + std::log(pt.w) - 2.0 * lt;
  const double base = (1.0 - sigma) * lz - (2.0 - sigma) * lt - (pt.z + pt.w) / pt.t;
  auto log_term = [&](int n, int* sgn) {
    int s = 1;
    const double lg = log_abs_gamma(n + 2.0 - sigma, &s);
    *sgn = s;
    return n * lxi - lgamma_positive(n + 1.0) - lg;
  };
  const double xi = std::exp(lxi);
  const double disc = (sigma - 1.0) * (sigma - 1.0) + 4.0 * xi;
  const int peak = std::max(0, static_cast<int>(std::lround(0.5 * (std::sqrt(disc) - (3.0 - sigma)))));
  int s0 = 1;
  const double lpeak = log_term(peak, &s0);
  constexpr double cut = -45.0;  // terms below e^{-45} of the largest are dropped
  double sum = s0;
  for (int n = peak - 1; n >= 0; --n) {
    int s = 1;
    const double rel = log_term(n, &s) - lpeak;
    if (rel < cut && n + 2.0 - sigma > 0) break;
    sum += s * std::exp(rel);
  }
  for (int n = peak + 1;; ++n) {
    int s = 1;
    const double rel = log_term(n, &s) - lpeak;
    sum += s * std::exp(rel);
    if (rel < cut) break;
    if (n > peak + 100000) throw ConvergenceError("q_sigma series did not converge");
  }
  if (sign_out) *sign_out = sum < 0 ? -1 : 1;
  return base + lpeak + std::log(std::fabs(sum));
}

double q_sigma_series(double sigma, const KernelPoint& pt) {
  int sign = 1;
  const double l = log_q_sigma_series(sigma, pt, &sign);
  return sign * std::exp(l);
}

double q_star(ModelIndex nu, const KernelPoint& pt) {
  require_point(pt);
  const double x = 2.0 * std::sqrt(pt.z * pt.w) / pt.t;
  const double log_pref = 0.5 * (nu - 1.0) * (std::log(pt.w) - std::log(pt.z)) - std::log(pt.t);
  int sign = 1;
  const double lb = log_scaled_bessel(nu - 1.0, x, &sign);
  return sign * std::exp(log_pref - gauss_gap(pt) + lb);
}

namespace {

// Resolves Q_{nu+k} to (sigma, swapped arguments).
struct QBranch {
  double sigma;
  bool swapped;
};

QBranch q_branch(ModelIndex nu, int k) {
  if (k < 0) throw DomainError("Q: k must be >= 0");
  if (nu.is_nonpositive_integer()) {
    const int N = -static_cast<int>(std::lround(nu.value()));
    if (k <= 1 + N) return {static_cast<double>(-N + k), false};
    return {static_cast<double>(2 + N - k), true};
  }
  return {nu.value() + k, false};
}

KernelPoint swap(const KernelPoint& pt) { return {pt.w, pt.z, pt.t}; }

}  // namespace

double Q(ModelIndex nu, int k, const KernelPoint& pt) {
  const auto b = q_branch(nu, k);
  return q_sigma(b.sigma, b.swapped ? swap(pt) : pt);
}

double dz_k_q(ModelIndex nu, int k, const KernelPoint& pt) {
  double sum = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double sgn = ((k - j) % 2 == 0) ? 1.0 : -1.0;
    sum += binomial(k, j) * sgn * Q(nu, j, pt);
  }
  return sum / std::pow(pt.t, k);
}

double total_mass(ModelIndex nu, double z, double t) {
  if (!(z > 0 && t > 0)) throw DomainError("total_mass: z, t must be > 0");
  return gamma_p(1.0 - nu.value(), z / t);
}

double q_upper_bound(double sigma, const KernelPoint& pt) {
  require_admissible_sigma(sigma);
  require_point(pt);
  const double lz = std::log(pt.z);
  const double lt = std::log(pt.t);
  const double lead = (1.0 - sigma) * lz - (2.0 - sigma) * lt;
  if (sigma < 1.0) return std::exp(lead - gauss_gap(pt));
  const int m = static_cast<int>(std::floor(sigma - 2.0));
  const double lxi = lz + std::log(pt.w) - 2.0 * lt;
  const double first = lead + (m + 1) * std::max(lxi, 0.0) + lgamma_positive(m + 3.0) -
                       lgamma_positive(4.0 - sigma + m) - (pt.z + pt.w) / pt.t;
  // The second term keeps the factor (zw/t²)^{m+2} produced by the series
  // split; dropping w^{m+2} breaks the bound for w > z.
  const double second = lead + (m + 2) * lxi - gauss_gap(pt);
  return std::exp(first) + std::exp(second);
}

double q_tail_bound(double sigma, double z, double t, double W) {
  const double a = std::sqrt(W) - std::sqrt(z);
  if (a <= 0) return std::numeric_limits<double>::infinity();
  const double lead = std::exp((1.0 - sigma) * std::log(z) - (2.0 - sigma) * std::log(t));
  return lead * (t * std::exp(-a * a / t) + std::sqrt(std::numbers::pi * z * t) * std::erfc(a / std::sqrt(t)));
}

double truncation_point(double sigma, double z, double t, double abs_tol) {
  double a = std::sqrt(t);
  const double s = std::min(sigma, 0.999);
  for (int i = 0; i < 200; ++i) {
    const double W = (std::sqrt(z) + a) * (std::sqrt(z) + a);
    if (q_tail_bound(s, z, t, W) < abs_tol) return W;
    a *= 1.25;
  }
  throw ConvergenceError("truncation_point: tail bound did not fall below tolerance");
}

IntegralValue integrate_kernel_product(const RealFn& f, const std::vector<double>& centers_r, double scale_r,
                                       double W, double abs_tol, double rel_tol) {
  const double rW = std::sqrt(W);
  std::vector<double> rb{0.0, rW};
  double lo = rW;
  double hi = 0.0;
  for (double c : centers_r) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    for (int j = -12; j <= 12; ++j) rb.push_back(c + j * scale_r);
  }
  const int between = std::min(200, static_cast<int>((hi - lo) / scale_r));
  for (int j = 1; j < between; ++j) rb.push_back(lo + (hi - lo) * j / between);
  // geometric breaks toward 0 resolve kernels that vanish like a power there
  for (double r = std::min(lo, rW); r > 1e-6 * std::max(rW, 1e-300); r *= 0.5) rb.push_back(r);
  std::vector<double> breaks;
  for (double r : rb) {
    if (r >= 0 && r <= rW) breaks.push_back(r * r);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto r = integrate_pieces(f, breaks, abs_tol, rel_tol, 200);
  if (!r.converged) throw ConvergenceError("kernel quadrature did not converge");
  return {r.value, r.error, 0.0};
}

namespace {

double Q_bound(ModelIndex nu, int k, const KernelPoint& pt) {
  const auto b = q_branch(nu, k);
  return q_upper_bound(b.sigma, b.swapped ? swap(pt) : pt);
}

// ∫_W^∞ of a bound that decays like a Gaussian in √w with width √scale_t.
double numeric_tail(const RealFn& bound, double W, double scale_t) {
  const double r0 = std::sqrt(W);
  const double r1 = r0 + 30.0 * std::sqrt(scale_t) + 10.0;
  auto in_r = [&](double r) { return 2.0 * r * bound(r * r); };
  const auto res = integrate(in_r, r0, r1, 1e-300, 1e-6, 200);
  return res.value + res.error;
}

}  // namespace

IntegralValue v_g(ModelIndex nu, const RealFn& g, double z, double t, const EvalTolerance& tol) {
  return dz_k_v_g(nu, 0, g, z, t, tol);
}

IntegralValue dz_k_v_g(ModelIndex nu, int k, const RealFn& g_k, double z, double t, const EvalTolerance& tol) {
  if (!(z > 0 && t > 0)) throw DomainError("v_g: z, t must be > 0");
  const double quad_tol = std::max(tol.rel_tol, 1e-14);
  const double W = truncation_point(std::min(nu.value() + k, 0.999), z, t, 1e-17);
  auto f = [&](double w) { return Q(nu, k, {z, w, t}) * g_k(w); };
  auto res = integrate_kernel_product(f, {std::sqrt(z)}, 0.5 * std::sqrt(t), W, 1e-300, quad_tol);
  res.tail_bound = numeric_tail([&](double w) { return Q_bound(nu, k, {z, w, t}) * std::fabs(g_k(w)); }, W, t);
  return res;
}

bool conv_admissible(ModelIndex nu, int k, int l) {
  if (l < 0 || l > k) return false;
  if (nu.is_nonpositive_integer()) return true;
  return k <= static_cast<int>(std::floor(1.0 - nu.value()));
}

IntegralValue conv_Q(ModelIndex nu, int k, int l, double z, double w, double t, double s,
                     const EvalTolerance& tol) {
  if (!(z > 0 && w > 0 && t > 0 && s > 0)) throw DomainError("conv_Q: arguments must be > 0");
  const double quad_tol = std::max(tol.rel_tol, 1e-14);
  const double spread = std::max(t, s);
  const double a = std::sqrt(70.0 * spread) + 1.0;
  const double W = std::pow(std::max(std::sqrt(z), std::sqrt(w)) + a, 2);
  auto f = [&](double xi) { return Q(nu, k, {z, xi, t}) * Q(nu, l, {xi, w, s}); };
  const double scale = 0.5 * std::sqrt(std::min(t, s));
  auto res = integrate_kernel_product(f, {std::sqrt(z), std::sqrt(w)}, scale, W, 1e-300, quad_tol);
  res.tail_bound = numeric_tail(
      [&](double xi) { return Q_bound(nu, k, {z, xi, t}) * Q_bound(nu, l, {xi, w, s}); }, W, spread);
  return res;
}

double conv_Q_closed(ModelIndex nu, int k, int l, double z, double w, double t, double s) {
  if (l > k) throw DomainError("conv_Q_closed: requires l <= k");
  const int d = k - l;
  double sum = 0.0;
  for (int j = 0; j <= d; ++j) {
    sum += binomial(d, j) * std::pow(t, j) * std::pow(s, d - j) * Q(nu, l + j, {z, w, t + s});
  }
  return sum / std::pow(t + s, d);
}

double S_k(ModelIndex nu, int k, const KernelPoint& pt) {
  double sum = 0.0;
  for (int m = 0; m <= k; ++m) sum += binomial(k, m) * Q(nu, m, pt);
  return sum;
}

}  // namespace degenkernel
