// SPDX-License-Identifier: MIT
#include "degenkernel/general_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "degenkernel/error.hpp"
#include "degenkernel/numerics.hpp"

namespace degenkernel {

double touchard(int k, double x) {
  if (k < 0) throw DomainError("Touchard index must be non-negative");
  // row of Stirling numbers of the second kind
  std::vector<double> S(k + 1, 0.0);
  S[0] = 1.0;
  for (int n = 1; n <= k; ++n) {
    for (int j = n; j >= 1; --j) S[j] = j * S[j] + S[j - 1];
    S[0] = 0.0;
  }
  double sum = 0.0;
  double p = 1.0;
  for (int j = 0; j <= k; ++j) {
    sum += S[j] * p;
    p *= x;
  }
  return sum;
}

double bell_partial(int k, int j, const std::vector<double>& xs) {
  if (k < 0 || j < 0) throw DomainError("Bell polynomial indices must be non-negative");
  if (k == 0 && j == 0) return 1.0;
  if (k == 0 || j == 0) return 0.0;
  // B[n][m] for n <= k, m <= j
  std::vector<std::vector<double>> B(k + 1, std::vector<double>(j + 1, 0.0));
  B[0][0] = 1.0;
  for (int n = 1; n <= k; ++n) {
    for (int m = 1; m <= std::min(n, j); ++m) {
      double s = 0.0;
      for (int i = 1; i <= n - m + 1; ++i) {
        const double xi = i - 1 < static_cast<int>(xs.size()) ? xs[i - 1] : 0.0;
        s += binomial(n - 1, i - 1) * xi * B[n - i][m - 1];
      }
      B[n][m] = s;
    }
  }
  return B[k][j];
}

GeneralKernel::GeneralKernel(TransformBundle bundle, int order, TableSpec grid)
    : bundle_(std::move(bundle)),
      pk_(bundle_.nu(), [b = bundle_](double z) { return b.V(z); }, bundle_.potential_free() ? 0.0 : bundle_.V_sup(),
          order, grid) {
  pk_.set_derivative_sup([b = bundle_](int k, int per_decade) { return b.C_V(k, per_decade); });
}

namespace {

struct Gauge {
  double z, w, factor;
};

Gauge gauge(const TransformBundle& b, double x, double y) {
  const double z = b.phi(x);
  const double w = b.phi(y);
  double f = b.phi_prime(y);
  if (!b.drift_free()) f *= b.theta_at_x(x) / b.theta_at_x(y);
  return {z, w, f};
}

KernelValue scaled(KernelValue kv, double f) {
  kv.value *= f;
  kv.truncation_bound *= std::fabs(f);
  kv.quadrature_estimate *= std::fabs(f);
  return kv;
}

void require_xyt(double x, double y, double t) {
  if (!(x > 0.0 && y > 0.0 && t > 0.0)) throw DomainError("x, y and t must be positive");
}

}  // namespace

KernelValue GeneralKernel::p(double x, double y, double t) const { return p(x, y, t, pk_.order_for(t)); }

KernelValue GeneralKernel::p(double x, double y, double t, int order) const {
  return p_target(x, y, t, order, 0.0, 0.0);
}

KernelValue GeneralKernel::p_target(double x, double y, double t, int order, double horizon, double cover) const {
  require_xyt(x, y, t);
  const auto g = gauge(bundle_, x, y);
  return scaled(q_nu_V_target(pk_, {g.z, g.w, t}, order, horizon, cover), g.factor);
}

KernelValue GeneralKernel::p_source(double x, double y, double t, int order, double horizon, double cover) const {
  require_xyt(x, y, t);
  const auto g = gauge(bundle_, x, y);
  return scaled(q_nu_V_source(pk_, {g.z, g.w, t}, order, horizon, cover), g.factor);
}

double GeneralKernel::p_approx(double x, double y, double t) const {
  require_xyt(x, y, t);
  const auto g = gauge(bundle_, x, y);
  return q_sigma(bundle_.nu(), {g.z, g.w, t}) * g.factor;
}

double GeneralKernel::p_approx_k(int k, double x, double y, double t) const { return p(x, y, t, k).value; }

IntegralValue GeneralKernel::u_f(const RealFn& f, double x, double t) const {
  if (!(x > 0.0 && t > 0.0)) throw DomainError("x and t must be positive");
  const double nu = bundle_.nu();
  const double z = bundle_.phi(x);
  const double W = truncation_point(nu, z, t, 1e-14);
  const int order = pk_.order_for(t);
  const double cover = PotentialKernel::cover_for(z, W, t);
  const bool drift_free = bundle_.drift_free();
  const double theta_x = drift_free ? 1.0 : bundle_.theta_at_x(x);
  auto integrand = [&](double w) {
    const double q = q_nu_V_source(pk_, {z, w, t}, order, t, cover).value;
    const double gauge_w = drift_free ? 1.0 : theta_x / bundle_.theta(w);
    return q * gauge_w * f(bundle_.psi(w));
  };
  auto res = integrate_kernel_product(integrand, {std::sqrt(z)}, 0.5 * std::sqrt(t), W, 1e-300, 1e-11);
  // tail beyond W: q^V <= e^{tV} q, theta ratio and |f| sampled past W
  double f_sup = 0.0;
  double inv_theta = 1.0;
  for (double m : {1.0, 2.0, 10.0, 100.0}) {
    f_sup = std::max(f_sup, std::fabs(f(bundle_.psi(m * W))));
    if (!drift_free) inv_theta = std::max(inv_theta, theta_x / bundle_.theta(m * W));
  }
  res.tail_bound = std::exp(t * pk_.V_sup()) * inv_theta * 2.0 * f_sup * q_tail_bound(nu, z, t, W);
  return res;
}

double GeneralKernel::symmetry_residual(double x, double y, double t) const {
  const double nu = bundle_.nu();
  auto m = [&](double u) {
    const double th = bundle_.drift_free() ? 1.0 : bundle_.theta_at_x(u);
    return std::pow(bundle_.phi(u), 1.0 - nu) * th * th / bundle_.phi_prime(u);
  };
  const double lhs = m(y) * p(x, y, t).value;
  const double rhs = m(x) * p(y, x, t).value;
  const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
  return scale == 0.0 ? 0.0 : std::fabs(lhs - rhs) / scale;
}

double GeneralKernel::ck_residual(double x, double y, double t, double s) const {
  require_xyt(x, y, t);
  if (!(s > 0.0)) throw DomainError("s must be positive");
  const double zx = bundle_.phi(x);
  const double zy = bundle_.phi(y);
  const double spread = std::sqrt(std::max(t, s));
  const double rW = std::max(std::sqrt(zx), std::sqrt(zy)) + 7.0 * spread + 1.0;
  const double W = rW * rW;
  const int order = pk_.order_for(t + s);
  const double cover_t = PotentialKernel::cover_for(zx, W, t);
  const double cover_s = PotentialKernel::cover_for(zy, W, s);
  // ∫ p(x,u,t) p(u,y,s) du with u = psi(ξ), du = dξ / phi'(u)
  auto f = [&](double xi) {
    const double u = bundle_.psi(xi);
    return p_source(x, u, t, order, t, cover_t).value * p_target(u, y, s, order, s, cover_s).value /
           bundle_.phi_prime(u);
  };
  const auto res = integrate_kernel_product(f, {std::sqrt(zx), std::sqrt(zy)}, 0.5 * spread, W, 1e-300, 1e-10);
  const double direct = p(x, y, t + s, order).value;
  return std::fabs(direct - res.value) / std::fabs(direct);
}

namespace {

double stencil_horizon(double t) { return 1.25 * t + 0.02; }

// first and second derivative at x from samples f(x + j h); one-sided
// second-order formulas when the centred stencil would leave (0, ∞)
struct Diff {
  double d1, d2;
};

Diff spatial_diff(const std::function<double(double)>& f, double x, double h) {
  if (x >= 3.0 * h) {
    const double fp = f(x + h);
    const double f0 = f(x);
    const double fm = f(x - h);
    return {(fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)};
  }
  const double f0 = f(x);
  const double f1 = f(x + h);
  const double f2 = f(x + 2.0 * h);
  const double f3 = f(x + 3.0 * h);
  return {(-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h), (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h)};
}

}  // namespace

double GeneralKernel::pde_residual_backward(double x, double y, double t, double h) const {
  require_xyt(x, y, t);
  if (!(h > 0.0 && h < t)) throw DomainError("step must lie in (0, t)");
  const double horizon = stencil_horizon(t);
  const double cover = PotentialKernel::cover_for(bundle_.phi(x + 3.0 * h), bundle_.phi(y), horizon);
  const int order = pk_.order_for(t);
  auto P = [&](double xx, double tt) { return p_target(xx, y, tt, order, horizon, cover).value; };
  const auto d = spatial_diff([&](double xx) { return P(xx, t); }, x, h);
  const double dt = (P(x, t + h) - P(x, t - h)) / (2.0 * h);
  const auto& c = bundle_.coefficients();
  return dt - c.a(x) * d.d2 - c.b(x) * d.d1;
}

double GeneralKernel::pde_residual_forward(double x, double y, double t, double h) const {
  require_xyt(x, y, t);
  if (!(h > 0.0 && h < t)) throw DomainError("step must lie in (0, t)");
  const double horizon = stencil_horizon(t);
  const double cover = PotentialKernel::cover_for(bundle_.phi(x), bundle_.phi(y + 3.0 * h), horizon);
  const int order = pk_.order_for(t);
  const auto& c = bundle_.coefficients();
  auto P = [&](double yy, double tt) { return p_source(x, yy, tt, order, horizon, cover).value; };
  const double dt = (P(y, t + h) - P(y, t - h)) / (2.0 * h);
  const auto ap = spatial_diff([&](double yy) { return c.a(yy) * P(yy, t); }, y, h);
  const auto bp = spatial_diff([&](double yy) { return c.b(yy) * P(yy, t); }, y, h);
  return dt - ap.d2 + bp.d1;
}

namespace {

double kth_difference(const std::function<double(double)>& f, double x, double h, int k) {
  if (k == 0) return f(x);
  const bool centred = x >= 3.0 * h;
  if (centred) {
    switch (k) {
      case 1:
        return (f(x + h) - f(x - h)) / (2.0 * h);
      case 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
      case 3:
        return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
      default:
        break;
    }
  } else {
    switch (k) {
      case 1:
        return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
      case 2:
        return (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2.0 * h) - f(x + 3.0 * h)) / (h * h);
      case 3:
        return (-f(x) + 3.0 * f(x + h) - 3.0 * f(x + 2.0 * h) + f(x + 3.0 * h)) / (h * h * h);
      default:
        break;
    }
  }
  throw DomainError("finite-difference derivative order above 3 is not supported");
}

// sup over (0, hi] of max_{j<=k} |f^{(j)}|, sampled on a mixed log/linear grid
double sampled_sup(const std::vector<std::function<double(double)>>& derivs, int k, double hi) {
  double best = 0.0;
  std::vector<double> pts;
  for (int i = 0; i <= 160; ++i) pts.push_back(hi * std::pow(10.0, -8.0 + 8.0 * i / 160.0));
  for (int i = 1; i <= 200; ++i) pts.push_back(hi * i / 200.0);
  for (double u : pts) {
    for (int j = 0; j <= k; ++j) best = std::max(best, std::fabs(derivs[j](u)));
  }
  return best;
}

}  // namespace

PDerivativeCheck GeneralKernel::p_derivative_bound_check(int k, double M, double t, int n) const {
  if (k < 0 || k > 3) throw DomainError("derivative order must lie in [0, 3]");
  if (!(M > 0.0 && t > 0.0) || n < 1) throw DomainError("M, t and n must be positive");
  const auto& b = bundle_;
  std::vector<std::function<double(double)>> theta_d{[&](double z) { return b.drift_free() ? 1.0 : b.theta(z); },
                                                     [&](double z) { return b.drift_free() ? 0.0 : b.theta_prime(z); }};
  theta_d.push_back([&](double z) { return richardson_derivative(theta_d[1], z, 1e-3 * z); });
  theta_d.push_back([&](double z) { return richardson_derivative(theta_d[2], z, 1e-2 * z); });
  std::vector<std::function<double(double)>> phi_d{[&](double x) { return b.phi(x); },
                                                   [&](double x) { return b.phi_prime(x); },
                                                   [&](double x) { return b.phi_second(x); }};
  phi_d.push_back([&](double x) { return richardson_derivative(phi_d[2], x, 1e-3 * x); });

  PDerivativeCheck out;
  out.C_theta = sampled_sup(theta_d, k, b.phi(M));
  out.C_phi = sampled_sup(phi_d, k, M);
  const int order = pk_.order_for(t);

  std::vector<double> pts{M / (4.0 * n)};
  for (int i = 1; i <= n; ++i) pts.push_back(M * i / n);

  for (int per_decade : {16, 64}) {
    out.C_V = pk_.C_V(k, per_decade);
    out.pass = true;
    out.worst_ratio = 0.0;
    const double growth = out.C_theta * touchard(k, out.C_phi) * std::exp(std::pow(3.0, k) * out.C_V * t) *
                          std::pow(1.0 / t + k + 1.0, k);
    for (double y : pts) {
      const double w = b.phi(y);
      const double cover = PotentialKernel::cover_for(b.phi(M * 1.01), w, t);
      const double theta_y = b.drift_free() ? 1.0 : b.theta_at_x(y);
      for (double x : pts) {
        const double h = std::max(1e-4, 1e-3 * x);
        auto f = [&](double xx) { return p_target(xx, y, t, order, t, cover).value; };
        const double lhs = std::fabs(kth_difference(f, x, h, k));
        const double rhs = growth * std::fabs(S_k(b.nu(), k, {b.phi(x), w, t})) * std::fabs(b.phi_prime(y)) / theta_y;
        const double ratio = lhs / rhs;
        if (ratio > out.worst_ratio) {
          out.worst_ratio = ratio;
          out.worst_x = x;
          out.worst_y = y;
          out.lhs = lhs;
          out.rhs = rhs;
        }
        if (lhs > rhs * (1.0 + 1e-6)) out.pass = false;
      }
    }
    if (out.pass) break;
  }
  return out;
}

}  // namespace degenkernel
