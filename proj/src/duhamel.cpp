// SPDX-License-Identifier: MIT
#include "degenkernel/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degenkernel/error.hpp"
#include "degenkernel/numerics.hpp"
#include "degenkernel/quadrature.hpp"

namespace degenkernel {

namespace {

constexpr int kTableLevels = 12;
constexpr double kWindowSds = 12.0;
constexpr int kMaxRNodes = 192;
constexpr double kRTailTol = 1e-9;

double log_factorial(int n) { return lgamma_positive(n + 1.0); }

}  // namespace

double duhamel_tail_factor(double t, double V_sup, int order) {
  const double x = t * V_sup;
  if (x == 0.0) return 0.0;
  return std::exp(x + (order + 1) * std::log(x) - log_factorial(order + 1));
}

int default_order(double t, double V_sup) {
  for (int k = 0; k < 8; ++k) {
    if (duhamel_tail_factor(t, V_sup, k) <= 1e-6) return k;
  }
  return 8;
}

RatioTable::RatioTable(const RatioProblem& prob, double target_u, double horizon, double r_max, int max_order,
                       const TableSpec& spec, bool parallel)
    : prob_(prob),
      target_u_(target_u),
      horizon_(horizon),
      r_max_(r_max),
      max_order_(max_order),
      r_grid_(spec.r_nodes, 0.0, r_max),
      tau_grid_(spec.tau_nodes, 0.0, horizon) {
  const int nr = spec.r_nodes;
  const int nt = spec.tau_nodes;
  const int n = nr * nt;
  std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> defect(n, 0.0);
  const double r_w = prob.r_of_u(target_u);
  const auto& sig_rule = gauss_legendre(spec.sigma_order);
  const auto& xi_rule = gauss_legendre(spec.xi_order);

  // Each node owns one row of A, so the result does not depend on the
  // schedule or thread count.
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int node = 0; node < n; ++node) {
    const int i = node / nt;
    const int j = node % nt;
    const double r_z = r_grid_.nodes()[i];
    const double u_z = prob.u_of_r(r_z);
    const double tau = tau_grid_.nodes()[j];
    const double lk0 = prob.log_kernel(u_z, target_u, tau);
    std::vector<double> acc(nr), lr(nr), lt(nt);
    double* row = A.data() + static_cast<std::size_t>(node) * n;
    double worst = 0.0;
    for (int half = 0; half < 2; ++half) {
      const double a = half == 0 ? 0.0 : 0.5 * tau;
      const double hw = 0.25 * tau;
      const double mid = a + hw;
      for (int s = 0; s < spec.sigma_order; ++s) {
        const double sigma = mid + hw * sig_rule.nodes[s];
        const double ws = hw * sig_rule.weights[s];
        // ξ sits at time tau - sigma on the bridge from z to w
        const double centre = r_z + (tau - sigma) / tau * (r_w - r_z);
        const double sd = std::sqrt(sigma * (tau - sigma) / (2.0 * tau));
        const double lo = std::max(0.0, centre - kWindowSds * sd);
        const double hi = centre + kWindowSds * sd;
        const double width = (hi - lo) / spec.xi_panels;
        std::fill(acc.begin(), acc.end(), 0.0);
        double mass = 0.0;
        // near r = 0 the density behaves like r^{3-2nu}; a cubic map on the
        // first panel restores fast convergence
        const bool graded = lo == 0.0;
        for (int p = 0; p < spec.xi_panels; ++p) {
          const double pc = lo + (p + 0.5) * width;
          for (int q = 0; q < spec.xi_order; ++q) {
            double r = pc + 0.5 * width * xi_rule.nodes[q];
            double jac = 0.5 * width;
            if (graded && p == 0) {
              const double s = 0.5 * (1.0 + xi_rule.nodes[q]);
              r = width * s * s * s;
              jac = 1.5 * width * s * s;
            }
            const double u = prob.u_of_r(r);
            const double lrho = prob.log_kernel(u_z, u, tau - sigma) + prob.log_kernel(u, target_u, sigma) - lk0 +
                                prob.log_du_dr(r);
            const double rho = jac * xi_rule.weights[q] * std::exp(lrho);
            if (!(rho > 0.0)) continue;
            mass += rho;
            const double v = rho * prob.potential(u);
            if (v == 0.0) continue;
            r_grid_.basis(std::min(r, r_max), lr.data());
            for (int m = 0; m < nr; ++m) acc[m] += v * lr[m];
          }
        }
        worst = std::max(worst, std::fabs(mass - 1.0));
        tau_grid_.basis(sigma, lt.data());
        for (int m = 0; m < nr; ++m) {
          const double c = ws * acc[m];
          if (c == 0.0) continue;
          double* dst = row + static_cast<std::size_t>(m) * nt;
          for (int l = 0; l < nt; ++l) dst[l] += c * lt[l];
        }
      }
    }
    defect[node] = worst;
  }
  mass_defect_ = *std::max_element(defect.begin(), defect.end());

  levels_.assign(max_order + 1, std::vector<double>(n, 0.0));
  std::fill(levels_[0].begin(), levels_[0].end(), 1.0);
  for (int lev = 1; lev <= max_order; ++lev) {
    const auto& prev = levels_[lev - 1];
    auto& cur = levels_[lev];
#pragma omp parallel for schedule(static) if (parallel)
    for (int row = 0; row < n; ++row) {
      const double* a = A.data() + static_cast<std::size_t>(row) * n;
      double s = 0.0;
      for (int col = 0; col < n; ++col) s += a[col] * prev[col];
      cur[row] = s;
    }
  }
}

double RatioTable::level(int n, double u, double tau) const { return sum(n, n, u, tau); }

double RatioTable::sum(int from, int to, double u, double tau) const {
  if (from < 0 || to > max_order_) throw DomainError("Duhamel order outside the tabulated range");
  if (from > to) return 0.0;
  const int nr = r_grid_.size();
  const int nt = tau_grid_.size();
  const double r = std::clamp(prob_.r_of_u(u), 0.0, r_max_);
  tau = std::clamp(tau, 0.0, horizon_);
  std::vector<double> lt(nt), along(nr);
  tau_grid_.basis(tau, lt.data());
  for (int i = 0; i < nr; ++i) {
    double s = 0.0;
    for (int lev = from; lev <= to; ++lev) {
      const double* v = levels_[lev].data() + static_cast<std::size_t>(i) * nt;
      for (int l = 0; l < nt; ++l) s += v[l] * lt[l];
    }
    along[i] = s;
  }
  return r_grid_.eval(along.data(), r);
}

PotentialKernel::PotentialKernel(ModelIndex nu, RealFn V, double V_sup, int order, TableSpec grid)
    : nu_(nu), V_(std::move(V)), V_sup_(V_sup), order_(order), grid_(grid), cache_(std::make_shared<Cache>()) {
  if (!(V_sup >= 0.0)) throw DomainError("V_sup must be non-negative");
  if (order > kTableLevels) throw DomainError("Duhamel order above 12 is not supported");
  if (nu.value() >= 1.0) throw DomainError("model index must be below 1");
}

int PotentialKernel::order_for(double t) const { return order_ >= 0 ? order_ : default_order(t, V_sup_); }

double PotentialKernel::C_V(int k, int per_decade) const {
  if (c_v_) return c_v_(k, per_decade);
  // sampled on a log grid over [1e-6, 1e4]
  double best = 0.0;
  const int decades = 10;
  for (int s = 0; s <= decades * per_decade; ++s) {
    const double z = std::pow(10.0, -6.0 + static_cast<double>(s) / per_decade);
    best = std::max(best, std::fabs(V_(z)));
    if (k >= 1) {
      auto d1 = [&](double x) { return richardson_derivative(V_, x, 1e-3 * x); };
      best = std::max(best, std::fabs(d1(z)));
      if (k >= 2) best = std::max(best, std::fabs(richardson_derivative(d1, z, 1e-2 * z)));
    }
  }
  return 1.25 * best;
}

double PotentialKernel::cover_for(double z, double w, double t) {
  const double r = std::max(std::sqrt(z), std::sqrt(w));
  // bucketed so nearby queries share a table
  return 2.0 * std::ceil(0.5 * r + 1e-12) + 8.0 * std::sqrt(t) + 1.0;
}

std::shared_ptr<const RatioTable> PotentialKernel::table(double w, double horizon, double r_cover) const {
  const auto key = std::make_tuple(w, horizon, r_cover);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->tables.find(key);
    if (it != cache_->tables.end()) return it->second;
  }
  const double nu = nu_.value();
  RatioProblem prob;
  prob.log_kernel = [nu](double a, double b, double t) { return log_q_sigma(nu, {a, b, t}); };
  prob.potential = V_;
  prob.u_of_r = [](double r) { return r * r; };
  prob.r_of_u = [](double u) { return std::sqrt(u); };
  prob.log_du_dr = [](double r) { return std::log(2.0 * r); };
  TableSpec spec = grid_;
  spec.r_nodes = std::max(spec.r_nodes, static_cast<int>(std::ceil(4.0 * r_cover)));
  // An oscillating V needs more r nodes than the cover alone suggests; grow
  // until its own expansion has a negligible tail.
  const auto V_of_r = [this](double r) { return V_(r * r); };
  const double v_scale = std::max(V_sup_, std::numeric_limits<double>::min());
  while (spec.r_nodes < kMaxRNodes && chebyshev_tail(V_of_r, spec.r_nodes, 0.0, r_cover) > kRTailTol * v_scale) {
    spec.r_nodes = std::min(kMaxRNodes, spec.r_nodes * 3 / 2);
  }
  auto built = std::make_shared<const RatioTable>(prob, w, horizon, r_cover, kTableLevels, spec, parallel_);
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto [it, inserted] = cache_->tables.emplace(key, built);
  return it->second;
}

double duhamel_iterate(const PotentialKernel& pk, int n, const KernelPoint& pt) {
  if (n < 0) throw DomainError("Duhamel iterate index must be non-negative");
  const double q0 = q_sigma(pk.nu(), pt);
  if (n == 0) return q0;
  if (pk.potential_free()) return 0.0;
  const auto tab = pk.table(pt.w, pt.t, PotentialKernel::cover_for(pt.z, pt.w, pt.t));
  return q0 * tab->level(n, pt.z, pt.t);
}

KernelValue q_nu_V(const PotentialKernel& pk, const KernelPoint& pt) { return q_nu_V(pk, pt, pk.order_for(pt.t)); }

KernelValue q_nu_V(const PotentialKernel& pk, const KernelPoint& pt, int order) {
  return q_nu_V_target(pk, pt, order, pt.t, PotentialKernel::cover_for(pt.z, pt.w, pt.t));
}

KernelValue q_nu_V_target(const PotentialKernel& pk, const KernelPoint& pt, int order, double horizon,
                          double r_cover) {
  if (order < 0 || order > kTableLevels) throw DomainError("Duhamel order must lie in [0, 12]");
  if (horizon <= 0.0) horizon = pt.t;
  if (r_cover <= 0.0) r_cover = PotentialKernel::cover_for(pt.z, pt.w, horizon);
  KernelValue out;
  const double q0 = q_sigma(pk.nu(), pt);
  out.truncation_bound = duhamel_tail_factor(pt.t, pk.V_sup(), order) * q0;
  if (pk.potential_free() || order == 0) {
    out.value = q0;
    return out;
  }
  const auto tab = pk.table(pt.w, horizon, r_cover);
  out.value = q0 * tab->sum(0, order, pt.z, pt.t);
  out.quadrature_estimate = q0 * std::expm1(pt.t * pk.V_sup()) * std::max(tab->mass_defect(), 1e-15);
  return out;
}

KernelValue q_nu_V_source(const PotentialKernel& pk, const KernelPoint& pt, int order, double horizon,
                          double r_cover) {
  if (order < 0 || order > kTableLevels) throw DomainError("Duhamel order must lie in [0, 12]");
  if (horizon <= 0.0) horizon = pt.t;
  if (r_cover <= 0.0) r_cover = PotentialKernel::cover_for(pt.z, pt.w, horizon);
  KernelValue out;
  const double q0 = q_sigma(pk.nu(), pt);
  out.truncation_bound = duhamel_tail_factor(pt.t, pk.V_sup(), order) * q0;
  if (pk.potential_free() || order == 0) {
    out.value = q0;
    return out;
  }
  const auto tab = pk.table(pt.z, horizon, r_cover);
  out.value = q0 * tab->sum(0, order, pt.w, pt.t);
  out.quadrature_estimate = q0 * std::expm1(pt.t * pk.V_sup()) * std::max(tab->mass_defect(), 1e-15);
  return out;
}

double symmetry_residual(const PotentialKernel& pk, const KernelPoint& pt, int order) {
  const double e = 1.0 - pk.nu().value();
  const double lhs = std::pow(pt.w, e) * q_nu_V(pk, pt, order).value;
  const double rhs = std::pow(pt.z, e) * q_nu_V(pk, {pt.w, pt.z, pt.t}, order).value;
  return std::fabs(lhs - rhs) / std::max(std::fabs(lhs), std::fabs(rhs));
}

double chapman_kolmogorov_residual(const PotentialKernel& pk, double z, double w, double t, double s, int order) {
  const double spread = std::sqrt(std::max(t, s));
  const double rW = std::max(std::sqrt(z), std::sqrt(w)) + 7.0 * spread + 1.0;
  const double W = rW * rW;
  // one table per side: target z for the first factor, target w for the second
  const double cover_t = PotentialKernel::cover_for(z, W, t);
  const double cover_s = PotentialKernel::cover_for(w, W, s);
  auto f = [&](double xi) {
    return q_nu_V_source(pk, {z, xi, t}, order, t, cover_t).value *
           q_nu_V_target(pk, {xi, w, s}, order, s, cover_s).value;
  };
  const auto res = integrate_kernel_product(f, {std::sqrt(z), std::sqrt(w)}, 0.5 * spread, W, 1e-300, 1e-10);
  const double direct = q_nu_V(pk, {z, w, t + s}, order).value;
  return std::fabs(direct - res.value) / std::fabs(direct);
}

namespace {

double central_kth(const std::function<double(double)>& f, double z, double h, int k) {
  switch (k) {
    case 0:
      return f(z);
    case 1:
      return (f(z + h) - f(z - h)) / (2.0 * h);
    case 2:
      return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
    case 3:
      return (f(z + 2.0 * h) - 2.0 * f(z + h) + 2.0 * f(z - h) - f(z - 2.0 * h)) / (2.0 * h * h * h);
    default:
      throw DomainError("finite-difference derivative order above 3 is not supported");
  }
}

}  // namespace

DerivativeCheck check_derivative_bound(const PotentialKernel& pk, int k, const KernelPoint& pt) {
  const int order = pk.order_for(pt.t);
  const double h = std::max(1e-4, 1e-3 * pt.z);
  const double cover = PotentialKernel::cover_for(pt.z + 2.0 * h, pt.w, pt.t);
  auto f = [&](double z) { return q_nu_V_target(pk, {z, pt.w, pt.t}, order, pt.t, cover).value; };
  DerivativeCheck out;
  out.lhs = std::fabs(central_kth(f, pt.z, h, k));
  const double growth = std::pow(1.0 + k * pt.t, k) / std::pow(pt.t, k);
  const double sk = std::fabs(S_k(pk.nu(), k, pt));
  for (int per_decade : {16, 64}) {
    out.per_decade = per_decade;
    out.C_V = pk.C_V(k, per_decade);
    out.rhs = growth * std::exp(std::pow(3.0, k) * out.C_V * pt.t) * sk;
    // tolerance covers the finite-difference and tail error of the lhs
    const double tol = 1e-6 * out.rhs + duhamel_tail_factor(pt.t, pk.V_sup(), order) * out.lhs;
    out.pass = out.lhs <= out.rhs + tol;
    if (out.pass) break;
  }
  return out;
}

namespace {

// Shared tables for the stencils: fixed horizon and cover, so every stencil
// point reads the same interpolant.
double stencil_horizon(double t) { return 1.25 * t + 0.02; }

}  // namespace

double pde_residual_backward(const PotentialKernel& pk, int order, const KernelPoint& pt, double h) {
  const double horizon = stencil_horizon(pt.t);
  const double cover = PotentialKernel::cover_for(pt.z + h, pt.w, horizon);
  auto S = [&](int k, double z, double t) {
    return q_nu_V_target(pk, {z, pt.w, t}, k, horizon, cover).value;
  };
  const double z = pt.z;
  const double t = pt.t;
  const double dt = (S(order, z, t + h) - S(order, z, t - h)) / (2.0 * h);
  const double f0 = S(order, z, t);
  const double fp = S(order, z + h, t);
  const double fm = S(order, z - h, t);
  const double dzz = (fp - 2.0 * f0 + fm) / (h * h);
  const double dz = (fp - fm) / (2.0 * h);
  const double lower = order >= 1 ? S(order - 1, z, t) : 0.0;
  return dt - z * dzz - pk.nu().value() * dz - pk.V(z) * lower;
}

double pde_residual_forward(const PotentialKernel& pk, int order, const KernelPoint& pt, double h) {
  const double horizon = stencil_horizon(pt.t);
  const double cover = PotentialKernel::cover_for(pt.z, pt.w + h, horizon);
  auto S = [&](int k, double w, double t) {
    return q_nu_V_source(pk, {pt.z, w, t}, k, horizon, cover).value;
  };
  const double w = pt.w;
  const double t = pt.t;
  const double dt = (S(order, w, t + h) - S(order, w, t - h)) / (2.0 * h);
  const double fp = S(order, w + h, t);
  const double f0 = S(order, w, t);
  const double fm = S(order, w - h, t);
  const double d2 = ((w + h) * fp - 2.0 * w * f0 + (w - h) * fm) / (h * h);
  const double d1 = (fp - fm) / (2.0 * h);
  const double lower = order >= 1 ? S(order - 1, w, t) : 0.0;
  return dt - d2 + pk.nu().value() * d1 - pk.V(w) * lower;
}

}  // namespace degenkernel
