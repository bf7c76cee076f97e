// SPDX-License-Identifier: MIT
/**
 * @file duhamel.hpp
 * @brief Perturbation series for the model kernel with a bounded potential.
 *
 * q_0 = q_nu and q_n(z,w,t) = ∫_0^t ∫_0^∞ q_nu(z,ξ,t-τ) V(ξ) q_{n-1}(ξ,w,τ) dξ dτ.
 *
 * The iterates are carried as ratios R_n = q_n / q_0 on a Chebyshev grid in
 * (√z, τ) for one target w and horizon T. With the bridge density
 * ρ(ξ) = q(z,ξ,τ-σ) q(ξ,w,σ) / q(z,w,τ), which integrates to one,
 *   R_n(z,τ) = ∫_0^τ dσ ∫ ρ(ξ) V(ξ) R_{n-1}(ξ,σ) dξ,
 * so each level is one application of a fixed linear map on the grid values.
 */
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "degenkernel/model_kernel.hpp"
#include "degenkernel/numerics.hpp"

namespace degenkernel {

struct KernelValue {
  double value = 0.0;
  double truncation_bound = 0.0;     // absolute bound on the discarded tail
  double quadrature_estimate = 0.0;  // absolute estimate of quadrature/interpolation error
};

/// e^{tV}(tV)^{k+1}/(k+1)!: relative bound on the tail after order k.
double duhamel_tail_factor(double t, double V_sup, int order);

/// Smallest order whose relative tail is <= 1e-6, capped at 8.
int default_order(double t, double V_sup);

/// Discretization of one ratio table.
struct TableSpec {
  int r_nodes = 48;
  int tau_nodes = 12;
  int xi_panels = 4;
  int xi_order = 16;
  int sigma_order = 10;  // Gauss-Legendre nodes on each half of [0, τ]
};

/// Base kernel, potential and coordinate for the ratio engine. The kernel
/// must be a transition density whose square-root coordinate r diffuses
/// with variance t/2, e.g. q_nu in z with r = √z.
struct RatioProblem {
  std::function<double(double, double, double)> log_kernel;  // log k(u1, u2, t), native coordinate
  RealFn potential;                                          // in native coordinate
  RealFn u_of_r;
  RealFn r_of_u;
  RealFn log_du_dr;
};

class RatioTable {
 public:
  RatioTable(const RatioProblem& prob, double target_u, double horizon, double r_max, int max_order,
             const TableSpec& spec, bool parallel);

  int max_order() const { return max_order_; }
  double horizon() const { return horizon_; }
  double r_max() const { return r_max_; }
  /// R_n at native coordinate u and time tau ∈ (0, horizon].
  double level(int n, double u, double tau) const;
  /// Σ_{n=from}^{to} R_n.
  double sum(int from, int to, double u, double tau) const;
  /// Largest |∫ρ - 1| seen by the quadrature.
  double mass_defect() const { return mass_defect_; }

 private:
  RatioProblem prob_;
  double target_u_;
  double horizon_;
  double r_max_;
  int max_order_;
  ChebyshevInterpolant r_grid_;
  ChebyshevInterpolant tau_grid_;
  std::vector<std::vector<double>> levels_;  // [n][i * tau_nodes + j]
  double mass_defect_ = 0.0;
};

/// Potential kernel q_nu^V. Holds a shared cache of ratio tables; copies
/// share the cache. Safe for concurrent use.
class PotentialKernel {
 public:
  PotentialKernel(ModelIndex nu, RealFn V, double V_sup, int order = -1, TableSpec grid = {});

  ModelIndex nu() const { return nu_; }
  double V(double z) const { return V_(z); }
  double V_sup() const { return V_sup_; }
  /// Requested order, or default_order(t, V_sup) when unset.
  int order_for(double t) const;
  bool potential_free() const { return V_sup_ == 0.0; }
  const TableSpec& grid() const { return grid_; }

  /// Estimator for C_k^V = max_{j<=k} sup |V^{(j)}| (with safety factor).
  /// Defaults to 1.25·V_sup·(k+1) scaled finite differences if unset.
  void set_derivative_sup(std::function<double(int, int)> f) { c_v_ = std::move(f); }
  double C_V(int k, int per_decade = 16) const;

  void set_parallel(bool on) { parallel_ = on; }

  /// Ratio table for target w, horizon T covering √z <= r_cover.
  std::shared_ptr<const RatioTable> table(double w, double horizon, double r_cover) const;

  /// Cover radius used for a query at (z, w, t).
  static double cover_for(double z, double w, double t);

 private:
  ModelIndex nu_;
  RealFn V_;
  double V_sup_;
  int order_;
  TableSpec grid_;
  std::function<double(int, int)> c_v_;
  bool parallel_ = true;

  struct Cache {
    std::mutex mu;
    std::map<std::tuple<double, double, double>, std::shared_ptr<const RatioTable>> tables;
  };
  std::shared_ptr<Cache> cache_;
};

/// q_{nu,n}(z,w,t).
double duhamel_iterate(const PotentialKernel& pk, int n, const KernelPoint& pt);

/// Σ_{n<=order} q_{nu,n} with the certified tail bound.
KernelValue q_nu_V(const PotentialKernel& pk, const KernelPoint& pt);
KernelValue q_nu_V(const PotentialKernel& pk, const KernelPoint& pt, int order);

/// As q_nu_V, from the table targeting w with the given horizon (>= t) and
/// cover radius. Non-positive values select the defaults.
KernelValue q_nu_V_target(const PotentialKernel& pk, const KernelPoint& pt, int order, double horizon = 0.0,
                          double r_cover = 0.0);

/// q_nu^V(z,w,t) from the table that targets z. The ratio q_n/q_nu is
/// symmetric in (z, w), so one table serves every w for a fixed source z.
/// `r_cover` <= 0 selects cover_for(z, w, horizon).
KernelValue q_nu_V_source(const PotentialKernel& pk, const KernelPoint& pt, int order, double horizon = 0.0,
                          double r_cover = 0.0);

/// |w^{1-nu} q^V(z,w,t) - z^{1-nu} q^V(w,z,t)| relative to the larger term,
/// each side from its own table.
double symmetry_residual(const PotentialKernel& pk, const KernelPoint& pt, int order);

/// |q^V(z,w,t+s) - ∫ q^V(z,ξ,t) q^V(ξ,w,s) dξ| relative to q^V(z,w,t+s).
double chapman_kolmogorov_residual(const PotentialKernel& pk, double z, double w, double t, double s, int order);

struct DerivativeCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double C_V = 0.0;
  int per_decade = 16;  // sampling density used for C_k^V
};

/// |∂_z^k q_nu^V| (central differences) against
/// ((1+kt)^k/t^k)·e^{3^k C_k^V t}·S_k(z,w,t).
DerivativeCheck check_derivative_bound(const PotentialKernel& pk, int k, const KernelPoint& pt);

/// Residual of the truncated series in its own equation:
/// (∂t - z∂z² - nu∂z) S_k - V S_{k-1}, with central differences of step h.
double pde_residual_backward(const PotentialKernel& pk, int order, const KernelPoint& pt, double h);

/// Forward counterpart in w: ∂t S_k - ∂w²(w S_k) + nu ∂w S_k - V(w) S_{k-1}.
double pde_residual_forward(const PotentialKernel& pk, int order, const KernelPoint& pt, double h);

}  // namespace degenkernel
