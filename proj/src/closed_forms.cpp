// SPDX-License-Identifier: MIT
#include "degenkernel/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "degenkernel/error.hpp"
#include "degenkernel/numerics.hpp"
#include "degenkernel/quadrature.hpp"
#include "degenkernel/specfun.hpp"

namespace degenkernel {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
}

void require_positive(double x, double y, double t) {
  if (!(x > 0.0 && y > 0.0 && t > 0.0)) throw DomainError("x, y and t must be positive");
}

}  // namespace

double log_p_alpha(double alpha, double x, double y, double t) {
  require_alpha(alpha);
  require_positive(x, y, t);
  const double g = 2.0 - alpha;
  const double scale = g * g * t;
  const double X = std::pow(x, g);
  const double Y = std::pow(y, g);
  const double arg = 2.0 * std::sqrt(X * Y) / scale;
  // e^{-(X+Y)/scale} I(arg) = e^{-(√X-√Y)²/scale} · e^{-arg} I(arg)
  const double gap = (std::sqrt(X) - std::sqrt(Y)) * (std::sqrt(X) - std::sqrt(Y)) / scale;
  return 0.5 * std::log(x) + (0.5 - alpha) * std::log(y) - std::log(t) - std::log(g) - gap +
         std::log(bessel_i_scaled(1.0 / g, arg));
}

double p_alpha(double alpha, double x, double y, double t) { return std::exp(log_p_alpha(alpha, x, y, t)); }

namespace {

struct MassArgs {
  double eta;
  double T;
};

MassArgs mass_args(double alpha, double x, double t) {
  require_alpha(alpha);
  if (!(x > 0.0 && t > 0.0)) throw DomainError("x and t must be positive");
  const double g = 2.0 - alpha;
  return {1.0 / g, std::pow(x, g) / (g * g * t)};
}

}  // namespace

double mass_loss(double alpha, double x, double t) {
  const auto [eta, T] = mass_args(alpha, x, t);
  return gamma_q(eta, T);
}

double log_mass_loss(double alpha, double x, double t) {
  const auto [eta, T] = mass_args(alpha, x, t);
  return log_gamma_q(eta, T);
}

double log_mass_loss_asymptotic(double alpha, double x, double t) {
  const auto [eta, T] = mass_args(alpha, x, t);
  const double g = 2.0 - alpha;
  return (alpha - 1.0) * std::log(x) - T - lgamma_positive(eta) - (alpha - 1.0) / g * std::log(g * g * t) +
         std::log1p(g * t / std::pow(x, g));
}

double mass_loss_asymptotic(double alpha, double x, double t) {
  return std::exp(log_mass_loss_asymptotic(alpha, x, t));
}

double mass_loss_exponent_ratio(double alpha, double x, double t) {
  const auto [eta, T] = mass_args(alpha, x, t);
  return -log_gamma_q(eta, T) / T;
}

// --- drift variant ----------------------------------------------------------

struct DriftVariant::Cache {
  std::mutex mu;
  std::map<std::tuple<double, double, double>, std::shared_ptr<const RatioTable>> tables;
};

DriftVariant::DriftVariant(double alpha, double beta, RealFn shape, RealFn shape_prime, int order)
    : alpha_(alpha),
      beta_(beta),
      shape_(std::move(shape)),
      shape_prime_(std::move(shape_prime)),
      order_(order),
      cache_(std::make_shared<Cache>()) {
  require_alpha(alpha);
  if (!(beta >= 1.0)) throw DomainError("beta must be at least 1");
  if (order > 12) throw DomainError("Duhamel order above 12 is not supported");
  if (!shape_prime_) {
    shape_prime_ = [f = shape_](double x) { return richardson_derivative(f, x, 1e-3 * x); };
  }
  // sample grid 1e-8 .. 1e3, 16 points per decade
  bool all_zero = true;
  for (int j = -8 * 16; j <= 3 * 16; ++j) {
    const double x = std::pow(10.0, j / 16.0);
    const double s = shape_(x);
    if (!std::isfinite(s)) throw DomainError("drift shape is not finite at x = " + std::to_string(x));
    if (s != 0.0) all_zero = false;
  }
  if (all_zero) return;
  if (!(std::fabs(shape_(1e-8)) > 1e-12)) throw DomainError("drift shape must have a non-zero limit at 0");
  const double far = 1e3;
  if (!(std::pow(far, 2.0 * beta + 2.0) * std::fabs(shape_(far)) < 1e-8)) {
    throw DomainError("drift shape does not decay fast enough at infinity");
  }
  double sup = 0.0;
  for (int j = -8 * 16; j <= 3 * 16; ++j) sup = std::max(sup, std::fabs(Lambda(std::pow(10.0, j / 16.0))));
  lambda_sup_ = 1.25 * sup;
}

namespace {

double drift_potential(double alpha, double beta, const RealFn& shape, const RealFn& shape_prime, double x) {
  const double s = shape(x);
  const double sp = shape_prime(x);
  if (s == 0.0 && sp == 0.0) return 0.0;
  return -std::pow(x, 2.0 * beta - alpha) * s * s / 4.0 - (beta - alpha) * std::pow(x, beta - 1.0) * s / 2.0 -
         std::pow(x, beta) * sp / 2.0;
}

}  // namespace

double DriftVariant::Lambda(double x) const { return drift_potential(alpha_, beta_, shape_, shape_prime_, x); }

double DriftVariant::drift_integral(double x, double y) const {
  if (x == y || trivial()) return 0.0;
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  auto f = [&](double u) { return std::pow(u, beta_ - alpha_) * shape_(u); };
  std::vector<double> breaks{lo};
  for (double b = lo * 10.0; b < hi; b *= 10.0) breaks.push_back(b);
  breaks.push_back(hi);
  const auto r = integrate_pieces(f, breaks, 1e-15, 1e-13);
  if (!r.converged) throw ConvergenceError("drift integral did not converge");
  return x < y ? r.value : -r.value;
}

double DriftVariant::base(double x, double y, double t) const {
  return std::exp(log_p_alpha(alpha_, x, y, t) + 0.5 * drift_integral(x, y));
}

KernelValue DriftVariant::p(double x, double y, double t) const {
  return p(x, y, t, order_ >= 0 ? order_ : default_order(t, lambda_sup_));
}

KernelValue DriftVariant::p(double x, double y, double t, int order) const {
  if (order < 0 || order > 12) throw DomainError("Duhamel order must lie in [0, 12]");
  KernelValue out;
  const double b = base(x, y, t);
  out.truncation_bound = duhamel_tail_factor(t, lambda_sup_, order) * b;
  if (trivial() || order == 0) {
    out.value = b;
    return out;
  }
  const double g = 2.0 - alpha_;
  auto phi = [g](double u) { return std::pow(u, g) / (g * g); };
  const double cover = PotentialKernel::cover_for(phi(x), phi(y), t);
  const auto key = std::make_tuple(y, t, cover);
  std::shared_ptr<const RatioTable> tab;
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->tables.find(key);
    if (it != cache_->tables.end()) tab = it->second;
  }
  if (!tab) {
    const double alpha = alpha_;
    RatioProblem prob;
    prob.log_kernel = [alpha](double a, double c, double s) { return log_p_alpha(alpha, a, c, s); };
    prob.potential = [alpha, beta = beta_, s = shape_, sp = shape_prime_](double u) {
      return drift_potential(alpha, beta, s, sp, u);
    };
    prob.u_of_r = [g](double r) { return std::pow(g * r, 2.0 / g); };
    prob.r_of_u = [g](double u) { return std::pow(u, 0.5 * g) / g; };
    prob.log_du_dr = [g, alpha](double r) { return std::log(2.0) + alpha / g * std::log(g * r); };
    TableSpec spec = grid_;
    spec.r_nodes = std::max(spec.r_nodes, static_cast<int>(std::ceil(4.0 * cover)));
    auto built = std::make_shared<const RatioTable>(prob, y, t, cover, 12, spec, parallel_);
    std::lock_guard<std::mutex> lock(cache_->mu);
    tab = cache_->tables.emplace(key, built).first->second;
  }
  out.value = b * tab->sum(0, order, x, t);
  out.quadrature_estimate = b * std::expm1(t * lambda_sup_) * std::max(tab->mass_defect(), 1e-15);
  return out;
}

KernelValue drift_variant_p(double alpha, double beta, const RealFn& shape, double x, double y, double t, int order) {
  return DriftVariant(alpha, beta, shape, {}, order).p(x, y, t);
}

// --- printed half-line kernels ----------------------------------------------

namespace {

// e^{-a} sinh(b) and e^{-a} cosh(b) without overflow
double exp_sinh(double a, double b) { return 0.5 * (std::exp(b - a) - std::exp(-b - a)); }
double exp_cosh(double a, double b) { return 0.5 * (std::exp(b - a) + std::exp(-b - a)); }

}  // namespace

const std::vector<std::string>& reference_kernel_names() {
  static const std::vector<std::string> names{"heat_dirichlet", "heat_neumann", "geometric_alpha2",
                                              "example4_dirichlet", "example4_free"};
  return names;
}

double reference_kernel(const std::string& name, double x, double y, double t) {
  require_positive(x, y, t);
  const double pi = std::numbers::pi;
  if (name == "heat_dirichlet") return exp_sinh((x * x + y * y) / (4.0 * t), x * y / (2.0 * t)) / std::sqrt(pi * t);
  if (name == "heat_neumann") return exp_cosh((x * x + y * y) / (4.0 * t), x * y / (2.0 * t)) / std::sqrt(pi * t);
  if (name == "geometric_alpha2") {
    const double l = std::log(y) - std::log(x);
    return std::sqrt(x * y / (4.0 * pi * t)) * std::exp(-l * l / (4.0 * t) - t / 4.0) / (y * y);
  }
  if (name == "example4_dirichlet") {
    return exp_sinh((x + y) / t, 2.0 * std::sqrt(x * y) / t) / std::sqrt(y * pi * t);
  }
  if (name == "example4_free") return exp_cosh((x + y) / t, 2.0 * std::sqrt(x * y) / t) / std::sqrt(y * pi * t);
  throw UsageError("unknown reference kernel '" + name + "'");
}

}  // namespace degenkernel
