// SPDX-License-Identifier: MIT
#include "degenkernel/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degenkernel/error.hpp"
#include "degenkernel/expr.hpp"
#include "degenkernel/numerics.hpp"
#include "degenkernel/quadrature.hpp"

namespace degenkernel {

Coefficients power_coefficients(double alpha) {
  Coefficients c;
  c.a = [alpha](double x) { return std::pow(x, alpha); };
  c.a_prime = [alpha](double x) { return alpha * std::pow(x, alpha - 1.0); };
  c.a_second = [alpha](double x) { return alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0); };
  c.b = [](double) { return 0.0; };
  c.b_prime = [](double) { return 0.0; };
  std::ostringstream os;
  os.precision(17);
  os << "power(alpha=" << alpha << ")";
  c.label = os.str();
  return c;
}

Coefficients power_drift_coefficients(double alpha, double beta, RealFn shape, RealFn shape_prime) {
  Coefficients c = power_coefficients(alpha);
  if (!shape_prime) {
    shape_prime = [shape](double x) { return richardson_derivative(shape, x, 1e-3 * std::max(x, 1e-3)); };
  }
  c.b = [beta, shape](double x) { return std::pow(x, beta) * shape(x); };
  c.b_prime = [beta, shape, shape_prime](double x) {
    return beta * std::pow(x, beta - 1.0) * shape(x) + std::pow(x, beta) * shape_prime(x);
  };
  std::ostringstream os;
  os.precision(17);
  os << "power+drift(alpha=" << alpha << ", beta=" << beta << ")";
  c.label = os.str();
  return c;
}

Coefficients expression_coefficients(const std::string& a_src, const std::string& b_src) {
  const auto ea = expr::parse(a_src);
  const auto eb = expr::parse(b_src);
  Coefficients c;
  // Probes reach far past any physical range (x^2 overflows near 1e154), so a
  // failed evaluation becomes NaN, as a native coefficient would return; the
  // positivity screen still rejects NaN on the sampled range.
  const auto lenient = [](const expr::Expr& e) {
    return [e](double x) {
      try {
        return expr::eval(e, x);
      } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
  };
  c.a = lenient(ea);
  c.b = lenient(eb);
  c.label = "a(x) = " + expr::print(ea) + ", b(x) = " + expr::print(eb);
  return c;
}

namespace {

constexpr double kZLo = 1e-6;   // V and d̃ caches start here
constexpr double kZHi = 1e4;
constexpr int kPerDecade = 40;  // integral cache density
constexpr double kDriftFloor = 1e-9;
constexpr double kPotentialFloor = 1e-10;

RealFn numeric_derivative(const RealFn& f) {
  return [f](double x) { return richardson_derivative(f, x, 1e-3 * x); };
}

// below this a(s) is replaced by its power-law asymptote
constexpr double kTinyA = 1e-290;
constexpr double kResolvedA = 1e-280;

struct Probe {
  double alpha0 = 0.0;    // vanishing order of a at 0
  double alpha_inf = 0.0;  // growth order at infinity
  double c0 = 1.0;         // a(s) ≈ c0 s^alpha0 near 0
};

double slope(const RealFn& a, double x1, double x2) {
  return std::log(a(x2) / a(x1)) / std::log(x2 / x1);
}

Probe probe(const RealFn& a) {
  Probe p;
  // Fit the power law near 0 as deep as a stays representable, so that the
  // asymptote takes over where the exact values stop and sub-leading powers
  // (x^1.5 + x^1.75) have died out.
  double x = 1e-14;
  while (x > 1e-270) {
    const double next = a(1e-10 * x);
    if (!(next > kTinyA) || !std::isfinite(next)) break;
    x *= 1e-10;
  }
  p.alpha0 = slope(a, x, 100.0 * x);
  p.alpha_inf = slope(a, 1e6, 1e8);
  p.c0 = std::exp(std::log(a(x)) - p.alpha0 * std::log(x));
  return p;
}

}  // namespace

struct TransformBundle::Impl {
  Coefficients c;
  bool analytic_d_prime = false;
  Probe pr;
  double p_sub = 1.0;  // s = x·u^p removes the endpoint singularity

  std::vector<double> xs;   // geometric grid
  std::vector<double> Is;   // I at the grid nodes
  std::vector<double> Lth;  // log theta at the grid nodes
  double log_ratio = 0.0;

  double nu = 0.0;
  LimitResult limit;
  bool drift_free = false;
  bool potential_free = false;
  PiecewiseChebyshev V_cache;
  PiecewiseChebyshev dt_cache;
  double V_sup = 0.0;

  // a(s)^{-1/2} in log form, robust when s underflows
  double log_inv_sqrt_a(double log_s) const {
    const double s = std::exp(log_s);
    if (s > kTinyA) {
      const double as = c.a(s);
      if (as > kTinyA && std::isfinite(as)) return -0.5 * std::log(as);
    }
    return -0.5 * (std::log(pr.c0) + pr.alpha0 * log_s);
  }

  double I_from_zero(double x) const {
    const double lx = std::log(x);
    auto f = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double lu = std::log(u);
      return std::exp(lx + std::log(p_sub) + (p_sub - 1.0) * lu + log_inv_sqrt_a(lx + p_sub * lu));
    };
    const auto r = integrate(f, 0.0, 1.0, 1e-300, 1e-14, 400);
    if (!std::isfinite(r.value) || r.error > 1e-10 * std::fabs(r.value)) {
      throw DomainError("scale condition violated: integral of a^{-1/2} near 0 does not converge");
    }
    return r.value;
  }

  double inv_sqrt_a(double s) const { return 1.0 / std::sqrt(c.a(s)); }

  std::size_t cell(double x) const {
    const double k = std::floor(std::log(x / xs.front()) / log_ratio);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(xs.size() - 2)));
  }

  double I(double x) const {
    if (!(x > 0)) throw DomainError("transform: x must be > 0");
    if (x < xs.front()) return I_from_zero(x);
    if (x > xs.back()) {
      const auto r = integrate([&](double s) { return inv_sqrt_a(s); }, xs.back(), x, 1e-300, 1e-14, 2000);
      return Is.back() + r.value;
    }
    const std::size_t i = cell(x);
    return Is[i] + integrate_fixed([&](double s) { return inv_sqrt_a(s); }, xs[i], x, 1, 16);
  }

  double G(double x) const { return (2.0 * c.b(x) - c.a_prime(x)) / (4.0 * std::sqrt(c.a(x))); }
  double g(double x) const { return G(x) * I(x); }
  double d(double x) const {
    if (drift_free) return 0.0;
    // a' is not resolved once a nears underflow; d has reached its limit 0
    if (!(c.a(x) > kResolvedA)) return 0.0;
    const double gx = g(x);
    const double v = gx + 0.5 - nu;
    // below the cancellation floor d is rounding noise, and d/s would
    // amplify it without bound near 0
    const double floor = analytic_d_prime ? 1e-14 : 1e-11;
    return std::fabs(v) <= floor * (std::fabs(gx) + std::fabs(0.5 - nu)) ? 0.0 : v;
  }

  double d_prime(double x) const {
    if (drift_free) return 0.0;
    if (!analytic_d_prime) return richardson_derivative([&](double s) { return d(s); }, x, 1e-3 * x);
    const double a = c.a(x);
    const double sa = std::sqrt(a);
    const double ap = c.a_prime(x);
    const double num = 2.0 * c.b(x) - ap;
    const double Gp = (2.0 * c.b_prime(x) - c.a_second(x)) / (4.0 * sa) - num * ap / (8.0 * a * sa);
    return Gp * I(x) + num / (4.0 * a);
  }

  double psi(double z) const {
    if (!(z > 0)) throw DomainError("psi: z must be > 0");
    const double J = 2.0 * std::sqrt(z);
    double lo;
    double hi;
    double x;
    if (J <= Is.front()) {
      lo = 0.0;
      hi = xs.front();
      x = xs.front() * std::pow(J / Is.front(), p_sub);
    } else if (J >= Is.back()) {
      lo = xs.back();
      hi = xs.back();
      while (I(hi) < J) {
        lo = hi;
        hi *= 4.0;
        if (hi > 1e300) throw DomainError("psi: z beyond the range of phi");
      }
      x = 0.5 * (lo + hi);
    } else {
      const auto it = std::upper_bound(Is.begin(), Is.end(), J);
      const std::size_t i = static_cast<std::size_t>(it - Is.begin()) - 1;
      lo = xs[i];
      hi = xs[i + 1];
      const double f = (std::log(J) - std::log(Is[i])) / (std::log(Is[i + 1]) - std::log(Is[i]));
      x = lo * std::exp(f * (std::log(hi) - std::log(lo)));
    }
    for (int it = 0; it < 100; ++it) {
      const double F = I(x) - J;
      if (std::fabs(F) <= 4e-16 * J) return x;
      if (F > 0) hi = x;
      else lo = x;
      double next = x - F * std::sqrt(c.a(x));
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::fabs(next - x) <= 1e-16 * x) return next;
      x = next;
    }
    throw ConvergenceError("psi: root finding did not converge");
  }

  double theta_integrand(double s) const { return d(s) / (I(s) * std::sqrt(c.a(s))); }

  double log_theta_from_zero(double x) const {
    auto f = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double s = x * std::pow(u, p_sub);
      if (s <= 1e-290) return 0.0;
      return theta_integrand(s) * x * p_sub * std::pow(u, p_sub - 1.0);
    };
    const auto r = integrate(f, 0.0, 1.0, 1e-300, 1e-13, 400);
    // log theta needs absolute accuracy; the cancellation floor on d leaves a
    // small jump that a relative test on a tiny integral would reject
    if (!std::isfinite(r.value) || r.error > 1e-9 * std::max(std::fabs(r.value), 1.0)) {
      throw DomainError("theta: d(s)/s is not integrable at 0");
    }
    return -r.value;
  }

  double log_theta_at_x(double x) const {
    if (drift_free) return 0.0;
    if (x < xs.front()) return log_theta_from_zero(x);
    if (x > xs.back()) {
      const auto r = integrate([&](double s) { return theta_integrand(s); }, xs.back(), x, 1e-300, 1e-13, 2000);
      return Lth.back() - r.value;
    }
    const std::size_t i = cell(x);
    return Lth[i] - integrate_fixed([&](double s) { return theta_integrand(s); }, xs[i], x, 1, 16);
  }

  double phi_prime(double x) const { return 0.5 * I(x) / std::sqrt(c.a(x)); }

  double d_tilde_exact(double z) const { return drift_free ? 0.0 : d(psi(z)); }

  double V_exact(double z) const {
    if (drift_free) return 0.0;
    const double x = psi(z);
    const double dt = d(x);
    const double dtp = d_prime(x) / phi_prime(x);
    return -dt * dt / (4.0 * z) - 0.5 * dtp + (1.0 - nu) * dt / (2.0 * z);
  }
};

namespace {

using Impl = TransformBundle::Impl;

Coefficients fill_derivatives(Coefficients c, bool* analytic) {
  *analytic = static_cast<bool>(c.a_prime) && static_cast<bool>(c.b_prime) && static_cast<bool>(c.a_second);
  if (!c.a_prime) c.a_prime = numeric_derivative(c.a);
  if (!c.b_prime) c.b_prime = numeric_derivative(c.b);
  return c;
}

void add(ConditionsReport* rep, std::string name, bool ok, double value, std::string detail,
         const char* pass = "pass", const char* fail = "fail") {
  rep->entries.push_back({std::move(name), ok ? pass : fail, value, std::move(detail)});
  rep->all_pass = rep->all_pass && ok;
}

// Stage 1: positivity and the two integrability conditions on a.
bool screen_a(const Coefficients& c, Probe* pr, ConditionsReport* rep) {
  bool positive = true;
  double worst = 0.0;
  for (int j = -80; j <= 40; ++j) {
    const double x = std::pow(10.0, j / 10.0);
    const double v = c.a(x);
    if (!(v > 0) || !std::isfinite(v)) {
      positive = false;
      worst = x;
      break;
    }
  }
  add(rep, "a positive on (0,inf)", positive, worst, positive ? "sampled 1e-8..1e4" : "a(x) <= 0 at sampled x");
  if (!positive) return false;
  *pr = probe(c.a);
  const bool near0 = pr->alpha0 < 2.0 - 1e-6;
  add(rep, "scale: integral of a^{-1/2} finite at 0", near0, pr->alpha0,
      "detected vanishing order of a at 0 must be < 2");
  const bool at_inf = pr->alpha_inf <= 2.0 + 1e-6;
  add(rep, "scale: integral of a^{-1/2} divergent at infinity", at_inf, pr->alpha_inf,
      "detected growth order of a at infinity must be <= 2");
  return near0 && at_inf;
}

void build_grid(Impl* m) {
  m->p_sub = 1.0 / (1.0 - std::clamp(m->pr.alpha0, -4.0, 1.999) / 2.0);
  m->log_ratio = std::log(10.0) / kPerDecade;
  double x_lo = 1e-8;
  while (0.25 * std::pow(m->I_from_zero(x_lo), 2) > 1e-12 && x_lo > 1e-250) x_lo *= 1e-4;
  m->xs.assign(1, x_lo);
  m->Is.assign(1, m->I_from_zero(x_lo));
  const double ratio = std::exp(m->log_ratio);
  auto extend_to = [&](double x_end) {
    while (m->xs.back() < x_end) {
      const double a = m->xs.back();
      const double b = a * ratio;
      m->Is.push_back(m->Is.back() + integrate_fixed([&](double s) { return m->inv_sqrt_a(s); }, a, b, 1, 20));
      m->xs.push_back(b);
    }
  };
  extend_to(1e4 * (1.0 - 1e-12));
  while (0.25 * m->Is.back() * m->Is.back() < 1e6 && m->xs.back() < 1e250) extend_to(m->xs.back() * 1e4);
}

bool find_nu(Impl* m, ConditionsReport* rep) {
  auto g = [m](double x) { return m->g(x); };
  LimitResult best;
  for (double x0 : {1e-3, 1e-5, 1e-7}) {
    best = limit_at_zero(g, x0, 6, 1e-8);
    if (best.converged) break;
  }
  m->limit = best;
  std::string how = best.used_epsilon ? "Wynn epsilon fallback" : "Richardson depth 6";
  add(rep, "drift: drift limit exists", best.converged, best.value, how);
  if (!best.converged) return false;
  const bool below = best.value < 0.5 - 1e-9;
  add(rep, "drift: drift limit below 1/2", below, best.value,
      below ? "nu = 1/2 + limit < 1" : "nu >= 1: 0 is an entrance boundary, kernel construction unsupported");
  m->nu = 0.5 + best.value;
  return below;
}

void screen_drift(Impl* m, ConditionsReport* rep) {
  double max_d = 0.0;
  for (int j = -60; j <= 40; ++j) max_d = std::max(max_d, std::fabs(m->d(m->psi(std::pow(10.0, j / 10.0)))));
  m->drift_free = max_d < kDriftFloor;

  // Growth bounds on the grid: the ratios must not grow toward either end.
  std::vector<double> r1;
  std::vector<double> r2;
  for (int j = -60; j <= 40; ++j) {
    const double x = m->psi(std::pow(10.0, j / 10.0));
    r1.push_back(std::fabs(m->d(x)) / std::sqrt(0.25 * std::pow(m->I(x), 2)));
    r2.push_back(std::fabs(m->d_prime(x)) / m->phi_prime(x));
  }
  auto verdict = [](const std::vector<double>& r, double* sup) {
    *sup = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) return false;
      *sup = std::max(*sup, v);
    }
    // samples are 10 per decade of z
    auto growing = [&](bool from_end) {
      const std::size_t n = r.size();
      auto at = [&](std::size_t k) { return from_end ? r[n - 1 - k] : r[k]; };
      if (!(at(0) > 1e-6)) return false;
      std::size_t rising = 0;
      while (rising < 20 && at(rising) > at(rising + 1)) ++rising;
      if (rising >= 5 && at(0) > 10.0 * at(5)) return true;
      if (rising < 20) return false;
      // a steady power law keeps its rate per decade; an approach to a
      // finite limit slows down geometrically
      const double near = std::log(at(0) / at(10));
      const double far = std::log(at(10) / at(20));
      return near > std::log(1.2) && near >= 0.8 * far;
    };
    return !(growing(true) || growing(false));
  };
  double sup1 = 0.0;
  double sup2 = 0.0;
  const bool ok1 = verdict(r1, &sup1);
  const bool ok2 = verdict(r2, &sup2);
  add(rep, "growth: sup |d|/sqrt(phi)", ok1, sup1, "sampled z = 1e-6..1e4", "not falsified on grid",
      "falsified on grid");
  add(rep, "growth: sup |d'|/phi'", ok2, sup2, "sampled z = 1e-6..1e4", "not falsified on grid",
      "falsified on grid");
}

void build_caches(Impl* m) {
  if (!m->drift_free) {
    m->Lth.assign(1, m->log_theta_from_zero(m->xs.front()));
    for (std::size_t i = 0; i + 1 < m->xs.size(); ++i) {
      m->Lth.push_back(m->Lth.back() -
                       integrate_fixed([&](double s) { return m->theta_integrand(s); }, m->xs[i], m->xs[i + 1], 1, 20));
    }
  }
  const double lo = std::log(kZLo);
  const double hi = std::log(kZHi);
  const int panels = 46;
  m->V_cache = PiecewiseChebyshev([m](double s) { return m->V_exact(std::exp(s)); }, lo, hi, panels, 12);
  m->dt_cache = PiecewiseChebyshev([m](double s) { return m->d_tilde_exact(std::exp(s)); }, lo, hi, panels, 12);
  const double vmax = m->V_cache.max_abs_node();
  m->potential_free = m->drift_free || vmax < kPotentialFloor;
  m->V_sup = m->potential_free ? 0.0 : 1.25 * vmax;
}

}  // namespace

ConditionsReport validate_conditions(const Coefficients& coeffs) {
  ConditionsReport rep;
  rep.nu = std::numeric_limits<double>::quiet_NaN();
  Impl m;
  m.c = fill_derivatives(coeffs, &m.analytic_d_prime);
  try {
    if (!screen_a(m.c, &m.pr, &rep)) return rep;
    build_grid(&m);
    if (!find_nu(&m, &rep)) return rep;
    rep.nu = m.nu;
    screen_drift(&m, &rep);
  } catch (const DomainError& e) {
    add(&rep, "evaluation", false, 0.0, e.what());
  }
  return rep;
}

TransformBundle TransformBundle::build(const Coefficients& coeffs) {
  auto m = std::make_shared<Impl>();
  m->c = fill_derivatives(coeffs, &m->analytic_d_prime);
  ConditionsReport rep;
  auto fail = [&]() {
    for (const auto& e : rep.entries) {
      if (e.status != "fail" && e.status != "falsified on grid") continue;
      const auto colon = e.name.find(':');
      const std::string head = colon == std::string::npos ? e.name : e.name.substr(0, colon);
      const std::string rest = colon == std::string::npos ? std::string() : e.name.substr(colon + 1);
      std::ostringstream os;
      os.precision(17);
      if (colon == std::string::npos) {
        os << head << " violated";
      } else {
        os << head << " condition violated:" << rest;
      }
      os << " (value " << e.value << "; " << e.detail << ")";
      throw DomainError(os.str());
    }
    throw DomainError("coefficient validation failed");
  };
  if (!screen_a(m->c, &m->pr, &rep)) fail();
  build_grid(m.get());
  if (!find_nu(m.get(), &rep)) fail();
  screen_drift(m.get(), &rep);
  for (const auto& e : rep.entries) {
    if (e.status == "falsified on grid") fail();
  }
  build_caches(m.get());
  TransformBundle b;
  b.impl_ = std::move(m);
  return b;
}

double TransformBundle::nu() const { return impl_->nu; }
double TransformBundle::inner_integral(double x) const { return impl_->I(x); }
double TransformBundle::phi(double x) const {
  const double I = impl_->I(x);
  return 0.25 * I * I;
}
double TransformBundle::phi_prime(double x) const { return impl_->phi_prime(x); }
double TransformBundle::phi_second(double x) const {
  const double a = impl_->c.a(x);
  return 0.5 / a - impl_->I(x) * impl_->c.a_prime(x) / (4.0 * a * std::sqrt(a));
}
double TransformBundle::psi(double z) const { return impl_->psi(z); }
double TransformBundle::d(double x) const { return impl_->d(x); }
double TransformBundle::d_prime(double x) const { return impl_->d_prime(x); }

double TransformBundle::d_tilde(double z) const {
  if (impl_->drift_free) return 0.0;
  if (z < kZLo || z > kZHi) return impl_->d_tilde_exact(z);
  return impl_->dt_cache(std::log(z));
}
double TransformBundle::d_tilde_exact(double z) const { return impl_->d_tilde_exact(z); }

double TransformBundle::theta_at_x(double x) const { return std::exp(impl_->log_theta_at_x(x)); }
double TransformBundle::theta(double z) const {
  if (impl_->drift_free) return 1.0;
  return theta_at_x(impl_->psi(z));
}
double TransformBundle::theta_prime(double z) const {
  if (impl_->drift_free) return 0.0;
  return -theta(z) * d_tilde(z) / (2.0 * z);
}

double TransformBundle::V(double z) const {
  if (impl_->potential_free) return 0.0;
  if (z > kZHi) return impl_->V_exact(z);
  return impl_->V_cache(std::log(std::max(z, kZLo)));
}
double TransformBundle::V_exact(double z) const { return impl_->potential_free ? 0.0 : impl_->V_exact(z); }
double TransformBundle::V_sup() const { return impl_->V_sup; }

double TransformBundle::C_V(int k, int per_decade) const {
  if (k < 0 || k > 2) throw DomainError("C_V: only derivative orders 0..2 are estimated");
  if (impl_->potential_free) return 0.0;
  auto Vf = [this](double z) { return impl_->V_exact(z); };
  double m = 0.0;
  const int n = 10 * per_decade;
  for (int i = 0; i <= n; ++i) {
    const double z = kZLo * std::pow(10.0, static_cast<double>(i) / per_decade);
    m = std::max(m, std::fabs(Vf(z)));
    if (k >= 1) m = std::max(m, std::fabs(richardson_derivative(Vf, z, 1e-3 * z)));
    if (k >= 2) {
      const double h = 1e-3 * z;
      m = std::max(m, std::fabs((Vf(z + h) - 2.0 * Vf(z) + Vf(z - h)) / (h * h)));
    }
  }
  return 1.25 * m;
}

bool TransformBundle::drift_free() const { return impl_->drift_free; }
bool TransformBundle::potential_free() const { return impl_->potential_free; }
const Coefficients& TransformBundle::coefficients() const { return impl_->c; }
double TransformBundle::vanishing_order() const { return impl_->pr.alpha0; }

}  // namespace degenkernel
