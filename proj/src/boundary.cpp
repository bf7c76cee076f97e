// SPDX-License-Identifier: MIT
#include "degenkernel/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "degenkernel/error.hpp"
#include "degenkernel/quadrature.hpp"

namespace degenkernel {

namespace {

constexpr int kNodes = 60;
constexpr int kWindow = 10;
constexpr double kRatio = 0.999;
constexpr double kBlowup = 1e8;
constexpr int kInnerOrder = 20;

// inc[j] is the integral over the cell [x_j, x_{j-1}]; inc[0] = 0
LimitVerdict judge(const std::vector<double>& inc) {
  LimitVerdict v;
  const int J = static_cast<int>(inc.size()) - 1;
  std::vector<double> partial(J + 1, 0.0);
  for (int j = 1; j <= J; ++j) partial[j] = partial[j - 1] + inc[j];
  v.nodes = J;
  v.value = partial[J];
  for (double p : partial) {
    if (!std::isfinite(p)) {
      v.status = Finiteness::infinite;
      v.value = HUGE_VAL;
      v.evidence = "partial sum overflowed";
      return v;
    }
  }
  if (std::fabs(partial[J]) > kBlowup) {
    v.status = Finiteness::infinite;
    v.evidence = "partial sum exceeds 1e8 at node " + std::to_string(J);
    return v;
  }
  if (std::all_of(inc.end() - kWindow - 1, inc.end(), [](double d) { return d == 0.0; })) {
    v.status = Finiteness::finite;
    v.evidence = "increments vanish";
    return v;
  }
  bool all_slow = true;
  bool all_fast = true;
  for (int j = J - kWindow + 1; j <= J; ++j) {
    const double r = inc[j - 1] != 0.0 ? inc[j] / inc[j - 1] : HUGE_VAL;
    if (!(r >= kRatio)) all_slow = false;
    if (!(std::fabs(r) < kRatio)) all_fast = false;
  }
  v.last_ratio = inc[J - 1] != 0.0 ? inc[J] / inc[J - 1] : HUGE_VAL;
  if (all_slow) {
    v.status = Finiteness::infinite;
    v.evidence = "increments fail to decay (ratio " + std::to_string(v.last_ratio) + ") over the last 10 nodes";
  } else if (all_fast) {
    v.status = Finiteness::finite;
    const double r = v.last_ratio;
    v.value = partial[J] + inc[J] * r / (1.0 - r);
    v.evidence = "increments decay geometrically (ratio " + std::to_string(r) + ")";
  } else {
    v.status = Finiteness::indeterminate;
    v.evidence = "increments neither decay nor persist over the last 10 nodes";
  }
  return v;
}

}  // namespace

std::string to_string(Finiteness f) {
  switch (f) {
    case Finiteness::finite:
      return "finite";
    case Finiteness::infinite:
      return "infinite";
    case Finiteness::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

ClassificationReport classify(const Coefficients& coeffs, double x0) {
  if (!(x0 > 0.0)) throw DomainError("anchor point x0 must be positive");
  const RealFn& a = coeffs.a;
  const RealFn& b = coeffs.b;
  for (int j = 0; j <= kNodes; ++j) {
    const double x = std::ldexp(x0, -j);
    if (!(a(x) > 0.0)) throw DomainError("a must be positive on (0, x0]; fails at x = " + std::to_string(x));
  }
  bool driftless = true;
  for (int j = 0; j <= kNodes && driftless; ++j) {
    driftless = b(std::ldexp(x0, -j)) == 0.0 && b(0.75 * std::ldexp(x0, -j)) == 0.0;
  }

  auto b_over_a = [&](double u) { return b(u) / a(u); };

  // cumulative values at the node hi = x_j of the current cell
  double LS = 0.0, Sd = 0.0, Md = 0.0;
  // per-cell increments
  std::vector<double> pS{0.0}, pM{0.0}, pSig{0.0}, pN{0.0};
  for (int j = 0; j < kNodes; ++j) {
    const double hi = std::ldexp(x0, -j);
    const double lo = 0.5 * hi;
    auto log_s = [&](double u) {
      return driftless ? 0.0 : LS + integrate_fixed(b_over_a, u, hi, 1, kInnerOrder);
    };
    auto s = [&](double u) { return std::exp(log_s(u)); };
    auto speed = [&](double u) { return 1.0 / (2.0 * a(u) * s(u)); };
    auto Md_at = [&](double u) { return Md + integrate_fixed(speed, u, hi, 1, kInnerOrder); };
    auto Sd_at = [&](double u) { return Sd + integrate_fixed(s, u, hi, 1, kInnerOrder); };

    const auto dS = integrate(s, lo, hi, 1e-300, 1e-11);
    const auto dM = integrate(speed, lo, hi, 1e-300, 1e-11);
    const auto dSig = integrate([&](double u) { return Md_at(u) * s(u); }, lo, hi, 1e-300, 1e-10);
    const auto dN = integrate([&](double u) { return Sd_at(u) * speed(u); }, lo, hi, 1e-300, 1e-10);

    if (!driftless) LS += integrate(b_over_a, lo, hi, 1e-300, 1e-12).value;
    Sd += dS.value;
    Md += dM.value;
    pS.push_back(dS.value);
    pM.push_back(dM.value);
    pSig.push_back(dSig.value);
    pN.push_back(dN.value);
  }

  ClassificationReport rep;
  rep.x0 = x0;
  rep.S0 = judge(pS);
  rep.M0 = judge(pM);
  rep.Sigma = judge(pSig);
  rep.N = judge(pN);
  const auto sig = rep.Sigma.status;
  const auto n = rep.N.status;
  using F = Finiteness;
  if (sig == F::indeterminate || n == F::indeterminate) {
    rep.boundary_type = "indeterminate";
    rep.note = "partial sums neither stabilize nor clearly diverge within 60 nodes";
  } else if (sig == F::finite && n == F::finite) {
    rep.boundary_type = "regular";
  } else if (sig == F::finite) {
    rep.boundary_type = "exit";
  } else if (n == F::finite) {
    rep.boundary_type = "entrance";
    rep.note = "classification only, kernel construction unsupported";
  } else {
    rep.boundary_type = "natural";
  }
  return rep;
}

}  // namespace degenkernel
