// SPDX-License-Identifier: MIT
#include "degenkernel/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace degenkernel {
namespace {

constexpr int kMaxRule = 128;

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> v(kMaxRule + 1);
    for (int k = 1; k <= kMaxRule; ++k) v[k] = build_rule(k);
    return v;
  }();
  if (n < 1 || n > kMaxRule) throw std::out_of_range("gauss_legendre: unsupported order");
  return rules[n];
}

}  // namespace degenkernel
