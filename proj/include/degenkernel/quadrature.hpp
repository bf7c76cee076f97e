// SPDX-License-Identifier: MIT
/**
 * @file quadrature.hpp
 * @brief Gauss-Legendre rules and adaptive Gauss-Kronrod integration.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace degenkernel {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points (1 <= n <= 128), cached.
const GaussRule& gauss_legendre(int n);

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kKronrodWeights[7];
  double g = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double s = f(c - dx) + f(c + dx);
    k += kKronrodWeights[j] * s;
    if (j % 2 == 1) g += kGaussWeights[j / 2] * s;
  }
  return {a, b, k * h, std::fabs((k - g) * h)};
}

}  // namespace detail

/// Adaptive G7/K15 on [a, b]; bisects the panel with the largest error until
/// the summed error is below max(abs_tol, rel_tol * |I|).
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_panels = 400) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<detail::Panel> heap;
  auto first = detail::gk15(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int panels = 1;
  while (error > std::max(abs_tol, rel_tol * std::fabs(value))) {
    if (panels >= max_panels) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // re-sum to shed accumulated cancellation in the running totals
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.evaluations = 15 * (2 * panels - 1);
  return out;
}

/// Adaptive integration over consecutive sub-intervals given by `breaks`
/// (sorted). Tolerances apply to the total.
template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                            int max_panels = 400) {
  QuadResult out;
  const std::size_t n = breaks.size();
  if (n < 2) return out;
  const double share = abs_tol / static_cast<double>(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto r = integrate(f, breaks[i], breaks[i + 1], share, rel_tol, max_panels);
    out.value += r.value;
    out.error += r.error;
    out.converged = out.converged && r.converged;
    out.evaluations += r.evaluations;
  }
  return out;
}

/// Fixed composite Gauss-Legendre rule: `panels` equal panels of `order` nodes.
template <class F>
double integrate_fixed(F&& f, double a, double b, int panels, int order) {
  const auto& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double c = lo + 0.5 * width;
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += rule.weights[i] * f(c + 0.5 * width * rule.nodes[i]);
    sum += 0.5 * width * s;
  }
  return sum;
}

}  // namespace degenkernel
