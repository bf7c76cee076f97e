// SPDX-License-Identifier: MIT
#include "degenkernel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "degenkernel/error.hpp"

namespace degenkernel {

std::vector<double> chebyshev_nodes(int n, double a, double b) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) {
    // reversed so the nodes increase
    const double c = -std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
    x[j] = 0.5 * (a + b) + 0.5 * (b - a) * c;
  }
  return x;
}

ChebyshevInterpolant::ChebyshevInterpolant(int n, double a, double b)
    : a_(a), b_(b), nodes_(chebyshev_nodes(n, a, b)), weights_(n) {
  for (int j = 0; j < n; ++j) {
    const double s = std::sin((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
    weights_[j] = (j % 2 == 0 ? 1.0 : -1.0) * s;
  }
}

void ChebyshevInterpolant::basis(double x, double* out) const {
  const int n = size();
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dx = x - nodes_[j];
    if (dx == 0.0) {
      std::fill(out, out + n, 0.0);
      out[j] = 1.0;
      return;
    }
    out[j] = weights_[j] / dx;
    den += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= den;
}

double chebyshev_tail(const std::function<double(double)>& f, int n, double a, double b) {
  // first-kind points in the order used by the cosine transform
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) {
    const double x = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
    v[j] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
  }
  double tail = 0.0;
  for (int k = n - n / 4; k < n; ++k) {
    double c = 0.0;
    for (int j = 0; j < n; ++j) c += v[j] * std::cos(k * (2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
    tail = std::max(tail, std::fabs(2.0 * c / n));
  }
  return tail;
}

double ChebyshevInterpolant::eval(const double* values, double x) const {
  const int n = size();
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dx = x - nodes_[j];
    if (dx == 0.0) return values[j];
    const double c = weights_[j] / dx;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

PiecewiseChebyshev::PiecewiseChebyshev(const std::function<double(double)>& f, double lo, double hi, int panels,
                                       int order)
    : lo_(lo), hi_(hi), panels_(panels), unit_(order, 0.0, 1.0), values_(static_cast<std::size_t>(panels) * order) {
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < order; ++j) values_[p * order + j] = f(lo + width * (p + unit_.nodes()[j]));
  }
}

double PiecewiseChebyshev::operator()(double x) const {
  x = std::clamp(x, lo_, hi_);
  const double width = (hi_ - lo_) / panels_;
  const int p = std::min(panels_ - 1, static_cast<int>((x - lo_) / width));
  const double u = (x - lo_) / width - p;
  return unit_.eval(values_.data() + static_cast<std::size_t>(p) * unit_.size(), u);
}

double PiecewiseChebyshev::max_abs_node() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
  auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  const double d3 = central(0.25 * h);
  const double e1 = (4.0 * d2 - d1) / 3.0;
  const double e2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * e2 - e1) / 15.0;
}

LimitResult limit_at_zero(const std::function<double(double)>& f, double x0, int depth, double tol) {
  std::vector<double> raw(depth);
  for (int j = 0; j < depth; ++j) raw[j] = f(x0 * std::ldexp(1.0, -j));

  // table[j][k]: k-fold extrapolation ending at sample j
  std::vector<std::vector<double>> table(depth);
  LimitResult out;
  for (int j = 0; j < depth; ++j) {
    table[j].push_back(raw[j]);
    for (int k = 1; k <= j; ++k) {
      const double p = std::ldexp(1.0, k);
      table[j].push_back((p * table[j][k - 1] - table[j - 1][k - 1]) / (p - 1.0));
    }
  }
  const double last = table[depth - 1][depth - 1];
  const double prev = table[depth - 2][depth - 2];
  out.value = last;
  out.spread = std::fabs(last - prev);
  const double scale = std::max(1.0, std::fabs(last));
  if (out.spread < tol * scale) {
    out.converged = true;
    return out;
  }
  // Wynn epsilon: the even columns cancel one geometric error term each
  constexpr int kEpsSamples = 14;
  std::vector<double> col_prev(kEpsSamples + 1, 0.0);
  std::vector<double> col(kEpsSamples);
  for (int j = 0; j < kEpsSamples; ++j) col[j] = f(x0 * std::pow(16.0, -j));
  double best = col[kEpsSamples - 1];
  double best_spread = std::fabs(col[kEpsSamples - 1] - col[kEpsSamples - 2]);
  double last_even = best;
  for (int k = 1; static_cast<int>(col.size()) > 1; ++k) {
    std::vector<double> next(col.size() - 1);
    bool finite = true;
    for (std::size_t n = 0; n + 1 < col.size(); ++n) {
      const double diff = col[n + 1] - col[n];
      next[n] = col_prev[n + 1] + 1.0 / diff;
      finite = finite && std::isfinite(next[n]);
    }
    if (!finite) break;  // an exact or noise-level column; keep what we have
    col_prev = std::move(col);
    col = std::move(next);
    if (k % 2 == 0) {
      const double est = col.back();
      const double spread = std::fabs(est - last_even);
      if (spread < best_spread) {
        best = est;
        best_spread = spread;
      }
      last_even = est;
    }
  }
  out.used_epsilon = true;
  out.value = best;
  out.spread = best_spread;
  out.converged = best_spread < tol * std::max(1.0, std::fabs(best));
  return out;
}

}  // namespace degenkernel
