// SPDX-License-Identifier: MIT
/**
 * @file numerics.hpp
 * @brief Chebyshev interpolation, Richardson-extrapolated derivatives and
 * limits. Small helpers shared by the transform and Duhamel code.
 */
#pragma once

#include <functional>
#include <vector>

namespace degenkernel {

/// Chebyshev points of the first kind on [a, b], increasing.
std::vector<double> chebyshev_nodes(int n, double a, double b);

/// Barycentric interpolant through first-kind Chebyshev points on [a, b].
/// Exact at the nodes, valid on the closed interval.
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;
  ChebyshevInterpolant(int n, double a, double b);

  const std::vector<double>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double lo() const { return a_; }
  double hi() const { return b_; }

  /// Lagrange basis values ℓ_j(x), written into `out` (size n).
  void basis(double x, double* out) const;
  /// Σ_j values[j] ℓ_j(x).
  double eval(const double* values, double x) const;

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Largest |c_k| over the top quarter of the degree n-1 Chebyshev expansion of
/// f on [a, b]; a cheap check that n points resolve f.
double chebyshev_tail(const std::function<double(double)>& f, int n, double a, double b);

/// Piecewise Chebyshev approximation of f on [lo, hi] with equal panels.
class PiecewiseChebyshev {
 public:
  PiecewiseChebyshev() = default;
  PiecewiseChebyshev(const std::function<double(double)>& f, double lo, double hi, int panels, int order);

  double operator()(double x) const;  // clamps x into [lo, hi]
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Largest |value| over all interpolation nodes.
  double max_abs_node() const;
  const std::vector<double>& node_values() const { return values_; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  int panels_ = 0;
  ChebyshevInterpolant unit_;
  std::vector<double> values_;
};

/// f'(x) by central differences at h, h/2, h/4 combined by Richardson
/// extrapolation (error O(h^6)).
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

struct LimitResult {
  double value = 0.0;
  double spread = 0.0;   // difference of the last two extrapolants
  bool converged = false;
  bool used_epsilon = false;
};

/// lim_{x→0+} f(x) from samples at x0·2^{-j}, j < depth, by a Richardson
/// table in powers of x. When the table does not settle to `tol`, falls back
/// to Wynn's epsilon algorithm on samples at x0·16^{-j}, which also removes
/// fractional powers such as x^{1/4}.
LimitResult limit_at_zero(const std::function<double(double)>& f, double x0, int depth, double tol);

}  // namespace degenkernel
