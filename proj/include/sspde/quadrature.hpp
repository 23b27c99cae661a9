#pragma once

#include <vector>

namespace sspde {

/// Quadrature rule on the reference interval [0,1]; weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Kernel averages over diagonal cells integrate the two triangles on either side of x = y
  /// separately, which keeps full accuracy for kernels with a kink along the diagonal.
  bool split_diagonal = false;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [0,1]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Midpoints of the k^depth equal subintervals, equal weights. Inside a level-m cell these are the
/// midpoints of its level-(m+depth) descendants, so a symbolic coding at depth m+depth sees each
/// descendant exactly once.
QuadratureRule symbolic_anchor_rule(int k, int depth);

/// n-point composite midpoint rule.
QuadratureRule midpoint_rule(int n);

/// Integral of f over [a,b] with `rule`.
template <class F>
double integrate(const QuadratureRule& rule, double a, double b, F&& f) {
  const double h = b - a;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(a + h * rule.nodes[i]);
  return h * sum;
}

}  // namespace sspde
