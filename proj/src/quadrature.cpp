#include "sspde/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "sspde/common.hpp"

namespace sspde {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n from the Chebyshev-like initial guess; roots are symmetric.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - z);
    rule.nodes[hi] = 0.5 * (1.0 + z);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
  rule.split_diagonal = true;
  return rule;
}

QuadratureRule symbolic_anchor_rule(int k, int depth) {
  const auto m = checked_power(k, depth, std::uint64_t{1} << 26);
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.assign(m, 1.0 / static_cast<double>(m));
  for (std::uint64_t j = 0; j < m; ++j) rule.nodes[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
  return rule;
}

QuadratureRule midpoint_rule(int n) {
  if (n < 1) throw ValidationError("midpoint rule needs at least one node");
  QuadratureRule rule;
  rule.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
  for (int j = 0; j < n; ++j) rule.nodes.push_back((j + 0.5) / n);
  return rule;
}

}  // namespace sspde
