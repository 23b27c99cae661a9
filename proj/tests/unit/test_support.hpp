#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "sspde/symbolic_ifs.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline std::shared_ptr<const sspde::Partition> uniform(int k, int m) {
  return std::make_shared<const sspde::Partition>(sspde::Partition::uniform(k, m));
}

// Composite midpoint sum of f over [a, b] with n panels.
inline double riemann(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

// Midpoint sums at n and 2n panels combined to cancel the leading h^2 term.
inline double riemann_extrapolated(const std::function<double(double)>& f, double a, double b, int n) {
  return (4.0 * riemann(f, a, b, 2 * n) - riemann(f, a, b, n)) / 3.0;
}

// Tensor midpoint sum over [a0,b0] x [a1,b1].
inline double riemann2(const std::function<double(double, double)>& f, double a0, double b0, double a1, double b1,
                       int n) {
  const double h0 = (b0 - a0) / n, h1 = (b1 - a1) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s += f(a0 + (i + 0.5) * h0, a1 + (j + 0.5) * h1);
  }
  return s * h0 * h1;
}

}  // namespace testing
