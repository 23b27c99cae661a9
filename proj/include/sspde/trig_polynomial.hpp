#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace sspde {

/// One Fourier mode a cos(2 pi n x) + b sin(2 pi n x).
struct FourierMode {
  int n = 1;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// Periodic trigonometric polynomial c + sum_n (a_n cos 2 pi n x + b_n sin 2 pi n x) on the torus.
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<FourierMode> modes;

  static TrigPolynomial constant_value(double c) { return {c, {}}; }
  static TrigPolynomial sine(int n, double amplitude = 1.0, double offset = 0.0) {
    return {offset, {FourierMode{n, 0.0, amplitude}}};
  }
  static TrigPolynomial cosine(int n, double amplitude = 1.0, double offset = 0.0) {
    return {offset, {FourierMode{n, amplitude, 0.0}}};
  }

  bool is_constant() const {
    for (const auto& mode : modes) {
      if (mode.cos_coeff != 0.0 || mode.sin_coeff != 0.0) return false;
    }
    return true;
  }

  /// order-th derivative at x.
  double derivative(double x, int order) const {
    double sum = order == 0 ? constant : 0.0;
    for (const auto& mode : modes) {
      const double w = 2.0 * std::numbers::pi * mode.n;
      const double phase = w * x;
      const double c = std::cos(phase), s = std::sin(phase);
      // d^j/dx^j of (a cos + b sin) cycles with period 4.
      double a = mode.cos_coeff, b = mode.sin_coeff;
      for (int j = 0; j < order; ++j) {
        const double na = w * b;
        const double nb = -w * a;
        a = na;
        b = nb;
      }
      sum += a * c + b * s;
    }
    return sum;
  }

  double operator()(double x) const { return derivative(x, 0); }

  /// Mean over one period.
  double mean() const { return constant; }

  /// Bound on |u'| from the coefficients.
  double derivative_bound() const {
    double bound = 0.0;
    for (const auto& mode : modes) bound += 2.0 * std::numbers::pi * std::abs(mode.n) * std::hypot(mode.cos_coeff, mode.sin_coeff);
    return bound;
  }
  double sup_bound() const {
    double bound = std::abs(constant);
    for (const auto& mode : modes) bound += std::hypot(mode.cos_coeff, mode.sin_coeff);
    return bound;
  }
};

}  // namespace sspde
