#pragma once

#include <algorithm>
#include <cmath>

#include "sspde/quadrature.hpp"

namespace sspde {
namespace detail {

/// Gauss-Legendre rules with 1..32 nodes, built once.
const QuadratureRule& cached_gauss_legendre(int n);

}  // namespace detail

template <class Weight>
double KernelFamily::integrate_shifted(double shift, double lo, double hi, std::vector<double> breaks, Weight&& weight,
                                       int weight_degree) const {
  if (!(hi > lo)) return 0.0;
  breaks.push_back(lo);
  breaks.push_back(hi);
  for (const auto& piece : pieces_) {
    breaks.push_back(piece.lo - shift);
    breaks.push_back(piece.hi - shift);
  }
  std::erase_if(breaks, [&](double t) { return t < lo || t > hi; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double t0 = breaks[i], t1 = breaks[i + 1];
    const double z_mid = shift + 0.5 * (t0 + t1);
    for (const auto& piece : pieces_) {
      if (!(z_mid > piece.lo && z_mid < piece.hi)) continue;
      const int degree = static_cast<int>(piece.coeffs.size()) - 1 + weight_degree;
      const auto& rule = detail::cached_gauss_legendre(std::max(1, degree / 2 + 1));
      const double h = t1 - t0;
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = t0 + h * rule.nodes[q];
        sum += rule.weights[q] * piece(shift + t) * weight(t);
      }
      total += h * sum;
      break;
    }
  }
  return total;
}

}  // namespace sspde
