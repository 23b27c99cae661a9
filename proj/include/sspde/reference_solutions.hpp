#pragma once

// Exact or high-accuracy solutions of the local reference equations on the torus.

#include <memory>
#include <string_view>

#include "sspde/transport_map.hpp"
#include "sspde/trig_polynomial.hpp"

namespace sspde {

enum class ReferenceKind { transport, heat, burgers_smooth };
std::string_view to_string(ReferenceKind kind);
ReferenceKind parse_reference_kind(std::string_view name);

/// Characteristic solution of u_t + b(x) u_x = 0 at (t, x): u0(X(-t; x)).
/// Constant b is evaluated as u0(x - b t mod 1); otherwise the backward flow is integrated with
/// step-doubling RK4 to an absolute tolerance of 1e-12.
double transport_exact(const TrigPolynomial& speed, const RealFunction& initial, double t, double x);

/// u_t = kappa u_xx: each mode decays by exp(-kappa (2 pi n)^2 t).
double heat_exact(const TrigPolynomial& initial, double kappa, double t, double x);

/// 1 / max(-u0') from 2^12 samples; +inf when u0 is nondecreasing.
double shock_time(const TrigPolynomial& initial);

/// Pre-shock inviscid Burgers: the root of u = u0(x - t u) by safeguarded Newton (tolerance 1e-13).
/// Throws ValidationError unless t < 0.9 * shock_time(u0).
double burgers_smooth_exact(const TrigPolynomial& initial, double t, double x);

struct ReferenceProblem {
  ReferenceKind kind = ReferenceKind::heat;
  TrigPolynomial initial;
  /// Transport speed b(x).
  TrigPolynomial speed = TrigPolynomial::constant_value(1.0);
  double kappa = 1.0;
  double horizon = 1.0;

  void validate() const;
  double exact(double t, double x) const;
  RealFunction at_time(double t) const;
};

}  // namespace sspde
