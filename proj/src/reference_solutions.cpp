#include "sspde/reference_solutions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sspde {

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::transport: return "transport";
    case ReferenceKind::heat: return "heat";
    case ReferenceKind::burgers_smooth: return "burgers_smooth";
  }
  return "?";
}

ReferenceKind parse_reference_kind(std::string_view name) {
  for (auto kind : {ReferenceKind::transport, ReferenceKind::heat, ReferenceKind::burgers_smooth}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown problem kind '" + std::string(name) + "'");
}

namespace {

double wrap(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

// One RK4 step of X' = -b(X).
double rk4_back(const TrigPolynomial& b, double x, double h) {
  const double k1 = -b(x);
  const double k2 = -b(x + 0.5 * h * k1);
  const double k3 = -b(x + 0.5 * h * k2);
  const double k4 = -b(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

double transport_exact(const TrigPolynomial& speed, const RealFunction& initial, double t, double x) {
  if (t == 0.0) return initial(x);
  if (t < 0.0) throw ValidationError("transport_exact: t must be >= 0");
  if (speed.is_constant()) return initial(wrap(x - speed.constant * t));

  constexpr double tol = 1e-12;
  double s = 0.0, pos = x;
  double h = std::min(t, 1e-2);
  std::size_t iterations = 0;
  while (s < t) {
    if (++iterations > 10'000'000) throw NumericalError("characteristic solver tolerance not met");
    h = std::min(h, t - s);
    const double full = rk4_back(speed, pos, h);
    const double half = rk4_back(speed, rk4_back(speed, pos, 0.5 * h), 0.5 * h);
    const double err = std::abs(half - full) / 15.0;
    if (err <= tol * std::max(h / t, 1e-3) || h < 1e-14) {
      if (h < 1e-14 && err > tol) throw NumericalError("characteristic solver tolerance not met");
      pos = half + (half - full) / 15.0;
      s += h;
      h *= err > 0.0 ? std::clamp(0.9 * std::pow(tol * std::max(h / t, 1e-3) / err, 0.2), 0.2, 4.0) : 4.0;
    } else {
      h *= std::clamp(0.9 * std::pow(tol * std::max(h / t, 1e-3) / err, 0.2), 0.1, 0.9);
    }
  }
  return initial(wrap(pos));
}

double heat_exact(const TrigPolynomial& initial, double kappa, double t, double x) {
  if (!(kappa > 0.0)) throw ValidationError("heat_exact: kappa must be > 0");
  double sum = initial.constant;
  for (const auto& mode : initial.modes) {
    const double w = 2.0 * std::numbers::pi * mode.n;
    const double decay = std::exp(-kappa * w * w * t);
    sum += decay * (mode.cos_coeff * std::cos(w * x) + mode.sin_coeff * std::sin(w * x));
  }
  return sum;
}

double shock_time(const TrigPolynomial& initial) {
  constexpr int samples = 1 << 12;
  double steepest = 0.0;
  for (int i = 0; i < samples; ++i) steepest = std::max(steepest, -initial.derivative(double(i) / samples, 1));
  return steepest > 0.0 ? 1.0 / steepest : std::numeric_limits<double>::infinity();
}

double burgers_smooth_exact(const TrigPolynomial& initial, double t, double x) {
  if (t == 0.0) return initial(x);
  if (t < 0.0) throw ValidationError("burgers_smooth_exact: t must be >= 0");
  const double limit = 0.9 * shock_time(initial);
  if (!(t < limit)) {
    throw ValidationError("t = " + std::to_string(t) + " is not below the shock guard " + std::to_string(limit));
  }
  if (initial.is_constant()) return initial.constant;

  // phi(u) = u - u0(x - t u) is increasing before the shock; the root lies in the range of u0.
  auto phi = [&](double u) { return u - initial(x - t * u); };
  const double spread = initial.sup_bound() - std::abs(initial.constant);
  double lo = initial.constant - spread, hi = initial.constant + spread;
  double u = initial(x);
  for (int it = 0; it < 200; ++it) {
    const double f = phi(u);
    if (f == 0.0) return u;
    (f < 0.0 ? lo : hi) = u;
    const double df = 1.0 + t * initial.derivative(x - t * u, 1);
    double next = u - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-13 * std::max(1.0, std::abs(u))) return next;
    u = next;
  }
  throw NumericalError("Newton iteration did not converge; t may be too close to the shock time", t);
}

void ReferenceProblem::validate() const {
  if (!(horizon >= 0.0)) throw ValidationError("horizon T must be >= 0");
  switch (kind) {
    case ReferenceKind::heat:
      if (!(kappa > 0.0)) throw ValidationError("heat problem needs kappa > 0");
      break;
    case ReferenceKind::burgers_smooth:
      if (!(horizon < 0.9 * shock_time(initial))) {
        throw ValidationError("Burgers horizon must stay below 0.9 times the shock time " +
                              std::to_string(shock_time(initial)));
      }
      break;
    case ReferenceKind::transport:
      break;
  }
}

double ReferenceProblem::exact(double t, double x) const {
  switch (kind) {
    case ReferenceKind::transport: return transport_exact(speed, initial, t, x);
    case ReferenceKind::heat: return heat_exact(initial, kappa, t, x);
    case ReferenceKind::burgers_smooth: return burgers_smooth_exact(initial, t, x);
  }
  return 0.0;
}

RealFunction ReferenceProblem::at_time(double t) const {
  return [problem = *this, t](double x) { return problem.exact(t, x); };
}

}  // namespace sspde
