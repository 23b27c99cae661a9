#pragma once

// Right-hand sides of the self-similar particle systems, the W-random graph, explicit time
// integration, and conserved-quantity audits.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sspde/nonlocal_kernels.hpp"
#include "sspde/transport_map.hpp"

namespace sspde {

enum class SystemKind { linear, transport, burgers_centered, burgers_upwind, heat, generic_nonlinear };
std::string_view to_string(SystemKind kind);
SystemKind parse_system_kind(std::string_view name);

using LocalTerm = std::function<double(double t, double u)>;
using Interaction = std::function<double(double own, double other)>;

/// Box applied to both arguments of the interaction before evaluation.
struct Saturation {
  double lo = -1.0;
  double hi = 1.0;
};

struct IpsSystem {
  SystemKind kind = SystemKind::linear;
  std::shared_ptr<const WeightMatrix> weights;
  /// Per-cell transport speeds b_w.
  std::vector<double> coefficients;
  LocalTerm local_term;
  Interaction interaction;
  std::optional<Saturation> saturation;

  std::size_t size() const { return weights ? weights->size() : 0; }
  /// Dimension and parity checks: heat weights symmetric, transport and centered Burgers weights
  /// antisymmetric, coefficient vector present where required.
  void validate() const;
};

/// (L u)_w = sum_v sigma_wv u_v nu(K_v).
std::vector<double> rhs_linear(const WeightMatrix& weights, std::span<const double> u);
/// du_w = -b_w sum_v eta_wv u_v nu(K_v).
std::vector<double> rhs_transport(const WeightMatrix& weights, std::span<const double> b, std::span<const double> u);
/// du_w = -sum_v eta_wv (F(u_w) - F(u_v)) nu(K_v), F(s) = s^2/2.
std::vector<double> rhs_burgers_centered(const WeightMatrix& weights, std::span<const double> u);
/// du_w = -[sum_v a_wv g(u_w, u_v) - sum_v a_vw g(u_v, u_w)] with the oriented upwind coefficients.
std::vector<double> rhs_burgers_upwind(const WeightMatrix& weights, std::span<const double> u);
/// du_w = sum_v rho_wv (u_v - u_w) nu(K_v) - prefactor alpha_w u_w.
std::vector<double> rhs_heat(const WeightMatrix& weights, std::span<const double> u);
/// du_w = F(t, u_w) + sum_v W_wv D(u_w, u_v) nu(K_v).
std::vector<double> rhs_generic(const WeightMatrix& weights, const LocalTerm& local, const Interaction& interaction,
                                double t, std::span<const double> u,
                                std::optional<Saturation> saturation = std::nullopt);

/// Dispatches on system.kind; `out` must have the state length.
void evaluate_rhs(const IpsSystem& system, double t, std::span<const double> u, std::span<double> out);

/// Wraps a step kernel (entries interpreted as sigma_wv) as generic linear weights.
WeightMatrix weights_from_step_kernel(const StepKernel& kernel);

/// Adjacency xi_wv of a W-random graph.
struct RandomGraph {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> adjacency;
  std::vector<double> probabilities;

  bool at(std::size_t w, std::size_t v) const { return adjacency[w * n + v] != 0; }
  std::size_t edge_count() const;
};

/// Uniform draw in [0,1) from a counter-based stream keyed by (seed, w, v).
double edge_uniform(std::uint64_t seed, std::uint64_t w, std::uint64_t v);

/// Independent Bernoulli(p_wv) edges, p_wv the kernel cell averages (must lie in [0,1]).
RandomGraph sample_random_graph(const StepKernel& probabilities, std::uint64_t seed);
/// The adjacency as generic linear weights (ones stored, zeros pruned).
WeightMatrix weights_from_graph(const RandomGraph& graph, std::shared_ptr<const Partition> partition);

enum class Integrator { euler, rk4 };
Integrator parse_integrator(std::string_view name);
std::string_view to_string(Integrator method);

struct IntegrationOptions {
  double t_end = 1.0;
  /// Largest step; each segment between sample times uses equal steps no longer than this.
  double dt = 1e-3;
  Integrator method = Integrator::rk4;
  /// Times at which states are stored (t = 0 and t_end are always stored).
  std::vector<double> sample_times;
  double c_stab = 0.5;
  bool enforce_stability = true;
};

/// Largest dt allowed by the stability guard for `system` started from `u0`:
///   heat:           c_stab / max_w (sum_v rho_wv nu(K_v) + prefactor alpha_w)
///                   (= c_stab m2 eps^2 / (2 kappa max raw row sum))
///   transport:      c_stab eps / ||b||_inf
///   Burgers:        c_stab eps / ||u0||_inf
///   linear/generic: c_stab / max_w sum_v |sigma_wv| nu(K_v)
double stable_dt(const IpsSystem& system, std::span<const double> u0, double c_stab);

struct AuditPoint {
  double time = 0.0;
  double mass = 0.0;    // sum u_w nu(K_w)
  double energy = 0.0;  // sum u_w^2 nu(K_w)
  double min_value = 0.0;
  double max_value = 0.0;
};

struct Trajectory {
  std::shared_ptr<const Partition> partition;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  /// One audit per step, starting with t = 0.
  std::vector<AuditPoint> audits;
  std::size_t steps = 0;
  double dt_max = 0.0;
  Integrator method = Integrator::rk4;
};

struct AuditSummary {
  double initial_mass = 0.0;
  double mass_drift = 0.0;           // max_t |M(t) - M(0)|
  double relative_mass_drift = 0.0;  // mass_drift / max(|M(0)|, tiny)
  std::size_t energy_increases = 0;  // steps whose energy rose by more than the slack
  double max_energy_increase = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::size_t steps = 0;
};

Trajectory integrate(const IpsSystem& system, const StepFunction& u0, const IntegrationOptions& options);
AuditSummary summarize(const Trajectory& trajectory, double energy_slack = 1e-12);

/// CSV schema: time,word,value
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// Reads a trajectory CSV back; `partition` supplies the word order.
Trajectory read_trajectory_csv(std::istream& in, std::shared_ptr<const Partition> partition);
/// JSON audit summary: mass drift, energy monotonicity violations, step count.
void write_audit_json(std::ostream& out, const AuditSummary& summary, const Trajectory& trajectory);

}  // namespace sspde
