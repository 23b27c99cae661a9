#pragma once

// Convergence sweeps for the two-scale error law and log-log rate fitting.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sspde/ips_dynamics.hpp"
#include "sspde/nonlocal_kernels.hpp"
#include "sspde/reference_solutions.hpp"

namespace sspde {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the fit in log space.
  double residual = 0.0;
};

/// Ordinary least squares of log(error) against log(scale).
RateFit fit_rate(std::span<const std::pair<double, double>> points);

/// How eps is chosen per level: an explicit list (crossed with the levels), C k^{-m}, or C k^{-m/2}.
enum class EpsilonRule { explicit_list, balanced_linear, balanced_half };
std::string_view to_string(EpsilonRule rule);
EpsilonRule parse_epsilon_rule(std::string_view name);

/// Error reference: the exact local solution, or the same-eps system on a finer level.
enum class ErrorReference { exact, surrogate };

struct SweepSpec {
  ReferenceProblem problem;
  /// Base profile; its eps is replaced per configuration.
  KernelFamily kernel = KernelFamily::preset(KernelPreset::even_box, 0.25);
  int k = 2;
  std::vector<int> levels;
  std::vector<double> epsilons;
  EpsilonRule rule = EpsilonRule::explicit_list;
  double rule_constant = 1.0;
  /// Error is the sup over these times; empty means {T}.
  std::vector<double> sample_times;
  Integrator method = Integrator::rk4;
  /// Upper bound on dt; the stability guard may lower it further.
  double dt_cap = 1e-2;
  double c_stab = 0.5;
  ErrorReference reference = ErrorReference::exact;
  int surrogate_level = 0;
  std::size_t threads = 1;
  /// Wall-clock timings make reports non-reproducible, so they are off unless requested.
  bool record_runtime = false;

  void validate() const;
  /// (m, eps) pairs in report order.
  std::vector<std::pair<int, double>> configurations() const;
};

struct ErrorRow {
  int m = 0;
  double epsilon = 0.0;
  std::uint64_t cells = 0;
  double dt = 0.0;
  double error = 0.0;
  double runtime_ms = 0.0;
};

struct FailedRow {
  int m = 0;
  double epsilon = 0.0;
  std::string reason;
};

struct ErrorReport {
  std::string name;
  /// What the fit is taken against: "epsilon", "k^-m", or "q^m".
  std::string scale_name = "epsilon";
  std::vector<ErrorRow> rows;
  std::vector<FailedRow> failures;
  std::optional<RateFit> fit;
  /// All errors vanish (to rounding); no slope is defined.
  bool exact = false;
  std::vector<std::pair<std::string, bool>> checks;

  /// Geometric mean of error(i) / error(i+1) over consecutive rows.
  double mean_reduction_factor() const;
  bool strictly_decreasing() const;
  bool nonincreasing() const;
};

/// Builds the particle system of `problem` on `partition` for the kernel at scale eps.
IpsSystem build_system(const ReferenceProblem& problem, const KernelFamily& kernel,
                       std::shared_ptr<const Partition> partition, double epsilon);

/// One row per configuration: sup over sample times of the L2 error of the IPS state.
ErrorReport run_two_scale(const SweepSpec& spec);

/// Projection errors ||f - P_m f|| per level with the rate fitted against k^{-m}. A set `step_depth`
/// treats f as a step function at that level and uses exact symbolic quadrature.
ErrorReport galerkin_sweep(const RealFunction& f, int k, std::span<const int> levels,
                           std::optional<int> step_depth = std::nullopt);

/// Kernel variant: fine symbolic pair averages of J at `fine_level` projected onto each coarser
/// level; error in L2(nu x nu), rate fitted against q^m.
ErrorReport galerkin_sweep_kernel(const PlaneKernel& kernel, const IfsSpec& ifs, std::span<const int> levels,
                                  int fine_level, int depth = 0);

/// consistency_error over a list of eps with the rate fitted against eps.
ErrorReport consistency_sweep(const KernelFamily& kernel, ConsistencyMode mode, const TrigPolynomial& u,
                              std::span<const double> epsilons, int grid_points, double kappa = 1.0);

struct RandomSweepSpec {
  int k = 2;
  std::vector<int> levels;
  /// Probability kernel W(x, y) with values in [0, 1].
  KernelFunction probability = [](double x, double y) { return 0.5 * (1.0 + x * y); };
  Interaction interaction = [](double a, double b) { return b - a; };
  LocalTerm local_term;
  RealFunction initial = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
  double horizon = 1.0;
  double dt = 1e-2;
  std::vector<double> sample_times;
  std::size_t seeds = 20;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// Per level: median over seeds of the sup-time l2(nu) distance between the xi-graph and the
/// W-weighted systems.
ErrorReport random_vs_deterministic(const RandomSweepSpec& spec);

/// CSV schema: m,epsilon,N,dt,error,runtime_ms
void write_report_csv(std::ostream& out, const ErrorReport& report);
/// Slope, intercept, residual, check flags, and failed configurations.
void write_report_json(std::ostream& out, const ErrorReport& report);

}  // namespace sspde
