#include "sspde/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "sspde/csv_io.hpp"

namespace sspde {

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ValidationError("fit_rate needs at least 2 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [scale, error] : points) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("fit_rate: scales must be positive and finite");
    if (!(error > 0.0) || !std::isfinite(error)) throw ValidationError("fit_rate: errors must be positive and finite");
    sx += std::log(scale);
    sy += std::log(error);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [scale, error] : points) {
    const double dx = std::log(scale) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(error) - my);
  }
  if (!(sxx > 1e-24)) throw ValidationError("fit_rate: all scales coincide");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [scale, error] : points) {
    const double r = std::log(error) - (fit.intercept + fit.slope * std::log(scale));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

std::string_view to_string(EpsilonRule rule) {
  switch (rule) {
    case EpsilonRule::explicit_list: return "explicit";
    case EpsilonRule::balanced_linear: return "balanced_linear";
    case EpsilonRule::balanced_half: return "balanced_half";
  }
  return "?";
}

EpsilonRule parse_epsilon_rule(std::string_view name) {
  for (auto r : {EpsilonRule::explicit_list, EpsilonRule::balanced_linear, EpsilonRule::balanced_half}) {
    if (to_string(r) == name) return r;
  }
  throw ValidationError("unknown epsilon rule '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  problem.validate();
  if (levels.empty()) throw ValidationError("sweep needs at least one level");
  for (int m : levels) {
    if (m < 0) throw ValidationError("levels must be >= 0");
  }
  if (k < 2) throw ValidationError("k must be >= 2");
  if (rule == EpsilonRule::explicit_list) {
    if (epsilons.empty()) throw ValidationError("sweep needs epsilons or a balanced rule");
  } else {
    if (!epsilons.empty()) throw ValidationError("a balanced rule and an explicit epsilon list are mutually exclusive");
    if (!(rule_constant > 0.0)) throw ValidationError("balanced rule constant must be > 0");
  }
  for (double e : epsilons) {
    if (!(e > 0.0)) throw ValidationError("epsilons must be > 0");
  }
  for (double t : sample_times) {
    if (!(t > 0.0 && t <= problem.horizon)) throw ValidationError("sample times must lie in (0, T]");
  }
  if (!(dt_cap > 0.0)) throw ValidationError("dt must be > 0");
  if (reference == ErrorReference::surrogate) {
    for (int m : levels) {
      if (m > surrogate_level) throw ValidationError("surrogate level must be >= every sweep level");
    }
  }
  const auto parity = kernel.parity();
  switch (problem.kind) {
    case ReferenceKind::heat:
      if (parity != KernelParity::even) throw ValidationError("heat sweeps need an even kernel");
      break;
    case ReferenceKind::transport:
      if (parity != KernelParity::odd) throw ValidationError("transport sweeps need an odd kernel");
      break;
    case ReferenceKind::burgers_smooth:
      if (parity == KernelParity::even) throw ValidationError("Burgers sweeps need an odd or one-sided kernel");
      break;
  }
}

std::vector<std::pair<int, double>> SweepSpec::configurations() const {
  std::vector<std::pair<int, double>> out;
  for (int m : levels) {
    switch (rule) {
      case EpsilonRule::explicit_list:
        for (double e : epsilons) out.emplace_back(m, e);
        break;
      case EpsilonRule::balanced_linear:
        out.emplace_back(m, rule_constant * std::pow(double(k), -m));
        break;
      case EpsilonRule::balanced_half:
        out.emplace_back(m, rule_constant * std::pow(double(k), -0.5 * m));
        break;
    }
  }
  return out;
}

double ErrorReport::mean_reduction_factor() const {
  if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double first = rows.front().error, last = rows.back().error;
  if (!(first > 0.0 && last > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(first / last, 1.0 / double(rows.size() - 1));
}

bool ErrorReport::strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].error < rows[i - 1].error)) return false;
  }
  return true;
}

bool ErrorReport::nonincreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].error <= rows[i - 1].error)) return false;
  }
  return true;
}

IpsSystem build_system(const ReferenceProblem& problem, const KernelFamily& kernel,
                       std::shared_ptr<const Partition> partition, double epsilon) {
  const KernelFamily scaled = kernel.with_epsilon(epsilon);
  IpsSystem system;
  WeightOptions options;
  options.boundary = Boundary::periodic;
  switch (problem.kind) {
    case ReferenceKind::heat:
      options.mode = WeightMode::heat;
      options.kappa = problem.kappa;
      system.kind = SystemKind::heat;
      break;
    case ReferenceKind::transport:
      options.mode = WeightMode::transport;
      system.kind = SystemKind::transport;
      system.coefficients = cell_averages(problem.speed, partition).values;
      break;
    case ReferenceKind::burgers_smooth:
      if (scaled.parity() == KernelParity::one_sided) {
        options.mode = WeightMode::upwind;
        system.kind = SystemKind::burgers_upwind;
      } else {
        options.mode = WeightMode::transport;
        system.kind = SystemKind::burgers_centered;
      }
      break;
  }
  system.weights = std::make_shared<const WeightMatrix>(averaged_weights(scaled, partition, options));
  return system;
}

namespace {

std::vector<double> effective_times(const std::vector<double>& requested, double horizon) {
  if (requested.empty()) return {horizon};
  return requested;
}

bool all_negligible(const ErrorReport& report) {
  for (const auto& row : report.rows) {
    if (row.error > 1e-14) return false;
  }
  return !report.rows.empty();
}

void finish_report(ErrorReport& report, double q) {
  report.exact = all_negligible(report);
  std::vector<std::pair<double, double>> points;
  for (const auto& row : report.rows) {
    double scale = row.epsilon;
    if (report.scale_name == "k^-m") scale = 1.0 / double(row.cells);
    if (report.scale_name == "q^m") scale = std::pow(q, row.m);
    if (row.error > 0.0) points.emplace_back(scale, row.error);
  }
  if (!report.exact && points.size() >= 2) {
    try {
      report.fit = fit_rate(points);
    } catch (const ValidationError&) {
      report.fit.reset();
    }
  }
  report.checks.emplace_back("strictly_decreasing", report.strictly_decreasing());
  report.checks.emplace_back("nonincreasing", report.nonincreasing());
  report.checks.emplace_back("complete", report.failures.empty());
}

// Step state on a coarse partition compared against a finer one by lifting to the fine cells.
double lifted_distance(std::span<const double> coarse, std::span<const double> fine, std::span<const double> fine_nu,
                       std::size_t block) {
  double s = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double d = coarse[i / block] - fine[i];
    s += d * d * fine_nu[i];
  }
  return std::sqrt(s);
}

}  // namespace

ErrorReport run_two_scale(const SweepSpec& spec) {
  spec.validate();
  const auto configs = spec.configurations();
  ErrorReport report;
  report.name = "two_scale_" + std::string(to_string(spec.problem.kind));
  std::set<int> distinct_levels(spec.levels.begin(), spec.levels.end());
  report.scale_name = distinct_levels.size() == 1 ? "epsilon" : "k^-m";
  const auto times = effective_times(spec.sample_times, spec.problem.horizon);

  struct Outcome {
    std::optional<ErrorRow> row;
    std::string failure;
  };
  std::vector<Outcome> outcomes(configs.size());

  parallel_for(
      configs.size(),
      [&](std::size_t c) {
        const auto [m, eps] = configs[c];
        const auto start = std::chrono::steady_clock::now();
        try {
          auto partition = std::make_shared<const Partition>(Partition::uniform(spec.k, m));
          const IpsSystem system = build_system(spec.problem, spec.kernel, partition, eps);
          const StepFunction u0 = cell_averages(spec.problem.initial, partition);
          IntegrationOptions options;
          options.t_end = spec.problem.horizon;
          options.method = spec.method;
          options.c_stab = spec.c_stab;
          options.sample_times = times;
          options.dt = std::min(spec.dt_cap, stable_dt(system, u0.values, spec.c_stab));
          const Trajectory traj = integrate(system, u0, options);

          std::optional<Trajectory> fine;
          std::shared_ptr<const Partition> fine_partition;
          if (spec.reference == ErrorReference::surrogate) {
            fine_partition = std::make_shared<const Partition>(Partition::uniform(spec.k, spec.surrogate_level));
            const IpsSystem fine_system = build_system(spec.problem, spec.kernel, fine_partition, eps);
            const StepFunction fine_u0 = cell_averages(spec.problem.initial, fine_partition);
            IntegrationOptions fine_options = options;
            fine_options.dt = std::min(options.dt, stable_dt(fine_system, fine_u0.values, spec.c_stab));
            fine = integrate(fine_system, fine_u0, fine_options);
          }

          double error = 0.0;
          for (std::size_t s = 0; s < traj.times.size(); ++s) {
            const double t = traj.times[s];
            if (std::find(times.begin(), times.end(), t) == times.end()) continue;
            const StepFunction state{partition, traj.states[s]};
            double e;
            if (fine) {
              const std::size_t block = fine_partition->size() / partition->size();
              e = lifted_distance(traj.states[s], fine->states[s], fine_partition->measures(), block);
            } else {
              e = l2_error(state, spec.problem.at_time(t));
            }
            error = std::max(error, e);
          }
          ErrorRow row;
          row.m = m;
          row.epsilon = eps;
          row.cells = partition->size();
          row.dt = options.dt;
          row.error = error;
          if (spec.record_runtime) {
            row.runtime_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          }
          outcomes[c].row = row;
        } catch (const NumericalError& e) {
          outcomes[c].failure = std::string("numerical: ") + e.what();
        } catch (const ValidationError& e) {
          outcomes[c].failure = std::string("validation: ") + e.what();
        }
      },
      spec.threads);

  for (std::size_t c = 0; c < configs.size(); ++c) {
    if (outcomes[c].row) {
      report.rows.push_back(*outcomes[c].row);
    } else {
      report.failures.push_back({configs[c].first, configs[c].second, outcomes[c].failure});
    }
  }
  finish_report(report, 1.0 / spec.k);
  return report;
}

ErrorReport galerkin_sweep(const RealFunction& f, int k, std::span<const int> levels, std::optional<int> step_depth) {
  if (levels.empty()) throw ValidationError("galerkin_sweep needs at least one level");
  ErrorReport report;
  report.name = "galerkin_function";
  report.scale_name = "k^-m";
  for (int m : levels) {
    if (step_depth && m > *step_depth) throw ValidationError("levels must not exceed the step depth");
    auto partition = std::make_shared<const Partition>(Partition::uniform(k, m));
    const QuadratureRule rule =
        step_depth ? symbolic_anchor_rule(k, *step_depth - m) : gauss_legendre(kDefaultQuadratureNodes);
    const StepFunction u = cell_averages(f, partition, rule);
    ErrorRow row;
    row.m = m;
    row.cells = partition->size();
    row.error = l2_error(u, f, rule);
    report.rows.push_back(row);
  }
  finish_report(report, 1.0 / k);
  return report;
}

ErrorReport galerkin_sweep_kernel(const PlaneKernel& kernel, const IfsSpec& ifs, std::span<const int> levels,
                                  int fine_level, int depth) {
  if (levels.empty()) throw ValidationError("galerkin_sweep_kernel needs at least one level");
  const auto q = ifs.common_ratio();
  if (!q) throw ValidationError("galerkin_sweep_kernel needs a common contraction ratio");
  const StepKernel fine = fractal_kernel_averages(kernel, ifs, fine_level, depth);
  const std::size_t n = fine.partition->size();
  const auto& nu = fine.partition->measures();
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const auto cols = fine.entries.row_cols(a);
    const auto vals = fine.entries.row_values(a);
    for (std::size_t i = 0; i < cols.size(); ++i) dense[a * n + cols[i]] = vals[i];
  }

  ErrorReport report;
  report.name = "galerkin_kernel";
  report.scale_name = "q^m";
  for (int m : levels) {
    if (m > fine_level) throw ValidationError("levels must not exceed the fine level");
    const std::size_t coarse = checked_power(ifs.k, m, std::uint64_t(n));
    const std::size_t block = n / coarse;
    std::vector<double> sums(coarse * coarse, 0.0), mass(coarse, 0.0);
    for (std::size_t a = 0; a < n; ++a) mass[a / block] += nu[a];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) sums[(a / block) * coarse + b / block] += dense[a * n + b] * nu[a] * nu[b];
    }
    double err2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t A = a / block, B = b / block;
        const double d = dense[a * n + b] - sums[A * coarse + B] / (mass[A] * mass[B]);
        err2 += d * d * nu[a] * nu[b];
      }
    }
    ErrorRow row;
    row.m = m;
    row.cells = coarse;
    row.error = std::sqrt(err2);
    report.rows.push_back(row);
  }
  finish_report(report, *q);
  return report;
}

ErrorReport consistency_sweep(const KernelFamily& kernel, ConsistencyMode mode, const TrigPolynomial& u,
                              std::span<const double> epsilons, int grid_points, double kappa) {
  ErrorReport report;
  report.name = "consistency";
  report.scale_name = "epsilon";
  for (double eps : epsilons) {
    ErrorRow row;
    row.epsilon = eps;
    row.cells = static_cast<std::uint64_t>(grid_points);
    row.error = consistency_error(kernel.with_epsilon(eps), mode, u, grid_points, kappa);
    report.rows.push_back(row);
  }
  finish_report(report, 0.0);
  return report;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ErrorReport random_vs_deterministic(const RandomSweepSpec& spec) {
  if (spec.levels.empty()) throw ValidationError("random sweep needs at least one level");
  if (spec.seeds == 0) throw ValidationError("random sweep needs at least one seed");
  if (!(spec.dt > 0.0) || !(spec.horizon >= 0.0)) throw ValidationError("random sweep needs dt > 0 and T >= 0");
  ErrorReport report;
  report.name = "random_vs_deterministic";
  report.scale_name = "k^-m";
  const auto times = effective_times(spec.sample_times, spec.horizon);

  for (int m : spec.levels) {
    auto partition = std::make_shared<const Partition>(Partition::uniform(spec.k, m));
    const StepKernel probabilities = kernel_cell_averages(spec.probability, partition);
    const StepFunction u0 = cell_averages(spec.initial, partition);

    IpsSystem deterministic;
    deterministic.kind = SystemKind::generic_nonlinear;
    deterministic.weights = std::make_shared<const WeightMatrix>(weights_from_step_kernel(probabilities));
    deterministic.interaction = spec.interaction;
    deterministic.local_term = spec.local_term;

    IntegrationOptions options;
    options.t_end = spec.horizon;
    options.dt = spec.dt;
    options.sample_times = times;
    const Trajectory reference = integrate(deterministic, u0, options);

    std::vector<double> errors(spec.seeds, 0.0);
    parallel_for(
        spec.seeds,
        [&](std::size_t s) {
          const RandomGraph graph = sample_random_graph(probabilities, spec.seed + s);
          IpsSystem random = deterministic;
          random.weights = std::make_shared<const WeightMatrix>(weights_from_graph(graph, partition));
          const Trajectory traj = integrate(random, u0, options);
          double e = 0.0;
          for (std::size_t i = 0; i < traj.times.size(); ++i) {
            e = std::max(e, l2_distance(traj.states[i], reference.states[i], partition->measures()));
          }
          errors[s] = e;
        },
        spec.threads);

    ErrorRow row;
    row.m = m;
    row.cells = partition->size();
    row.dt = spec.dt;
    row.error = median(errors);
    report.rows.push_back(row);
  }
  finish_report(report, 1.0 / spec.k);
  return report;
}

void write_report_csv(std::ostream& out, const ErrorReport& report) {
  out << "m,epsilon,N,dt,error,runtime_ms\n";
  for (const auto& row : report.rows) {
    out << row.m << ',' << format_double(row.epsilon) << ',' << row.cells << ',' << format_double(row.dt) << ','
        << format_double(row.error) << ',' << format_double(row.runtime_ms) << '\n';
  }
}

void write_report_json(std::ostream& out, const ErrorReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["scale"] = report.scale_name;
  j["rows"] = report.rows.size();
  j["exact"] = report.exact;
  if (report.fit) {
    j["slope"] = report.fit->slope;
    j["intercept"] = report.fit->intercept;
    j["residual"] = report.fit->residual;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
    j["residual"] = nullptr;
  }
  const double factor = report.mean_reduction_factor();
  j["mean_reduction_factor"] = std::isfinite(factor) ? nlohmann::ordered_json(factor) : nlohmann::ordered_json();
  nlohmann::ordered_json checks = nlohmann::ordered_json::object();
  for (const auto& [name, ok] : report.checks) checks[name] = ok;
  j["checks"] = checks;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"m", f.m}, {"epsilon", f.epsilon}, {"reason", f.reason}});
  }
  j["failures"] = failures;
  out << j.dump(2) << '\n';
}

}  // namespace sspde
