#include "sspde/ips_dynamics.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "sspde/csv_io.hpp"

namespace sspde {

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::linear: return "linear";
    case SystemKind::transport: return "transport";
    case SystemKind::burgers_centered: return "burgers_centered";
    case SystemKind::burgers_upwind: return "burgers_upwind";
    case SystemKind::heat: return "heat";
    case SystemKind::generic_nonlinear: return "generic_nonlinear";
  }
  return "?";
}

SystemKind parse_system_kind(std::string_view name) {
  for (auto kind : {SystemKind::linear, SystemKind::transport, SystemKind::burgers_centered, SystemKind::burgers_upwind,
                    SystemKind::heat, SystemKind::generic_nonlinear}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown system kind '" + std::string(name) + "'");
}

Integrator parse_integrator(std::string_view name) {
  if (name == "rk4") return Integrator::rk4;
  if (name == "euler") return Integrator::euler;
  throw ValidationError("unknown integrator '" + std::string(name) + "'");
}

std::string_view to_string(Integrator method) { return method == Integrator::rk4 ? "rk4" : "euler"; }

namespace {

void require_length(const WeightMatrix& weights, std::size_t n, const char* what) {
  if (weights.size() != n) {
    throw ValidationError(std::string(what) + ": state length " + std::to_string(n) + " differs from weight size " +
                          std::to_string(weights.size()));
  }
}

double burgers_flux(double s) { return 0.5 * s * s; }

void linear_into(const WeightMatrix& wm, std::span<const double> u, std::span<double> out) {
  const auto& nu = wm.measures();
  for (std::size_t w = 0; w < wm.size(); ++w) {
    const auto cols = wm.entries.row_cols(w);
    const auto vals = wm.entries.row_values(w);
    double s = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * u[cols[i]] * nu[cols[i]];
    out[w] = s;
  }
}

void transport_into(const WeightMatrix& wm, std::span<const double> b, std::span<const double> u, std::span<double> out) {
  linear_into(wm, u, out);
  for (std::size_t w = 0; w < wm.size(); ++w) out[w] = -b[w] * out[w];
}

void burgers_centered_into(const WeightMatrix& wm, std::span<const double> u, std::span<double> out) {
  const auto& nu = wm.measures();
  for (std::size_t w = 0; w < wm.size(); ++w) {
    const auto cols = wm.entries.row_cols(w);
    const auto vals = wm.entries.row_values(w);
    const double fw = burgers_flux(u[w]);
    double s = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * (fw - burgers_flux(u[cols[i]])) * nu[cols[i]];
    out[w] = -s;
  }
}

void burgers_upwind_into(const WeightMatrix& wm, std::span<const double> u, std::span<double> out) {
  const std::size_t n = wm.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    const auto cols = wm.entries.row_cols(w);
    const auto vals = wm.entries.row_values(w);
    double outgoing = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::size_t v = cols[i];
      outgoing += vals[i] * upwind_flux(u[w], u[v]);
      // a_wv g(u_w, u_v) is the incoming term of row v.
      out[v] += vals[i] * upwind_flux(u[w], u[v]);
    }
    out[w] -= outgoing;
  }
}

void heat_into(const WeightMatrix& wm, std::span<const double> u, std::span<double> out) {
  const auto& nu = wm.measures();
  for (std::size_t w = 0; w < wm.size(); ++w) {
    const auto cols = wm.entries.row_cols(w);
    const auto vals = wm.entries.row_values(w);
    double s = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * (u[cols[i]] - u[w]) * nu[cols[i]];
    if (!wm.absorption.empty()) s -= wm.prefactor * wm.absorption[w] * u[w];
    out[w] = s;
  }
}

void generic_into(const WeightMatrix& wm, const LocalTerm& local, const Interaction& interaction, double t,
                  std::span<const double> u, std::optional<Saturation> saturation, std::span<double> out) {
  const auto& nu = wm.measures();
  auto clip = [&](double x) { return saturation ? std::clamp(x, saturation->lo, saturation->hi) : x; };
  for (std::size_t w = 0; w < wm.size(); ++w) {
    double s = local ? local(t, u[w]) : 0.0;
    if (interaction) {
      const auto cols = wm.entries.row_cols(w);
      const auto vals = wm.entries.row_values(w);
      const double own = clip(u[w]);
      for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * interaction(own, clip(u[cols[i]])) * nu[cols[i]];
    }
    if (!std::isfinite(s)) throw NumericalError("non-finite right-hand side at cell " + std::to_string(w), t);
    out[w] = s;
  }
}

bool parity_holds(const WeightMatrix& wm, double sign) {
  double scale = 0.0;
  for (std::size_t w = 0; w < wm.size(); ++w) {
    for (double v : wm.entries.row_values(w)) scale = std::max(scale, std::abs(v));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (std::size_t w = 0; w < wm.size(); ++w) {
    const auto cols = wm.entries.row_cols(w);
    const auto vals = wm.entries.row_values(w);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (std::abs(vals[i] - sign * wm.entries.at(cols[i], w)) > tol) return false;
    }
  }
  return true;
}

}  // namespace

void IpsSystem::validate() const {
  if (!weights) throw ValidationError("system has no weights");
  const std::size_t n = weights->size();
  switch (kind) {
    case SystemKind::heat:
      if (!parity_holds(*weights, 1.0)) throw ValidationError("heat weights must be symmetric");
      break;
    case SystemKind::transport:
      if (coefficients.size() != n) throw ValidationError("transport system needs one coefficient b_w per cell");
      [[fallthrough]];
    case SystemKind::burgers_centered:
      if (!parity_holds(*weights, -1.0)) throw ValidationError("transport/Burgers weights must be antisymmetric");
      break;
    case SystemKind::burgers_upwind:
      if (weights->mode != WeightMode::upwind) throw ValidationError("upwind Burgers needs upwind-mode weights");
      break;
    case SystemKind::generic_nonlinear:
      if (!interaction && !local_term) throw ValidationError("generic system needs a local term or an interaction");
      break;
    case SystemKind::linear:
      break;
  }
}

std::vector<double> rhs_linear(const WeightMatrix& weights, std::span<const double> u) {
  require_length(weights, u.size(), "rhs_linear");
  std::vector<double> out(u.size());
  linear_into(weights, u, out);
  return out;
}

std::vector<double> rhs_transport(const WeightMatrix& weights, std::span<const double> b, std::span<const double> u) {
  require_length(weights, u.size(), "rhs_transport");
  if (b.size() != u.size()) throw ValidationError("rhs_transport: missing or mis-sized coefficients b_w");
  std::vector<double> out(u.size());
  transport_into(weights, b, u, out);
  return out;
}

std::vector<double> rhs_burgers_centered(const WeightMatrix& weights, std::span<const double> u) {
  require_length(weights, u.size(), "rhs_burgers_centered");
  std::vector<double> out(u.size());
  burgers_centered_into(weights, u, out);
  return out;
}

std::vector<double> rhs_burgers_upwind(const WeightMatrix& weights, std::span<const double> u) {
  require_length(weights, u.size(), "rhs_burgers_upwind");
  if (weights.mode != WeightMode::upwind) throw ValidationError("rhs_burgers_upwind needs upwind-mode weights");
  std::vector<double> out(u.size());
  burgers_upwind_into(weights, u, out);
  return out;
}

std::vector<double> rhs_heat(const WeightMatrix& weights, std::span<const double> u) {
  require_length(weights, u.size(), "rhs_heat");
  std::vector<double> out(u.size());
  heat_into(weights, u, out);
  return out;
}

std::vector<double> rhs_generic(const WeightMatrix& weights, const LocalTerm& local, const Interaction& interaction,
                                double t, std::span<const double> u, std::optional<Saturation> saturation) {
  require_length(weights, u.size(), "rhs_generic");
  std::vector<double> out(u.size());
  generic_into(weights, local, interaction, t, u, saturation, out);
  return out;
}

void evaluate_rhs(const IpsSystem& system, double t, std::span<const double> u, std::span<double> out) {
  const auto& wm = *system.weights;
  switch (system.kind) {
    case SystemKind::linear: linear_into(wm, u, out); break;
    case SystemKind::transport: transport_into(wm, system.coefficients, u, out); break;
    case SystemKind::burgers_centered: burgers_centered_into(wm, u, out); break;
    case SystemKind::burgers_upwind: burgers_upwind_into(wm, u, out); break;
    case SystemKind::heat: heat_into(wm, u, out); break;
    case SystemKind::generic_nonlinear:
      generic_into(wm, system.local_term, system.interaction, t, u, system.saturation, out);
      break;
  }
}

WeightMatrix weights_from_step_kernel(const StepKernel& kernel) {
  WeightMatrix wm;
  wm.partition = kernel.partition;
  wm.mode = WeightMode::linear_generic;
  wm.kernel_name = "step_kernel";
  wm.entries = kernel.entries;
  wm.band_halfwidth = kernel.partition->size() - 1;
  return wm;
}

std::size_t RandomGraph::edge_count() const {
  std::size_t count = 0;
  for (auto a : adjacency) count += a;
  return count;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double edge_uniform(std::uint64_t seed, std::uint64_t w, std::uint64_t v) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ w) ^ (v * 0xd1342543de82ef95ULL));
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

RandomGraph sample_random_graph(const StepKernel& probabilities, std::uint64_t seed) {
  const std::size_t n = probabilities.partition->size();
  RandomGraph graph;
  graph.n = n;
  graph.seed = seed;
  graph.adjacency.assign(n * n, 0);
  graph.probabilities.assign(n * n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    const auto cols = probabilities.entries.row_cols(w);
    const auto vals = probabilities.entries.row_values(w);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const double p = vals[i];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("edge probability " + std::to_string(p) + " outside [0,1]");
      }
      graph.probabilities[w * n + cols[i]] = p;
    }
  }
  parallel_for(n, [&](std::size_t w) {
    for (std::size_t v = 0; v < n; ++v) {
      graph.adjacency[w * n + v] = edge_uniform(seed, w, v) < graph.probabilities[w * n + v] ? 1 : 0;
    }
  });
  return graph;
}

WeightMatrix weights_from_graph(const RandomGraph& graph, std::shared_ptr<const Partition> partition) {
  if (partition->size() != graph.n) throw ValidationError("graph size differs from partition");
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(graph.n);
  for (std::size_t w = 0; w < graph.n; ++w) {
    for (std::size_t v = 0; v < graph.n; ++v) {
      if (graph.at(w, v)) rows[w].emplace_back(v, 1.0);
    }
  }
  WeightMatrix wm;
  wm.partition = std::move(partition);
  wm.mode = WeightMode::linear_generic;
  wm.kernel_name = "random_graph";
  wm.entries = SparseRows::from_rows(graph.n, std::move(rows));
  wm.band_halfwidth = graph.n - 1;
  return wm;
}

double stable_dt(const IpsSystem& system, std::span<const double> u0, double c_stab) {
  const auto& wm = *system.weights;
  auto sup = [](std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  constexpr double kUnbounded = std::numeric_limits<double>::infinity();
  switch (system.kind) {
    case SystemKind::transport: {
      const double b = sup(system.coefficients);
      return b > 0.0 ? c_stab * wm.epsilon / b : kUnbounded;
    }
    case SystemKind::burgers_centered:
    case SystemKind::burgers_upwind: {
      const double speed = sup(u0);
      return speed > 0.0 ? c_stab * wm.epsilon / speed : kUnbounded;
    }
    case SystemKind::heat:
    case SystemKind::linear:
    case SystemKind::generic_nonlinear: {
      const double bound = wm.operator_norm_bound();
      return bound > 0.0 ? c_stab / bound : kUnbounded;
    }
  }
  return kUnbounded;
}

namespace {

AuditPoint audit(double t, std::span<const double> u, std::span<const double> nu) {
  AuditPoint a;
  a.time = t;
  a.min_value = std::numeric_limits<double>::infinity();
  a.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < u.size(); ++w) {
    a.mass += u[w] * nu[w];
    a.energy += u[w] * u[w] * nu[w];
    a.min_value = std::min(a.min_value, u[w]);
    a.max_value = std::max(a.max_value, u[w]);
  }
  return a;
}

}  // namespace

Trajectory integrate(const IpsSystem& system, const StepFunction& u0, const IntegrationOptions& options) {
  system.validate();
  const std::size_t n = system.size();
  if (u0.size() != n) throw ValidationError("initial state length differs from the system size");
  if (!(options.dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(options.t_end >= 0.0)) throw ValidationError("t_end must be >= 0");
  if (options.enforce_stability) {
    const double limit = stable_dt(system, u0.values, options.c_stab);
    if (options.dt > limit) {
      throw ValidationError("dt = " + format_double(options.dt) + " exceeds the stability guard " + format_double(limit));
    }
  }

  std::vector<double> targets;
  for (double t : options.sample_times) {
    if (t > 0.0 && t < options.t_end) targets.push_back(t);
  }
  if (options.t_end > 0.0) targets.push_back(options.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Trajectory traj;
  traj.partition = u0.partition;
  traj.method = options.method;
  traj.dt_max = options.dt;
  const auto& nu = u0.partition->measures();
  std::vector<double> u = u0.values;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  traj.audits.push_back(audit(0.0, u, nu));

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  for (double target : targets) {
    const double span = target - t;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / options.dt * (1.0 - 1e-12))));
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t0 = t;
      if (options.method == Integrator::euler) {
        evaluate_rhs(system, t0, u, k1);
        for (std::size_t i = 0; i < n; ++i) u[i] += h * k1[i];
      } else {
        evaluate_rhs(system, t0, u, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        evaluate_rhs(system, t0 + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        evaluate_rhs(system, t0 + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        evaluate_rhs(system, t0 + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      for (double x : u) {
        if (!std::isfinite(x)) throw NumericalError("state became non-finite", t0);
      }
      t = s + 1 == steps ? target : t0 + h;
      traj.audits.push_back(audit(t, u, nu));
      ++traj.steps;
    }
    traj.times.push_back(target);
    traj.states.push_back(u);
  }
  return traj;
}

AuditSummary summarize(const Trajectory& trajectory, double energy_slack) {
  AuditSummary s;
  if (trajectory.audits.empty()) return s;
  const auto& first = trajectory.audits.front();
  s.initial_mass = first.mass;
  s.min_value = first.min_value;
  s.max_value = first.max_value;
  s.steps = trajectory.steps;
  for (std::size_t i = 0; i < trajectory.audits.size(); ++i) {
    const auto& a = trajectory.audits[i];
    s.mass_drift = std::max(s.mass_drift, std::abs(a.mass - first.mass));
    s.min_value = std::min(s.min_value, a.min_value);
    s.max_value = std::max(s.max_value, a.max_value);
    if (i > 0) {
      const double rise = a.energy - trajectory.audits[i - 1].energy;
      s.max_energy_increase = std::max(s.max_energy_increase, rise);
      if (rise > energy_slack * std::max(1.0, trajectory.audits[i - 1].energy)) ++s.energy_increases;
    }
  }
  s.relative_mass_drift = s.mass_drift / std::max(std::abs(first.mass), std::numeric_limits<double>::min());
  return s;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "time,word,value\n";
  const auto& words = trajectory.partition->words();
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    const std::string time = format_double(trajectory.times[s]);
    for (std::size_t w = 0; w < words.size(); ++w) {
      out << time << ',' << words[w].to_string() << ',' << format_double(trajectory.states[s][w]) << '\n';
    }
  }
}

Trajectory read_trajectory_csv(std::istream& in, std::shared_ptr<const Partition> partition) {
  const auto rows = read_csv(in, {"time", "word", "value"});
  Trajectory traj;
  traj.partition = partition;
  const std::size_t n = partition->size();
  std::vector<std::vector<bool>> seen;
  for (const auto& row : rows) {
    const double t = parse_double(row[0]);
    if (traj.times.empty() || traj.times.back() != t) {
      if (!traj.times.empty() && !(t > traj.times.back())) throw ValidationError("trajectory times must increase");
      traj.times.push_back(t);
      traj.states.emplace_back(n, 0.0);
      seen.emplace_back(n, false);
    }
    const Word w = Word::parse(row[1], partition->k());
    if (w.size() != static_cast<std::size_t>(partition->level())) throw ValidationError("word '" + row[1] + "' has the wrong level");
    const auto idx = w.index(partition->k());
    if (seen.back()[idx]) throw ValidationError("duplicate word '" + row[1] + "' at one time");
    seen.back()[idx] = true;
    traj.states.back()[idx] = parse_double(row[2]);
  }
  for (const auto& s : seen) {
    if (std::find(s.begin(), s.end(), false) != s.end()) throw ValidationError("trajectory snapshot is missing cells");
  }
  return traj;
}

void write_audit_json(std::ostream& out, const AuditSummary& summary, const Trajectory& trajectory) {
  nlohmann::ordered_json j;
  j["steps"] = summary.steps;
  j["method"] = std::string(to_string(trajectory.method));
  j["dt_max"] = trajectory.dt_max;
  j["samples"] = trajectory.times.size();
  j["initial_mass"] = summary.initial_mass;
  j["mass_drift"] = summary.mass_drift;
  j["relative_mass_drift"] = summary.relative_mass_drift;
  j["energy_increases"] = summary.energy_increases;
  j["max_energy_increase"] = summary.max_energy_increase;
  j["min_value"] = summary.min_value;
  j["max_value"] = summary.max_value;
  out << j.dump(2) << '\n';
}

}  // namespace sspde
