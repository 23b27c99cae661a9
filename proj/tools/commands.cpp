#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sspde/csv_io.hpp"
#include "sspde/experiments.hpp"
#include "sspde/ips_dynamics.hpp"
#include "sspde/reference_solutions.hpp"

namespace sspde::cli {

using nlohmann::json;

Section::Section(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (!node.is_object()) throw ValidationError(path_ + ": expected an object");
}

bool Section::has(const char* key) const { return node_->contains(key); }

const json& Section::raw(const char* key) {
  if (!node_->contains(key)) throw ValidationError(path_ + ": missing key '" + key + "'");
  used_.emplace_back(key);
  return node_->at(key);
}

Section Section::child(const char* key) { return Section(raw(key), path_ + "." + key); }

void Section::finish() const {
  std::string unknown;
  for (const auto& item : node_->items()) {
    if (std::find(used_.begin(), used_.end(), item.key()) == used_.end()) {
      unknown += (unknown.empty() ? "" : ", ") + item.key();
    }
  }
  if (!unknown.empty()) throw ValidationError(path_ + ": unknown key(s) " + unknown);
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

namespace {

Vec2 parse_vec2(const json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    throw ValidationError(path + ": expected [x, y]");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

IfsSpec parse_ifs_maps(Section& s) {
  IfsSpec ifs;
  const json& maps = s.raw("maps");
  if (!maps.is_array() || maps.empty()) throw ValidationError(s.path() + ".maps: expected a non-empty array");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    Section m(maps[i], s.path() + ".maps[" + std::to_string(i) + "]");
    const auto lin = m.get<std::vector<double>>("linear");
    if (lin.size() != 4) throw ValidationError(m.path() + ".linear: expected [a, b, c, d]");
    Similitude f;
    f.linear = {lin[0], lin[1], lin[2], lin[3]};
    f.offset = parse_vec2(m.raw("offset"), m.path() + ".offset");
    f.ratio = m.get<double>("ratio");
    m.finish();
    ifs.maps.push_back(f);
  }
  ifs.k = static_cast<int>(ifs.maps.size());
  ifs.p = s.has("p") ? s.get<std::vector<double>>("p") : std::vector<double>(ifs.maps.size(), 1.0 / ifs.maps.size());
  return ifs;
}

}  // namespace

IfsSpec parse_ifs(const json& node) {
  Section s(node, "ifs");
  IfsSpec ifs;
  if (s.has("preset")) {
    const auto name = s.get<std::string>("preset");
    if (name == "sg") {
      ifs = sg_preset();
    } else if (name == "interval") {
      ifs = interval_preset(s.get_or<int>("k", 2));
    } else {
      throw ValidationError("ifs.preset: unknown preset '" + name + "' (expected sg or interval)");
    }
  } else if (s.has("file")) {
    const auto file = s.get<std::string>("file");
    std::ifstream in(file);
    if (!in) throw ValidationError("ifs.file: cannot open '" + file + "'");
    json inner;
    try {
      inner = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("ifs.file: invalid JSON: " + std::string(e.what()));
    }
    Section f(inner, "ifs.file");
    ifs = parse_ifs_maps(f);
    f.finish();
  } else {
    ifs = parse_ifs_maps(s);
  }
  s.finish();
  ifs.validate();
  return ifs;
}

TrigPolynomial parse_trig(const json& node, const std::string& path) {
  Section s(node, path);
  TrigPolynomial u;
  u.constant = s.get_or<double>("constant", 0.0);
  if (s.has("modes")) {
    const json& modes = s.raw("modes");
    if (!modes.is_array()) throw ValidationError(path + ".modes: expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      Section m(modes[i], path + ".modes[" + std::to_string(i) + "]");
      FourierMode mode;
      mode.n = m.get<int>("n");
      if (mode.n < 1) throw ValidationError(m.path() + ".n: frequency must be >= 1");
      mode.cos_coeff = m.get_or<double>("cos", 0.0);
      mode.sin_coeff = m.get_or<double>("sin", 0.0);
      m.finish();
      u.modes.push_back(mode);
    }
  }
  s.finish();
  return u;
}

KernelFamily parse_kernel(const json& node, const std::string& path) {
  Section s(node, path);
  const double eps = s.get<double>("epsilon");
  if (s.has("preset")) {
    const auto preset = parse_kernel_preset(s.get<std::string>("preset"));
    s.finish();
    return KernelFamily::preset(preset, eps);
  }
  const auto parity_name = s.get<std::string>("parity");
  KernelParity parity;
  if (parity_name == "odd") {
    parity = KernelParity::odd;
  } else if (parity_name == "even") {
    parity = KernelParity::even;
  } else if (parity_name == "one_sided") {
    parity = KernelParity::one_sided;
  } else {
    throw ValidationError(path + ".parity: expected odd, even or one_sided");
  }
  std::vector<PolynomialPiece> pieces;
  const json& arr = s.raw("pieces");
  if (!arr.is_array()) throw ValidationError(path + ".pieces: expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Section p(arr[i], path + ".pieces[" + std::to_string(i) + "]");
    pieces.push_back({p.get<double>("lo"), p.get<double>("hi"), p.get<std::vector<double>>("coeffs")});
    p.finish();
  }
  const auto name = s.get_or<std::string>("name", "custom");
  s.finish();
  return KernelFamily::custom(std::move(pieces), parity, eps, name);
}

PlaneFunction parse_plane_function(const json& node, const std::string& path) {
  Section s(node, path);
  const auto kind = s.get<std::string>("kind");
  PlaneFunction f;
  if (kind == "exp_abs_diff") {
    f = [](Vec2 x) { return std::exp(-std::abs(x.x - x.y)); };
  } else if (kind == "constant") {
    const double c = s.get<double>("value");
    f = [c](Vec2) { return c; };
  } else if (kind == "affine") {
    const double a = s.get_or<double>("a", 0.0), b = s.get_or<double>("b", 0.0), c = s.get_or<double>("c", 0.0);
    f = [a, b, c](Vec2 x) { return a + b * x.x + c * x.y; };
  } else {
    throw ValidationError(path + ".kind: unknown plane function '" + kind + "'");
  }
  s.finish();
  return f;
}

PlaneKernel parse_plane_kernel(const json& node, const std::string& path) {
  Section s(node, path);
  const auto kind = s.get<std::string>("kind");
  PlaneKernel J;
  if (kind == "exp_distance") {
    J = [](Vec2 a, Vec2 b) { return std::exp(-norm(a - b)); };
  } else if (kind == "constant") {
    const double c = s.get<double>("value");
    J = [c](Vec2, Vec2) { return c; };
  } else {
    throw ValidationError(path + ".kind: unknown plane kernel '" + kind + "'");
  }
  s.finish();
  return J;
}

namespace {

KernelFunction parse_probability(const json& node, const std::string& path) {
  Section s(node, path);
  const auto kind = s.get<std::string>("kind");
  KernelFunction W;
  if (kind == "half_one_plus_xy") {
    W = [](double x, double y) { return 0.5 * (1.0 + x * y); };
  } else if (kind == "constant") {
    const double p = s.get<double>("value");
    W = [p](double, double) { return p; };
  } else if (kind == "threshold") {
    // 1 when x + y < level, else 0: a deterministic 0/1 kernel.
    const double level = s.get<double>("level");
    W = [level](double x, double y) { return x + y < level ? 1.0 : 0.0; };
  } else {
    throw ValidationError(path + ".kind: unknown probability kernel '" + kind + "'");
  }
  s.finish();
  return W;
}

Interaction parse_interaction(const std::string& name, const std::string& path) {
  if (name == "difference") return [](double a, double b) { return b - a; };
  if (name == "sine_difference") return [](double a, double b) { return std::sin(b - a); };
  throw ValidationError(path + ": unknown interaction '" + name + "' (expected difference or sine_difference)");
}

RealFunction parse_real_function(const json& node, const std::string& path, std::optional<int>& step_depth) {
  Section s(node, path);
  const auto kind = s.get<std::string>("kind");
  RealFunction f;
  if (kind == "polynomial") {
    const auto c = s.get<std::vector<double>>("coeffs");
    f = [c](double x) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
      return v;
    };
  } else if (kind == "trig") {
    const TrigPolynomial u = parse_trig(s.raw("function"), path + ".function");
    f = [u](double x) { return u(x); };
  } else if (kind == "pullback") {
    const IfsSpec ifs = parse_ifs(s.raw("ifs"));
    const PlaneFunction g = parse_plane_function(s.raw("function"), path + ".function");
    const int depth = s.get<int>("depth");
    step_depth = depth;
    f = pullback_function(g, ifs, depth);
  } else {
    throw ValidationError(path + ".kind: unknown function kind '" + kind + "'");
  }
  s.finish();
  return f;
}

std::vector<double> sample_times_from(Section& s, double horizon) {
  std::vector<double> times;
  if (s.has("sample_times")) times = s.get<std::vector<double>>("sample_times");
  if (s.has("samples")) {
    const int n = s.get<int>("samples");
    if (n < 1) throw ValidationError(s.path() + ".samples: must be >= 1");
    for (int i = 1; i <= n; ++i) times.push_back(horizon * i / n);
  }
  return times;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + (dir / name).string() + "'");
  return out;
}

std::shared_ptr<const Partition> model_partition(const IfsSpec& ifs, int level) {
  return std::make_shared<const Partition>(ifs.k, level, ifs.p);
}

// ---- simulate ----

void cmd_simulate(const json& config, const CommandOptions& options, std::ostream& log) {
  Section s(config, "config");
  const IfsSpec ifs = s.has("ifs") ? parse_ifs(s.raw("ifs")) : interval_preset(2);
  const int level = s.get<int>("level");
  auto partition = model_partition(ifs, level);
  const double horizon = s.get<double>("horizon");
  if (!(horizon >= 0.0)) throw ValidationError("config.horizon: must be >= 0");
  const TrigPolynomial initial = parse_trig(s.raw("initial"), "config.initial");
  const Boundary boundary = parse_boundary(s.get_or<std::string>("boundary", "periodic"));
  std::uint64_t seed = s.get_or<std::uint64_t>("seed", 0);
  if (options.seed) seed = *options.seed;

  Section sys = s.child("system");
  IpsSystem system;
  system.kind = parse_system_kind(sys.get<std::string>("kind"));
  const double kappa = sys.get_or<double>("kappa", 1.0);
  std::optional<KernelFamily> kernel;
  if (system.kind != SystemKind::generic_nonlinear && system.kind != SystemKind::linear) {
    kernel = parse_kernel(s.raw("kernel"), "config.kernel");
  }
  if (boundary != Boundary::periodic && system.kind != SystemKind::heat) {
    throw ValidationError("config.boundary: dirichlet and neumann are only available for heat systems");
  }

  WeightMatrix weights;
  switch (system.kind) {
    case SystemKind::heat:
      if (boundary == Boundary::dirichlet) {
        weights = dirichlet_variant(*kernel, partition, WeightMode::heat, kappa);
      } else if (boundary == Boundary::neumann) {
        weights = neumann_variant(*kernel, partition, WeightMode::heat, kappa);
      } else {
        weights = averaged_weights(*kernel, partition, {WeightMode::heat, Boundary::periodic, kappa});
      }
      break;
    case SystemKind::transport:
      weights = averaged_weights(*kernel, partition, {WeightMode::transport, Boundary::periodic, 1.0});
      system.coefficients =
          cell_averages(parse_trig(sys.raw("speed"), "config.system.speed"), partition).values;
      break;
    case SystemKind::burgers_centered:
      weights = averaged_weights(*kernel, partition, {WeightMode::transport, Boundary::periodic, 1.0});
      break;
    case SystemKind::burgers_upwind:
      weights = averaged_weights(*kernel, partition, {WeightMode::upwind, Boundary::periodic, 1.0});
      break;
    case SystemKind::linear:
    case SystemKind::generic_nonlinear: {
      const StepKernel probabilities =
          kernel_cell_averages(parse_probability(sys.raw("probability"), "config.system.probability"), partition);
      if (sys.get_or<bool>("random_graph", false)) {
        weights = weights_from_graph(sample_random_graph(probabilities, seed), partition);
      } else {
        weights = weights_from_step_kernel(probabilities);
      }
      if (system.kind == SystemKind::generic_nonlinear) {
        system.interaction =
            parse_interaction(sys.get_or<std::string>("interaction", "difference"), "config.system.interaction");
        if (sys.has("saturation")) {
          const auto box = sys.get<std::vector<double>>("saturation");
          if (box.size() != 2 || !(box[0] < box[1])) throw ValidationError("config.system.saturation: expected [lo, hi]");
          system.saturation = Saturation{box[0], box[1]};
        }
      }
      break;
    }
  }
  sys.finish();
  system.weights = std::make_shared<const WeightMatrix>(std::move(weights));

  IntegrationOptions integration;
  integration.t_end = horizon;
  if (s.has("integrator")) {
    Section in = s.child("integrator");
    integration.method = parse_integrator(in.get_or<std::string>("method", "rk4"));
    integration.dt = in.get_or<double>("dt", integration.dt);
    integration.c_stab = in.get_or<double>("c_stab", integration.c_stab);
    integration.enforce_stability = in.get_or<bool>("enforce_stability", true);
    integration.sample_times = sample_times_from(in, horizon);
    in.finish();
  }
  s.finish();

  const StepFunction u0 = cell_averages(initial, partition);
  if (options.verbose) {
    log << "simulate: " << to_string(system.kind) << ", N = " << partition->size() << ", nonzeros = "
        << system.weights->entries.nonzeros() << ", dt = " << integration.dt << '\n';
  }
  const Trajectory traj = integrate(system, u0, integration);
  const AuditSummary summary = summarize(traj);
  auto csv = open_output(options.out_dir, "trajectory.csv");
  write_trajectory_csv(csv, traj);
  auto audit = open_output(options.out_dir, "audit.json");
  write_audit_json(audit, summary, traj);
  if (options.verbose) log << "simulate: " << traj.steps << " steps, mass drift " << summary.mass_drift << '\n';
}

// ---- sweep ----

ReferenceProblem parse_problem(const json& node) {
  Section s(node, "config.problem");
  ReferenceProblem p;
  p.kind = parse_reference_kind(s.get<std::string>("kind"));
  p.initial = parse_trig(s.raw("initial"), "config.problem.initial");
  p.horizon = s.get<double>("horizon");
  if (p.kind == ReferenceKind::heat) p.kappa = s.get_or<double>("kappa", 1.0);
  if (p.kind == ReferenceKind::transport && s.has("speed")) p.speed = parse_trig(s.raw("speed"), "config.problem.speed");
  s.finish();
  return p;
}

ErrorReport sweep_two_scale(Section& s, const CommandOptions& options) {
  SweepSpec spec;
  spec.problem = parse_problem(s.raw("problem"));
  spec.kernel = parse_kernel(s.raw("kernel"), "config.kernel");
  spec.k = s.get_or<int>("k", 2);
  spec.levels = s.get<std::vector<int>>("levels");
  const bool has_eps = s.has("epsilons");
  const bool has_rule = s.has("balanced");
  if (has_eps && has_rule) throw ValidationError("config: 'balanced' and 'epsilons' are mutually exclusive");
  if (has_eps) spec.epsilons = s.get<std::vector<double>>("epsilons");
  if (has_rule) {
    Section b = s.child("balanced");
    spec.rule = parse_epsilon_rule(b.get<std::string>("rule"));
    if (spec.rule == EpsilonRule::explicit_list) throw ValidationError("config.balanced.rule: expected a balanced rule");
    spec.rule_constant = b.get_or<double>("constant", 1.0);
    b.finish();
  }
  spec.sample_times = sample_times_from(s, spec.problem.horizon);
  if (s.has("integrator")) {
    Section in = s.child("integrator");
    spec.method = parse_integrator(in.get_or<std::string>("method", "rk4"));
    spec.dt_cap = in.get_or<double>("dt", spec.dt_cap);
    spec.c_stab = in.get_or<double>("c_stab", spec.c_stab);
    in.finish();
  }
  if (s.has("surrogate_level")) {
    spec.reference = ErrorReference::surrogate;
    spec.surrogate_level = s.get<int>("surrogate_level");
  }
  spec.record_runtime = s.get_or<bool>("record_runtime", false);
  spec.threads = options.threads;
  s.finish();
  return run_two_scale(spec);
}

ErrorReport sweep_galerkin(Section& s) {
  std::optional<int> step_depth;
  const RealFunction f = parse_real_function(s.raw("function"), "config.function", step_depth);
  const int k = s.get_or<int>("k", 2);
  const auto levels = s.get<std::vector<int>>("levels");
  s.finish();
  return galerkin_sweep(f, k, levels, step_depth);
}

ErrorReport sweep_galerkin_kernel(Section& s) {
  const IfsSpec ifs = parse_ifs(s.raw("ifs"));
  const PlaneKernel J = parse_plane_kernel(s.raw("kernel"), "config.kernel");
  const auto levels = s.get<std::vector<int>>("levels");
  const int fine = s.get<int>("fine_level");
  const int depth = s.get_or<int>("depth", 0);
  s.finish();
  return galerkin_sweep_kernel(J, ifs, levels, fine, depth);
}

ErrorReport sweep_random(Section& s, const CommandOptions& options) {
  RandomSweepSpec spec;
  spec.k = s.get_or<int>("k", 2);
  spec.levels = s.get<std::vector<int>>("levels");
  if (s.has("probability")) spec.probability = parse_probability(s.raw("probability"), "config.probability");
  if (s.has("interaction")) spec.interaction = parse_interaction(s.get<std::string>("interaction"), "config.interaction");
  if (s.has("initial")) {
    const TrigPolynomial u = parse_trig(s.raw("initial"), "config.initial");
    spec.initial = [u](double x) { return u(x); };
  }
  spec.horizon = s.get_or<double>("horizon", spec.horizon);
  spec.dt = s.get_or<double>("dt", spec.dt);
  spec.sample_times = sample_times_from(s, spec.horizon);
  spec.seeds = s.get_or<std::size_t>("seeds", spec.seeds);
  spec.seed = s.get_or<std::uint64_t>("seed", spec.seed);
  if (options.seed) spec.seed = *options.seed;
  spec.threads = options.threads;
  s.finish();
  return random_vs_deterministic(spec);
}

ErrorReport sweep_consistency(Section& s) {
  const KernelFamily kernel = parse_kernel(s.raw("kernel"), "config.kernel");
  const auto mode = parse_consistency_mode(s.get<std::string>("mode"));
  const TrigPolynomial u = parse_trig(s.raw("u"), "config.u");
  const auto eps = s.get<std::vector<double>>("epsilons");
  const int grid = s.get_or<int>("grid_points", 4096);
  const double kappa = s.get_or<double>("kappa", 1.0);
  s.finish();
  return consistency_sweep(kernel, mode, u, eps, grid, kappa);
}

void cmd_sweep(const json& config, const CommandOptions& options, std::ostream& log) {
  Section s(config, "config");
  const auto kind = s.get<std::string>("sweep");
  ErrorReport report;
  if (kind == "two_scale") {
    report = sweep_two_scale(s, options);
  } else if (kind == "galerkin") {
    report = sweep_galerkin(s);
  } else if (kind == "galerkin_kernel") {
    report = sweep_galerkin_kernel(s);
  } else if (kind == "random") {
    report = sweep_random(s, options);
  } else if (kind == "consistency") {
    report = sweep_consistency(s);
  } else {
    throw ValidationError("config.sweep: unknown sweep '" + kind +
                          "' (expected two_scale, galerkin, galerkin_kernel, random or consistency)");
  }
  auto csv = open_output(options.out_dir, "report.csv");
  write_report_csv(csv, report);
  auto js = open_output(options.out_dir, "report.json");
  write_report_json(js, report);
  if (options.verbose) {
    log << "sweep " << report.name << ": " << report.rows.size() << " rows, " << report.failures.size()
        << " failures";
    if (report.fit) log << ", slope " << report.fit->slope;
    log << '\n';
  }
}

// ---- weights ----

void cmd_weights(const json& config, const CommandOptions& options, std::ostream& log) {
  Section s(config, "config");
  const IfsSpec ifs = s.has("ifs") ? parse_ifs(s.raw("ifs")) : interval_preset(2);
  auto partition = model_partition(ifs, s.get<int>("level"));
  const KernelFamily kernel = parse_kernel(s.raw("kernel"), "config.kernel");
  const WeightMode mode = parse_weight_mode(s.get_or<std::string>("mode", "linear_generic"));
  const Boundary boundary = parse_boundary(s.get_or<std::string>("boundary", "periodic"));
  const double kappa = s.get_or<double>("kappa", 1.0);
  s.finish();
  WeightMatrix wm;
  if (boundary == Boundary::dirichlet) {
    wm = dirichlet_variant(kernel, partition, mode, kappa);
  } else if (boundary == Boundary::neumann) {
    wm = neumann_variant(kernel, partition, mode, kappa);
  } else {
    wm = averaged_weights(kernel, partition, {mode, boundary, kappa});
  }
  auto csv = open_output(options.out_dir, "weights.csv");
  write_weight_matrix_csv(csv, wm);
  auto js = open_output(options.out_dir, "weights.json");
  write_weight_matrix_json(js, wm);
  if (options.verbose) log << "weights: N = " << wm.size() << ", nonzeros = " << wm.entries.nonzeros() << '\n';
}

// ---- pullback ----

void cmd_pullback(const json& config, const CommandOptions& options, std::ostream& log) {
  Section s(config, "config");
  const IfsSpec ifs = parse_ifs(s.raw("ifs"));
  const int level = s.get<int>("level");
  const int depth = s.get_or<int>("depth", 6);
  std::optional<Vec2> base;
  if (s.has("base")) base = parse_vec2(s.raw("base"), "config.base");
  const bool has_f = s.has("function"), has_k = s.has("kernel");
  if (has_f == has_k) throw ValidationError("config: give exactly one of 'function' or 'kernel'");
  if (has_f) {
    const PlaneFunction f = parse_plane_function(s.raw("function"), "config.function");
    s.finish();
    const StepFunction u = fractal_cell_averages(f, ifs, level, depth, base);
    auto csv = open_output(options.out_dir, "pullback.csv");
    write_step_function_csv(csv, u);
  } else {
    const PlaneKernel J = parse_plane_kernel(s.raw("kernel"), "config.kernel");
    s.finish();
    const StepKernel W = fractal_kernel_averages(J, ifs, level, depth, base);
    auto csv = open_output(options.out_dir, "pullback_kernel.csv");
    write_step_kernel_csv(csv, W);
  }
  if (options.verbose) log << "pullback: level " << level << ", depth " << depth << '\n';
}

// ---- export-sg ----

void cmd_export_sg(const json& config, const CommandOptions& options, std::ostream& log) {
  Section s(config, "config");
  const IfsSpec sg = sg_preset();
  const int depth = s.get<int>("depth");
  const auto partition = model_partition(sg, depth);
  const Vec2 base = sg.barycenter();
  std::vector<std::string> values(partition->size());

  const bool has_f = s.has("function"), has_t = s.has("trajectory");
  if (has_f == has_t) throw ValidationError("config: give exactly one of 'function' or 'trajectory'");
  if (has_f) {
    const PlaneFunction f = parse_plane_function(s.raw("function"), "config.function");
    const int average_depth = s.get_or<int>("average_depth", 0);
    s.finish();
    const StepFunction u = fractal_cell_averages(f, sg, depth, average_depth, base);
    for (std::size_t i = 0; i < u.size(); ++i) values[i] = format_double(u[i]);
  } else {
    const auto path = s.get<std::string>("trajectory");
    const int level = s.get<int>("level");
    if (level > depth) throw ValidationError("config.level: must not exceed depth");
    const auto coarse = model_partition(sg, level);
    std::ifstream in(path);
    if (!in) throw ValidationError("config.trajectory: cannot open '" + path + "'");
    const Trajectory traj = read_trajectory_csv(in, coarse);
    if (traj.times.empty()) throw ValidationError("config.trajectory: no snapshots");
    std::size_t snapshot = traj.times.size() - 1;
    if (s.has("time")) {
      const double t = s.get<double>("time");
      const auto it = std::find(traj.times.begin(), traj.times.end(), t);
      if (it == traj.times.end()) throw ValidationError("config.time: no snapshot at t = " + format_double(t));
      snapshot = static_cast<std::size_t>(it - traj.times.begin());
    }
    s.finish();
    const std::size_t block = partition->size() / coarse->size();
    for (std::size_t i = 0; i < partition->size(); ++i) values[i] = format_double(traj.states[snapshot][i / block]);
  }

  auto csv = open_output(options.out_dir, "sg_points.csv");
  csv << "x,y,value\n";
  for (std::size_t i = 0; i < partition->size(); ++i) {
    const Vec2 p = project_point(partition->words()[i], sg, base).point;
    csv << format_double(p.x) << ',' << format_double(p.y) << ',' << values[i] << '\n';
  }
  if (options.verbose) log << "export-sg: " << partition->size() << " points\n";
}

void write_error(const std::string& code, const std::string& message, json context, const CommandOptions& options,
                 std::ostream& err) {
  const json payload = {{"code", code}, {"message", message}, {"context", std::move(context)}};
  err << payload.dump() << '\n';
  try {
    std::filesystem::create_directories(options.out_dir);
    std::ofstream out(options.out_dir / "error.json");
    out << payload.dump(2) << '\n';
  } catch (const std::exception&) {
    // stderr already carries the report
  }
}

}  // namespace

int run_command(std::string_view command, const json& config, const CommandOptions& options, std::ostream& log,
                std::ostream& err) {
  const std::string name(command);
  default_thread_count() = std::max<std::size_t>(1, options.threads);
  try {
    if (name == "simulate") {
      cmd_simulate(config, options, log);
    } else if (name == "sweep") {
      cmd_sweep(config, options, log);
    } else if (name == "weights") {
      cmd_weights(config, options, log);
    } else if (name == "pullback") {
      cmd_pullback(config, options, log);
    } else if (name == "export-sg") {
      cmd_export_sg(config, options, log);
    } else {
      throw ValidationError("unknown command '" + name + "'");
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    write_error("validation", e.what(), {{"command", name}}, options, err);
    return kExitValidation;
  } catch (const NumericalError& e) {
    write_error("numerical", e.what(), {{"command", name}, {"last_valid_time", e.last_valid_time()}}, options, err);
    return kExitNumerical;
  } catch (const json::exception& e) {
    write_error("validation", e.what(), {{"command", name}}, options, err);
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    write_error("validation", e.what(), {{"command", name}}, options, err);
    return kExitValidation;
  }
}

int run_command_file(std::string_view command, const std::filesystem::path& config_path,
                     const CommandOptions& options, std::ostream& log, std::ostream& err) {
  json config;
  try {
    config = load_config(config_path);
  } catch (const ValidationError& e) {
    write_error("validation", e.what(), {{"command", std::string(command)}, {"config", config_path.string()}}, options,
                err);
    return kExitValidation;
  }
  return run_command(command, config, options, log, err);
}

}  // namespace sspde::cli
