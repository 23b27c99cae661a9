#include <doctest.h>

#include <random>
#include <sstream>

#include <json.hpp>

#include "sspde/ips_dynamics.hpp"
#include "test_support.hpp"

using namespace sspde;
using testing::kPi;
using testing::uniform;

namespace {

std::shared_ptr<const WeightMatrix> share(WeightMatrix w) { return std::make_shared<const WeightMatrix>(std::move(w)); }

WeightMatrix dense_weights(std::shared_ptr<const Partition> part, const std::function<double(std::size_t, std::size_t)>& f) {
  const std::size_t n = part->size();
  std::vector<double> values(n * n);
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t v = 0; v < n; ++v) values[w * n + v] = f(w, v);
  }
  return weights_from_step_kernel(StepKernel{part, SparseRows::dense(n, values)});
}

std::vector<double> random_state(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  std::vector<double> u(n);
  for (double& x : u) x = unif(gen);
  return u;
}

double weighted_sum(std::span<const double> a, std::span<const double> nu) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * nu[i];
  return s;
}

KernelFamily even_box(double eps) { return KernelFamily::preset(KernelPreset::even_box, eps); }
KernelFamily odd_box(double eps) { return KernelFamily::preset(KernelPreset::odd_box, eps); }
KernelFamily upwind_box(double eps) { return KernelFamily::preset(KernelPreset::upwind_box, eps); }

}  // namespace

TEST_CASE("rhs_linear") {
  const auto part = uniform(3, 2);
  const auto diag = dense_weights(part, [](std::size_t w, std::size_t v) { return w == v ? 1.0 : 0.0; });
  const auto u = random_state(9, 1);
  const auto out = rhs_linear(diag, u);
  for (std::size_t w = 0; w < 9; ++w) CHECK(out[w] == doctest::Approx(u[w] / 9.0).epsilon(1e-15));

  const auto odd = averaged_weights(odd_box(0.1), part, {WeightMode::transport});
  for (double x : rhs_linear(odd, std::vector<double>(9, 2.0))) CHECK(std::abs(x) <= 1e-12);

  const auto small = uniform(2, 1);
  const auto sigma = random_state(4, 2);
  const auto W = dense_weights(small, [&](std::size_t w, std::size_t v) { return sigma[w * 2 + v]; });
  const auto us = random_state(2, 3);
  const auto got = rhs_linear(W, us);
  for (std::size_t w = 0; w < 2; ++w) {
    double s = 0.0;
    for (std::size_t v = 0; v < 2; ++v) s += sigma[w * 2 + v] * us[v] * 0.5;
    CHECK(got[w] == s);
  }
  CHECK_THROWS_AS(rhs_linear(W, random_state(3, 4)), ValidationError);
}

TEST_CASE("rhs_transport") {
  const int m = 6;
  const double eps = 1.0 / 32.0;
  const auto part = uniform(2, m);
  const auto W = averaged_weights(odd_box(eps), part, {WeightMode::transport});
  const std::vector<double> ones(part->size(), 1.0), zeros(part->size(), 0.0);
  for (double x : rhs_transport(W, ones, std::vector<double>(part->size(), -3.0))) CHECK(std::abs(x) <= 1e-10);
  const auto u = cell_averages([](double x) { return std::sin(2 * kPi * x); }, part);
  for (double x : rhs_transport(W, zeros, u.values)) CHECK(x == 0.0);

  // du/dt = -u_x; oracle: cell averages of the exact derivative.
  const auto du = rhs_transport(W, ones, u.values);
  const auto deriv = cell_averages([](double x) { return -2 * kPi * std::cos(2 * kPi * x); }, part);
  const double h = part->cell_length();
  double worst = 0.0;
  for (std::size_t w = 0; w < part->size(); ++w) worst = std::max(worst, std::abs(du[w] - deriv.values[w]));
  // Second-derivative scale of sin 2 pi x times the two error sources.
  CHECK(worst <= 4 * kPi * kPi * (eps * eps + h));
  CHECK_THROWS_AS(rhs_transport(W, std::vector<double>(3, 1.0), u.values), ValidationError);
}

TEST_CASE("rhs_burgers_centered") {
  const auto part = uniform(3, 3);
  const auto W = averaged_weights(odd_box(0.1), part, {WeightMode::transport});
  for (double x : rhs_burgers_centered(W, std::vector<double>(27, 1.7))) CHECK(std::abs(x) <= 1e-11);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = rhs_burgers_centered(W, random_state(27, seed));
    CHECK(std::abs(weighted_sum(r, part->measures())) <= 1e-12);
  }

  const auto small = uniform(3, 1);
  const auto Ws = averaged_weights(odd_box(0.3), small, {WeightMode::transport});
  const auto u = random_state(3, 99);
  const auto got = rhs_burgers_centered(Ws, u);
  for (std::size_t w = 0; w < 3; ++w) {
    double s = 0.0;
    for (std::size_t v = 0; v < 3; ++v) {
      const double e = Ws.entries.at(w, v);
      if (e != 0.0) s += e * (0.5 * u[w] * u[w] - 0.5 * u[v] * u[v]) * (1.0 / 3.0);
    }
    CHECK(got[w] == doctest::Approx(-s).epsilon(1e-15));
  }
}

TEST_CASE("rhs_burgers_upwind against the continuum operator") {
  for (const auto& [k, eps] : {std::pair{2, 0.1}, std::pair{3, 0.07}}) {
    const int m = 2;
    const auto part = uniform(k, m);
    const std::size_t n = part->size();
    const auto kf = upwind_box(eps);
    const auto A = averaged_weights(kf, part, {WeightMode::upwind});
    const auto u = random_state(n, 5 + k, 0.1, 2.0);

    for (double x : rhs_burgers_upwind(A, std::vector<double>(n, 0.8))) CHECK(std::abs(x) <= 1e-12);
    const auto r = rhs_burgers_upwind(A, u);
    CHECK(std::abs(weighted_sum(r, part->measures())) <= 1e-12);

    // For u >= 0, g(a, b) = a^2 / 2 and N(u)(x) = int rho_eps(z) (u(x)^2 - u(x - z)^2) / 2 dz.
    const double h = part->cell_length();
    const double height = kf.eval(eps);  // constant value of the scaled box on its support
    const double reach = kf.support_radius() * eps;
    const auto u_at = [&](double x) {
      x -= std::floor(x);
      return u[std::min<std::size_t>(n - 1, static_cast<std::size_t>(x / h))];
    };
    // int_0^reach u(x - z)^2 dz by exact summation over cell overlaps.
    const auto lagged = [&](double x) {
      double s = 0.0;
      for (int shift = -2; shift <= 1; ++shift) {
        for (std::size_t v = 0; v < n; ++v) {
          const double lo = v * h + shift, hi = lo + h;
          const double len = std::max(0.0, std::min(x, hi) - std::max(x - reach, lo));
          s += len * u[v] * u[v];
        }
      }
      return s;
    };
    const auto N = [&](double x) { return height * 0.5 * (u_at(x) * u_at(x) * reach - lagged(x)); };
    const auto gl = gauss_legendre(3);
    for (std::size_t w = 0; w < n; ++w) {
      const double lo = w * h, hi = lo + h;
      std::vector<double> cuts{lo, hi};
      for (std::size_t v = 0; v <= n; ++v) {
        for (double edge : {v * h, v * h + reach, v * h + reach - 1.0}) {
          if (edge > lo && edge < hi) cuts.push_back(edge);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      double oracle = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) oracle += integrate(gl, cuts[i], cuts[i + 1], N);
      oracle = -oracle / h;
      CHECK(std::abs(r[w] - oracle) <= 1e-8);
    }
  }
  const auto part = uniform(2, 3);
  CHECK_THROWS_AS(rhs_burgers_upwind(averaged_weights(odd_box(0.1), part, {WeightMode::transport}),
                                     std::vector<double>(8, 1.0)),
                  ValidationError);
}

TEST_CASE("rhs_heat") {
  const auto part = uniform(3, 1);
  const auto W = averaged_weights(even_box(1.0 / 3.0), part, {WeightMode::heat, Boundary::periodic, 1.0});
  CHECK(W.prefactor == doctest::Approx(54.0).epsilon(1e-14));
  const auto r = rhs_heat(W, std::vector<double>{1.0, 0.0, 0.0});
  // 54 * 0.75 * (0 - 1) / 3 twice, and 54 * 0.75 * (1 - 0) / 3 for the other two cells.
  CHECK(r[0] == doctest::Approx(-27.0).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(13.5).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(13.5).epsilon(1e-14));

  const auto big = uniform(2, 6);
  const auto periodic = averaged_weights(even_box(0.05), big, {WeightMode::heat});
  const auto neumann = neumann_variant(even_box(0.05), big, WeightMode::heat);
  const auto dirichlet = dirichlet_variant(even_box(0.05), big, WeightMode::heat);
  for (const WeightMatrix* wm : {&periodic, &neumann}) {
    for (double x : rhs_heat(*wm, std::vector<double>(64, 0.4))) CHECK(std::abs(x) <= 1e-9);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto u = random_state(64, seed);
    for (const WeightMatrix* wm : {&periodic, &neumann, &dirichlet}) {
      const auto du = rhs_heat(*wm, u);
      double e = 0.0;
      for (std::size_t w = 0; w < 64; ++w) e += du[w] * u[w] / 64.0;
      CHECK(e <= 1e-12);
    }
  }
  // Dirichlet: a constant state loses exactly the absorbed mass.
  const auto dc = rhs_heat(dirichlet, std::vector<double>(64, 1.0));
  for (std::size_t w = 0; w < 64; ++w) {
    CHECK(dc[w] == doctest::Approx(-dirichlet.prefactor * dirichlet.absorption[w]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("rhs_generic") {
  const auto part = uniform(2, 5);
  const auto W = averaged_weights(even_box(0.1), part, {WeightMode::heat});
  const auto u = random_state(32, 8);
  const auto g = rhs_generic(W, {}, [](double a, double b) { return b - a; }, 0.0, u);
  const auto h = rhs_heat(W, u);
  for (std::size_t w = 0; w < 32; ++w) CHECK(g[w] == doctest::Approx(h[w]).epsilon(1e-12).scale(1.0));

  const auto zero = dense_weights(part, [](std::size_t, std::size_t) { return 0.0; });
  const auto local = [](double t, double x) { return t * x - x * x * x; };
  const auto f = rhs_generic(zero, local, [](double a, double b) { return b - a; }, 0.3, u);
  for (std::size_t w = 0; w < 32; ++w) CHECK(f[w] == doctest::Approx(local(0.3, u[w])).epsilon(1e-15));

  const auto trio = uniform(3, 1);
  const auto ones = dense_weights(trio, [](std::size_t, std::size_t) { return 1.0; });
  const auto kuramoto = [](double a, double b) { return std::sin(b - a); };
  const auto k = rhs_generic(ones, {}, kuramoto, 0.0, std::vector<double>{0.0, kPi / 2, kPi});
  CHECK(k[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(k[1]) <= 1e-16);
  CHECK(k[2] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));

  // Saturation clamps both arguments of the interaction.
  const auto sat = rhs_generic(ones, {}, [](double a, double b) { return b - a; }, 0.0,
                               std::vector<double>{-5.0, 0.0, 5.0}, Saturation{-1.0, 1.0});
  CHECK(sat[0] == doctest::Approx((0.0 + 1.0 + 2.0) / 3.0));
  CHECK(sat[2] == doctest::Approx((-2.0 - 1.0 + 0.0) / 3.0));

  const auto bad = [](double, double) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(rhs_generic(ones, {}, bad, 0.0, std::vector<double>{0.0, 1.0, 2.0}), NumericalError);
}

TEST_CASE("system validation checks parity and coefficients") {
  const auto part = uniform(2, 4);
  IpsSystem heat{SystemKind::heat, share(averaged_weights(odd_box(0.1), part, {WeightMode::transport})), {}, {}, {}, {}};
  CHECK_THROWS_AS(heat.validate(), ValidationError);
  IpsSystem transport{SystemKind::transport, share(averaged_weights(odd_box(0.1), part, {WeightMode::transport})),
                      {}, {}, {}, {}};
  CHECK_THROWS_AS(transport.validate(), ValidationError);
  transport.coefficients.assign(16, 1.0);
  CHECK_NOTHROW(transport.validate());
  IpsSystem centered{SystemKind::burgers_centered, share(averaged_weights(even_box(0.1), part, {})), {}, {}, {}, {}};
  CHECK_THROWS_AS(centered.validate(), ValidationError);
  CHECK(parse_system_kind("burgers_upwind") == SystemKind::burgers_upwind);
  CHECK(to_string(SystemKind::generic_nonlinear) == "generic_nonlinear");
  CHECK_THROWS_AS(parse_system_kind("wave"), ValidationError);
}

TEST_CASE("random graphs") {
  const auto part = uniform(2, 3);
  const auto ones = kernel_cell_averages([](double, double) { return 1.0; }, part);
  const auto zeros = kernel_cell_averages([](double, double) { return 0.0; }, part);
  CHECK(sample_random_graph(ones, 4).edge_count() == 64);
  CHECK(sample_random_graph(zeros, 4).edge_count() == 0);

  const auto half = kernel_cell_averages([](double, double) { return 0.5; }, part);
  int hits = 0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) hits += sample_random_graph(half, static_cast<std::uint64_t>(s)).at(2, 5);
  CHECK(std::abs(double(hits) / seeds - 0.5) <= 0.02);

  const auto a = sample_random_graph(half, 77), b = sample_random_graph(half, 77), c = sample_random_graph(half, 78);
  CHECK(a.adjacency == b.adjacency);
  CHECK(a.adjacency != c.adjacency);
  CHECK(edge_uniform(77, 2, 5) == edge_uniform(77, 2, 5));
  CHECK(edge_uniform(77, 2, 5) != edge_uniform(77, 5, 2));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double x = edge_uniform(i, i % 7, i % 3);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }

  const auto over = kernel_cell_averages([](double, double) { return 1.5; }, part);
  CHECK_THROWS_AS(sample_random_graph(over, 1), ValidationError);

  const auto wg = weights_from_graph(a, part);
  CHECK(wg.entries.nonzeros() == a.edge_count());
  for (std::size_t w = 0; w < 8; ++w) {
    for (std::size_t v = 0; v < 8; ++v) CHECK(wg.entries.at(w, v) == (a.at(w, v) ? 1.0 : 0.0));
  }
}

TEST_CASE("integration of trivial and scalar systems") {
  const auto part = uniform(2, 3);
  const auto u0 = cell_averages([](double x) { return std::cos(3 * x); }, part);

  IpsSystem still{SystemKind::linear, share(dense_weights(part, [](std::size_t, std::size_t) { return 0.0; })), {}, {}, {}, {}};
  IntegrationOptions opt;
  opt.t_end = 1.0;
  opt.dt = 0.1;
  opt.sample_times = {0.25, 0.5};
  const auto flat = integrate(still, u0, opt);
  REQUIRE(flat.times == std::vector<double>{0.0, 0.25, 0.5, 1.0});
  for (const auto& s : flat.states) CHECK(s == u0.values);

  // du/dt = -u via diagonal weights -k^m.
  IpsSystem decay{SystemKind::linear,
                  share(dense_weights(part, [](std::size_t w, std::size_t v) { return w == v ? -8.0 : 0.0; })),
                  {}, {}, {}, {}};
  const auto error_at = [&](double dt) {
    IntegrationOptions o;
    o.t_end = 1.0;
    o.dt = dt;
    const auto tr = integrate(decay, u0, o);
    double e = 0.0;
    for (std::size_t w = 0; w < 8; ++w) e = std::max(e, std::abs(tr.states.back()[w] - u0.values[w] * std::exp(-1.0)));
    return e;
  };
  const double e1 = error_at(0.1), e2 = error_at(0.05);
  CHECK(e1 <= 1e-5);
  CHECK(error_at(0.01) <= 1e-9);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.3));

  IntegrationOptions euler = opt;
  euler.method = Integrator::euler;
  euler.dt = 0.01;
  const auto te = integrate(decay, u0, euler);
  CHECK(std::abs(te.states.back()[0] - u0.values[0] * std::exp(-1.0)) <= 5e-3);

  IntegrationOptions zero;
  zero.t_end = 0.0;
  const auto snap = integrate(decay, u0, zero);
  CHECK(snap.times == std::vector<double>{0.0});
  CHECK(snap.steps == 0);
}

TEST_CASE("integration guards") {
  const auto part = uniform(2, 4);
  const auto W = averaged_weights(even_box(0.1), part, {WeightMode::heat});
  IpsSystem heat{SystemKind::heat, share(W), {}, {}, {}, {}};
  const auto u0 = cell_averages([](double x) { return std::cos(2 * kPi * x); }, part);
  const double limit = stable_dt(heat, u0.values, 0.5);
  // Guard: c m2 eps^2 / (2 kappa max raw row sum) with raw row sums equal to one.
  CHECK(limit == doctest::Approx(0.5 * (1.0 / 3.0) * 0.01 / 2.0).epsilon(1e-12));
  IntegrationOptions opt;
  opt.t_end = 0.01;
  opt.dt = 2 * limit;
  CHECK_THROWS_AS(integrate(heat, u0, opt), ValidationError);
  opt.enforce_stability = false;
  CHECK_NOTHROW(integrate(heat, u0, opt));
  opt.dt = -1.0;
  CHECK_THROWS_AS(integrate(heat, u0, opt), ValidationError);

  IpsSystem tr{SystemKind::transport, share(averaged_weights(odd_box(0.1), part, {WeightMode::transport})),
               std::vector<double>(16, 2.0), {}, {}, {}};
  CHECK(stable_dt(tr, u0.values, 0.5) == doctest::Approx(0.5 * 0.1 / 2.0));
  IpsSystem bg{SystemKind::burgers_centered, tr.weights, {}, {}, {}, {}};
  CHECK(stable_dt(bg, std::vector<double>(16, 4.0), 0.5) == doctest::Approx(0.5 * 0.1 / 4.0));

  // du/dt = u^2 from u = 1 blows up at t = 1.
  IpsSystem blow{SystemKind::generic_nonlinear,
                 share(dense_weights(part, [](std::size_t, std::size_t) { return 0.0; })),
                 {}, [](double, double x) { return x * x; }, [](double, double) { return 0.0; }, {}};
  IntegrationOptions o;
  o.t_end = 2.0;
  o.dt = 1e-3;
  o.enforce_stability = false;
  StepFunction one{part, std::vector<double>(16, 1.0)};
  try {
    integrate(blow, one, o);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(e.last_valid_time() == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("conservation audits") {
  const auto part = uniform(2, 6);
  const auto u0 = cell_averages([](double x) { return 1.0 + 0.5 * std::sin(2 * kPi * x); }, part);

  for (Boundary bc : {Boundary::periodic, Boundary::neumann}) {
    const auto W = bc == Boundary::periodic ? averaged_weights(even_box(0.05), part, {WeightMode::heat})
                                            : neumann_variant(even_box(0.05), part, WeightMode::heat);
    IpsSystem heat{SystemKind::heat, share(W), {}, {}, {}, {}};
    IntegrationOptions opt;
    opt.t_end = 1.0;
    opt.dt = stable_dt(heat, u0.values, 0.5);
    const auto s = summarize(integrate(heat, u0, opt));
    CHECK(s.relative_mass_drift <= 1e-10);
    CHECK(s.energy_increases == 0);
  }

  const auto Wt = averaged_weights(odd_box(1.0 / 32.0), part, {WeightMode::transport});
  IpsSystem centered{SystemKind::burgers_centered, share(Wt), {}, {}, {}, {}};
  IntegrationOptions opt;
  opt.t_end = 0.1;
  opt.dt = stable_dt(centered, u0.values, 0.5);
  CHECK(summarize(integrate(centered, u0, opt)).relative_mass_drift <= 1e-10);

  IpsSystem upwind{SystemKind::burgers_upwind,
                   share(averaged_weights(upwind_box(1.0 / 32.0), part, {WeightMode::upwind})), {}, {}, {}, {}};
  const auto bump = cell_averages([](double x) { return std::max(0.0, std::sin(2 * kPi * x)); }, part);
  opt.method = Integrator::euler;
  opt.t_end = 0.3;
  opt.dt = stable_dt(upwind, bump.values, 0.5);
  const auto su = summarize(integrate(upwind, bump, opt));
  CHECK(su.relative_mass_drift <= 1e-10);
  CHECK(su.min_value >= -1e-12);

  // Constant speed: the l2 norm is conserved up to the time-stepping error.
  IpsSystem tr{SystemKind::transport, share(Wt), std::vector<double>(part->size(), 1.0), {}, {}, {}};
  opt.method = Integrator::rk4;
  opt.t_end = 1.0;
  opt.dt = 1e-3;
  const auto tt = integrate(tr, u0, opt);
  CHECK(std::abs(l2_norm(tt.states.back(), part->measures()) - l2_norm(u0)) <= 1e-6);
}

TEST_CASE("heat system tracks the Fourier decay") {
  const auto part = uniform(2, 8);
  const double eps = 1.0 / 64.0;
  const auto W = averaged_weights(even_box(eps), part, {WeightMode::heat});
  IpsSystem heat{SystemKind::heat, share(W), {}, {}, {}, {}};
  const auto cosine = [](double x) { return std::cos(2 * kPi * x); };
  const auto u0 = cell_averages(cosine, part);
  IntegrationOptions opt;
  opt.t_end = 0.02;
  opt.dt = stable_dt(heat, u0.values, 0.5);
  const auto tr = integrate(heat, u0, opt);
  const double decay = std::exp(-4 * kPi * kPi * 0.02);
  const double err = l2_distance(tr.states.back(), [&] {
    auto v = u0.values;
    for (double& x : v) x *= decay;
    return v;
  }(), part->measures());
  // Symbol defect of the mode: nonlocal part 4 pi^2 (2 pi eps)^2 m4 / (12 m2), cell averaging part
  // prefactor (2 pi h)^2 / 12; the error grows like t times the defect times the amplitude.
  const double h = part->cell_length();
  const double defect = 4 * kPi * kPi * std::pow(2 * kPi * eps, 2) * 0.6 / 12.0 +
                        W.prefactor * std::pow(2 * kPi * h, 2) / 12.0;
  CHECK(err <= 0.02 * defect / std::sqrt(2.0));
  CHECK(err <= 0.02 * l2_norm(u0));
}

TEST_CASE("trajectory CSV and audit JSON") {
  const auto part = uniform(3, 2);
  const auto W = averaged_weights(even_box(0.2), part, {WeightMode::heat});
  IpsSystem heat{SystemKind::heat, share(W), {}, {}, {}, {}};
  const auto u0 = cell_averages([](double x) { return x * x; }, part);
  IntegrationOptions opt;
  opt.t_end = 0.05;
  opt.dt = stable_dt(heat, u0.values, 0.5);
  opt.sample_times = {0.01, 0.02};
  const auto tr = integrate(heat, u0, opt);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  const auto back = read_trajectory_csv(ss, part);
  CHECK(back.times == tr.times);
  CHECK(back.states == tr.states);
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);

  std::stringstream js;
  write_audit_json(js, summarize(tr), tr);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j.contains("mass_drift"));
  CHECK(j.contains("energy_increases"));
  CHECK(j.at("steps").get<std::size_t>() == tr.steps);
}
