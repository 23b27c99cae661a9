#include <doctest.h>

#include <random>
#include <sstream>

#include <json.hpp>

#include "sspde/experiments.hpp"
#include "test_support.hpp"

using namespace sspde;
using testing::kPi;

namespace {

std::string csv_of(const ErrorReport& r) {
  std::ostringstream s;
  write_report_csv(s, r);
  return s.str();
}

std::string json_of(const ErrorReport& r) {
  std::ostringstream s;
  write_report_json(s, r);
  return s.str();
}

SweepSpec heat_balanced() {
  SweepSpec spec;
  spec.problem.kind = ReferenceKind::heat;
  spec.problem.initial = TrigPolynomial::cosine(1);
  spec.problem.horizon = 0.02;
  spec.kernel = KernelFamily::preset(KernelPreset::even_box, 0.25);
  spec.k = 2;
  spec.levels = {2, 3, 4};
  spec.rule = EpsilonRule::balanced_half;
  spec.rule_constant = 0.5;
  return spec;
}

}  // namespace

TEST_CASE("fit_rate") {
  std::vector<std::pair<double, double>> exact;
  for (double e : {0.1, 0.05, 0.025, 0.0125}) exact.emplace_back(e, e * e);
  const auto fit = fit_rate(exact);
  CHECK(std::abs(fit.slope - 2.0) <= 1e-12);
  CHECK(std::abs(fit.intercept) <= 1e-11);
  CHECK(fit.residual <= 1e-12);

  std::vector<std::pair<double, double>> same{{0.1, 1.0}, {0.1, 2.0}, {0.1, 3.0}};
  CHECK_THROWS_AS(fit_rate(same), ValidationError);
  std::vector<std::pair<double, double>> zero{{0.1, 0.0}, {0.2, 1.0}};
  CHECK_THROWS_AS(fit_rate(zero), ValidationError);
  std::vector<std::pair<double, double>> one{{0.1, 1.0}};
  CHECK_THROWS_AS(fit_rate(one), ValidationError);

  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<std::pair<double, double>> synth;
  for (int i = 0; i < 10; ++i) {
    const double e = std::pow(2.0, -i);
    synth.emplace_back(e, 3 * std::pow(e, 1.5) * (1 + noise(gen)));
  }
  const auto sf = fit_rate(synth);
  CHECK(std::abs(sf.slope - 1.5) <= 0.05);
  CHECK(std::exp(sf.intercept) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("galerkin sweep of functions") {
  const std::vector<int> levels{1, 2, 3, 4, 5, 6};
  for (int k : {2, 3}) {
    const auto r = galerkin_sweep([](double x) { return x; }, k, levels);
    REQUIRE(r.rows.size() == levels.size());
    for (const auto& row : r.rows) {
      CHECK(row.error == doctest::Approx(std::pow(double(k), -row.m) / std::sqrt(12.0)).epsilon(1e-12));
    }
    REQUIRE(r.fit.has_value());
    CHECK(std::abs(r.fit->slope - 1.0) <= 1e-10);
    CHECK(r.scale_name == "k^-m");
    CHECK(r.strictly_decreasing());
  }
  const auto c = galerkin_sweep([](double) { return 1.3; }, 2, levels);
  CHECK(c.exact);
  CHECK_FALSE(c.fit.has_value());
  const auto j = nlohmann::json::parse(json_of(c));
  CHECK(j.at("exact") == true);
  CHECK(j.at("slope").is_null());
}

TEST_CASE("galerkin sweep of an SG kernel decays") {
  const PlaneKernel J = [](Vec2 a, Vec2 b) { return std::exp(-norm(a - b)); };
  const std::vector<int> levels{0, 1, 2, 3};
  const auto r = galerkin_sweep_kernel(J, sg_preset(), levels, 4, 1);
  CHECK(r.strictly_decreasing());
  REQUIRE(r.fit.has_value());
  CHECK(r.fit->slope > 0.0);
  CHECK(r.scale_name == "q^m");
  const std::vector<int> too_deep{5};
  CHECK_THROWS_AS(galerkin_sweep_kernel(J, sg_preset(), too_deep, 4), ValidationError);
}

TEST_CASE("heat consistency sweep has slope two") {
  const std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  const auto r = consistency_sweep(KernelFamily::preset(KernelPreset::even_box, 0.1), ConsistencyMode::heat,
                                   TrigPolynomial::sine(1), eps, 1024);
  REQUIRE(r.fit.has_value());
  CHECK(std::abs(r.fit->slope - 2.0) <= 0.2);
  CHECK(r.strictly_decreasing());
  // Odd kernels: the vanishing second moment gives second-order transport consistency.
  const auto t = consistency_sweep(KernelFamily::preset(KernelPreset::odd_box, 0.1), ConsistencyMode::transport,
                                   TrigPolynomial::sine(1), eps, 1024);
  REQUIRE(t.fit.has_value());
  CHECK(t.fit->slope >= 1.8);
  CHECK(t.fit->slope <= 2.5);
}

TEST_CASE("sweep configuration validation") {
  SweepSpec spec = heat_balanced();
  CHECK_NOTHROW(spec.validate());
  spec.epsilons = {0.1};
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("mutually exclusive"), ValidationError);
  spec = heat_balanced();
  spec.kernel = KernelFamily::preset(KernelPreset::odd_box, 0.1);
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = heat_balanced();
  spec.levels.clear();
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = heat_balanced();
  spec.sample_times = {0.5};
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = heat_balanced();
  spec.rule = EpsilonRule::explicit_list;
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = heat_balanced();
  const auto cfg = spec.configurations();
  REQUIRE(cfg.size() == 3);
  CHECK(cfg[0].second == doctest::Approx(0.25));
  CHECK(cfg[2].second == doctest::Approx(0.125));
  spec.rule = EpsilonRule::balanced_linear;
  CHECK(spec.configurations()[1].second == doctest::Approx(0.5 / 8));
  CHECK(parse_epsilon_rule("balanced_half") == EpsilonRule::balanced_half);
}

TEST_CASE("balanced heat sweep decreases and is reproducible across thread counts") {
  SweepSpec spec = heat_balanced();
  const auto a = run_two_scale(spec);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.strictly_decreasing());
  CHECK(a.failures.empty());
  for (const auto& row : a.rows) {
    CHECK(row.error >= 0.0);
    CHECK(row.runtime_ms == 0.0);
    CHECK(row.dt > 0.0);
    CHECK(row.cells == (std::uint64_t{1} << row.m));
  }
  spec.threads = 3;
  const auto b = run_two_scale(spec);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(json_of(a) == json_of(b));
}

TEST_CASE("failed configurations are reported separately") {
  SweepSpec spec = heat_balanced();
  spec.rule = EpsilonRule::explicit_list;
  spec.levels = {3};
  spec.epsilons = {0.6, 0.2};
  const auto r = run_two_scale(spec);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].epsilon == 0.2);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].reason.find("period overlap") != std::string::npos);
  const auto j = nlohmann::json::parse(json_of(r));
  CHECK(j.at("failures").size() == 1);
  // Failed configurations never appear in the CSV.
  CHECK(csv_of(r).find("0.6") == std::string::npos);
  bool complete = true;
  for (const auto& [name, ok] : r.checks) {
    if (name == "complete") complete = ok;
  }
  CHECK_FALSE(complete);
}

TEST_CASE("surrogate reference isolates the Galerkin error") {
  SweepSpec spec = heat_balanced();
  spec.rule = EpsilonRule::explicit_list;
  spec.epsilons = {0.25};
  spec.levels = {2, 3, 4};
  spec.reference = ErrorReference::surrogate;
  spec.surrogate_level = 7;
  const auto r = run_two_scale(spec);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.strictly_decreasing());
}

TEST_CASE("random versus deterministic graphs") {
  RandomSweepSpec spec;
  spec.levels = {2, 3};
  spec.horizon = 0.2;
  spec.seeds = 4;
  spec.probability = [](double x, double y) { return x < 0.5 && y < 0.5 ? 1.0 : 0.0; };
  const auto binary = random_vs_deterministic(spec);
  // Cell averages of 0/1 kernels equal 0/1 up to the last bit of the quadrature weights.
  for (const auto& row : binary.rows) CHECK(row.error <= 1e-15);
  CHECK(binary.exact);

  spec.probability = [](double, double) { return 1.0; };
  const auto full = random_vs_deterministic(spec);
  for (const auto& row : full.rows) CHECK(row.error <= 1e-15);
  CHECK(full.exact);

  spec.probability = [](double x, double y) { return 0.5 * (1 + x * y); };
  spec.levels = {3, 4, 5, 6, 7};
  spec.seeds = 20;
  spec.horizon = 1.0;
  const auto smooth = random_vs_deterministic(spec);
  CHECK(smooth.nonincreasing());
  spec.threads = 2;
  CHECK(csv_of(smooth) == csv_of(random_vs_deterministic(spec)));
}

TEST_CASE("report CSV layout") {
  const std::vector<int> levels{1, 2};
  const auto r = galerkin_sweep([](double x) { return x; }, 2, levels);
  std::istringstream in(csv_of(r));
  std::string line;
  std::getline(in, line);
  CHECK(line == "m,epsilon,N,dt,error,runtime_ms");
  std::getline(in, line);
  CHECK(line.rfind("1,0,2,0,", 0) == 0);
}
