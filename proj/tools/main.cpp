#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Self-similar nonlocal particle systems: simulation, sweeps, weights, pullbacks"};
  app.require_subcommand(1);

  std::string config_path;
  sspde::cli::CommandOptions options;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  const char* names[] = {"simulate", "sweep", "weights", "pullback", "export-sg"};
  const char* help[] = {"integrate a particle system and write trajectory.csv + audit.json",
                        "run a convergence sweep and write report.csv + report.json",
                        "assemble a weight matrix and write weights.csv + weights.json",
                        "average a planar function or kernel over fractal cells",
                        "write the SG point cloud sg_points.csv (x, y, value)"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", options.verbose, "progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : sspde::cli::kExitValidation;
  }

  const auto* chosen = app.get_subcommands().front();
  options.out_dir = out_dir;
  options.threads = threads;
  if (chosen->count("--seed") > 0) options.seed = seed;

  return sspde::cli::run_command_file(chosen->get_name(), config_path, options, std::cerr, std::cerr);
}
