// relgen <experiment> --config <path> [--out <dir>] [--seed <u64>]
// Exit status: 0 all checks passed, 1 a check or the run failed, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relgen/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving relativistic heat and kinetic Fokker-Planck solvers"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, "heat | kfp | verify | stationary | limit-study")->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "seed for the randomized suites (overrides seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  relgen::RunConfig cfg;
  try {
    cfg = relgen::load_config(config_path, relgen::parse_experiment(experiment));
  } catch (const relgen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (seed) cfg.seed = *seed;
  const std::filesystem::path out = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);

  try {
    const relgen::ExperimentReport report = relgen::run_experiment(cfg, out);
    std::cout << report.render();
    return report.passed() ? kExitPass : kExitCheckFailure;
  } catch (const relgen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const relgen::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const relgen::StabilityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const relgen::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const relgen::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}
