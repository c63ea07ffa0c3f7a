#pragma once

// Run configuration: a flat `key = value` document with dotted keys and `#`
// comments. Parsing is strict: unknown or repeated keys, malformed values and
// physical constraint violations all raise ConfigError naming the key.
//
//   experiment          heat | kfp | verify | stationary | limit-study
//   model.m, model.gamma, model.theta, model.nu      positive numbers
//   model.c             positive number or `inf` (classical)
//   model.variant       DMR | DH | Classical (default: DH, or Classical for c = inf)
//   potential.kind      zero | harmonic | cosine
//   potential.stiffness, potential.amplitude, potential.period
//   grid.nq, grid.np, grid.lq, grid.pmax              phase grid (kfp, verify, stationary)
//   grid.n, grid.length                               heat grid
//   solver.dt (0 = stability bound), solver.t_final, solver.record_every
//   solver.tolerance                                  stationarity L1 target
//   init.kind           uniform | gaussian | bump | maxwellian | shifted-maxwellian
//   init.width, init.center                           heat
//   init.q0, init.p0, init.sigma_q, init.sigma_p      kfp
//   output.dir, output.dump_every (steps; 0 = final state only)
//   seed
//   verify.samples, verify.drift_perturbation (test hook)
//   stationary.variants                               comma list of variants
//   limit.model         heat | kfp
//   limit.speeds        comma list of finite c values, increasing
//   limit.max_deviation bound for the largest c
//   heat.threshold      support threshold
//   heat.check_finite_speed, heat.check_full_support  true | false

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relgen/heat.hpp"
#include "relgen/kfp.hpp"

namespace relgen {

enum class Experiment { Heat, Kfp, Verify, Stationary, LimitStudy };

std::string_view to_string(Experiment e);
/// Throws ConfigError for unknown names.
Experiment parse_experiment(std::string_view name);

enum class LimitModel { Heat, Kfp };

struct RunConfig {
  Experiment experiment = Experiment::Heat;

  ModelParams model;
  Variant variant = Variant::Classical;
  Potential potential = Potential::zero();

  int nq = 32;
  int np = 32;
  double lq = 16.0;
  double pmax = 34.0;
  int n = 256;
  double length = 1.0;

  double dt = 0.0;
  double t_final = 1.0;
  int record_every = 10;
  double tolerance = kStationarityTolerance;

  std::string init_kind = "gaussian";
  double init_width = 0.1;
  double init_center = 0.0;
  double init_q0 = 0.0;
  double init_p0 = 0.0;
  double init_sigma_q = 1.0;
  double init_sigma_p = 1.0;

  std::filesystem::path output_dir = "out";
  long dump_every = 0;
  std::uint64_t seed = 1;

  int verify_samples = 10000;
  double drift_perturbation = 0.0;
  std::vector<Variant> stationary_variants{Variant::DMR, Variant::DH};
  LimitModel limit_model = LimitModel::Heat;
  std::vector<double> limit_speeds{10.0, 100.0, 1000.0};
  double limit_max_deviation = 1e-4;
  double support_threshold = 1e-12;
  bool check_finite_speed = false;
  bool check_full_support = false;

  PhaseGrid phase_grid() const { return PhaseGrid(nq, np, lq, pmax); }
  HeatGrid heat_grid() const { return HeatGrid(n, length); }
  HeatRunConfig heat_run_config() const;
  KfpConfig kfp_config() const;
};

/// `experiment`, when given, stands in for a missing `experiment` key and must
/// agree with a present one. With neither, parsing fails.
RunConfig parse_config(std::string_view text, std::optional<Experiment> experiment = std::nullopt);
/// Reads and parses a file; unreadable files raise ConfigError with an empty key.
RunConfig load_config(const std::filesystem::path& path, std::optional<Experiment> experiment = std::nullopt);

}  // namespace relgen
