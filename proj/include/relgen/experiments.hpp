#pragma once

// Experiment runners behind the CLI. Each returns a report of named checks
// with measured values and limits, and writes its artifacts (time series,
// density dumps, sweep CSVs, the rendered report) below an output directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relgen/config.hpp"

namespace relgen {

struct Check {
  std::string name;
  double measured = 0.0;
  /// "<=", ">=" or "<".
  std::string relation;
  double limit = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<Check> checks;
  /// Informational lines (step counts, measured radii, ...).
  std::vector<std::string> notes;

  void require_at_most(std::string name, double measured, double limit);
  void require_at_least(std::string name, double measured, double limit);
  void require(std::string name, bool condition);
  void note(std::string line);

  bool passed() const;
  const Check* find(std::string_view name) const;
  /// Deterministic text table; no timings.
  std::string render() const;
};

/// Heat run: mass, entropy monotonicity, flux saturation, and optionally the
/// finite-speed bound or the classical full-support control.
ExperimentReport run_heat_experiment(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);
/// Kinetic run: energy conservation, entropy monotonicity, mass, energy-production bound.
ExperimentReport run_kfp_experiment(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);
/// Runs every configured variant to the shared Maxwellian.
ExperimentReport run_stationary_experiment(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);
/// Seeded structure suite on the configured grid.
ExperimentReport run_verify(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);
/// c sweep against the classical baseline; writes `limit_<model>.csv` with `c,deviation`.
ExperimentReport run_limit_study(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);

ExperimentReport run_experiment(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);

}  // namespace relgen
