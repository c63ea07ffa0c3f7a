#pragma once

// Text serialisation: the diagnostics time series (CSV) and density dumps.
// Floating-point values are written with 17 significant digits, so reading a
// file back reproduces every value bitwise.

#include <filesystem>
#include <string>
#include <vector>

#include "relgen/diagnostics.hpp"
#include "relgen/generic.hpp"
#include "relgen/heat.hpp"

namespace relgen {

inline constexpr const char* kTimeseriesHeader = "t,E,S,mass,dSdt,degL,degM,relEnt,e";

std::string format_double(double x);

/// Throws InvalidArgument for an empty or time-decreasing record list and
/// IoError (with the path) when the file cannot be written.
void write_timeseries_csv(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_timeseries_csv(const std::filesystem::path& path);

/// Header `# kind=kfp`, `# Nq=.. Np=.. Lq=.. Pmax=.. t=..`, then
/// `qIndex,pIndex,q,p,rho` rows.
void dump_density(const State& state, const PhaseGrid& grid, double t, const std::filesystem::path& path);
/// Header `# kind=heat`, `# Nq=.. Lq=.. t=..`, then `qIndex,q,rho` rows.
void dump_density(const HeatState& state, const HeatGrid& grid, const std::filesystem::path& path);

struct DensityDump {
  std::string kind;
  int nq = 0;
  /// 1 for heat dumps.
  int np = 1;
  double lq = 0.0;
  /// 0 for heat dumps.
  double pmax = 0.0;
  double t = 0.0;
  /// nq x np.
  Eigen::ArrayXXd rho;

  /// Midpoint-rule mass recomputed from the dump.
  double mass() const;
};

DensityDump load_density(const std::filesystem::path& path);

}  // namespace relgen
