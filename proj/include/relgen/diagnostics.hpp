#pragma once

#include <optional>

namespace relgen {

/// One time sample of a run. Heat runs have no energy functional: E, e, degL
/// and degM are written as 0 and relEnt is left empty.
struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double S = 0.0;
  double mass = 0.0;
  double dSdt = 0.0;
  double degL = 0.0;
  double degM = 0.0;
  std::optional<double> relEnt;
  double e = 0.0;

  bool operator==(const DiagnosticsRecord&) const = default;
};

}  // namespace relgen
