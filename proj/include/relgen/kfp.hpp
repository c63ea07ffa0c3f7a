#pragma once

// Kinetic Fokker-Planck solver on the (q, p) grid for the DMR, DH and
// classical (Kramers) variants of
//   d_t rho = div(rho J grad H) + gamma div_p[ D (theta grad_p rho + rho grad_p H) ],
//   d_t e   = -d/dt int H rho,
// integrated with RK4 jointly in (rho, e).
//
// kfp_rhs is written directly in flux form and is independent of the
// operator path generic_rhs = L dE + M dS; the two agree to round-off on
// positive states, which is what the dual-assembly check measures.

#include <functional>
#include <optional>
#include <vector>

#include "relgen/diagnostics.hpp"
#include "relgen/generic.hpp"

namespace relgen {

struct KfpInit {
  enum class Kind { Maxwellian, ShiftedMaxwellian, Gaussian, Uniform };
  Kind kind = Kind::Gaussian;
  double q0 = 0.0;
  double p0 = 0.0;
  double sigma_q = 1.0;
  double sigma_p = 1.0;
};

struct KfpConfig {
  PhaseGrid grid{64, 64, 16.0, 34.0};
  ModelParams params{.c = 1.0};
  Potential potential = Potential::zero();
  Variant variant = Variant::DH;
  KineticSystem::Options options;
  /// Non-positive selects the stability bound. The step is shrunk so that
  /// t_final is hit exactly.
  double dt = 0.0;
  double t_final = 1.0;
  int record_every = 10;
  KfpInit init;

  KineticSystem system() const { return KineticSystem(grid, params, potential, variant, options); }
};

/// Mass-1 initial state with e = 0. ShiftedMaxwellian is
/// exp(-(V(q) + T(p - p0))/theta); Gaussian is centred at (q0, p0).
State make_kfp_initial_state(const KfpInit& init, const KineticSystem& system);

/// Flux-form right-hand side (density tendency, excess tendency).
Tangent kfp_rhs(const State& state, const KineticSystem& system);

/// The dissipative fluxes alone (physical diffusion plus the donor-cell part).
Tangent kfp_dissipative_rhs(const State& state, const KineticSystem& system);
/// Grid norm of the same assembly with every flux taken in absolute value and
/// Delta u replaced by |u_L| + |u_R|: the scale against which a vanishing
/// dissipative tendency is judged.
double kfp_dissipative_scale(const State& state, const KineticSystem& system);

/// de/dt from the discrete dissipative fluxes: minus the work they do against
/// Delta H, so that de/dt + d/dt sum H rho |cell| = 0 to round-off.
double excess_rhs(const State& state, const KineticSystem& system);

/// Pointwise quadrature gamma sum [D grad_p H . grad_p H - theta div_p(D grad_p H)] rho |cell|
/// of the continuum excess rate. Differs from excess_rhs by the discretisation error.
double excess_rate_quadrature(const State& state, const KineticSystem& system);

/// min(0.4 h / v_eff, 0.25 hp^2 / (gamma theta D_eff)) over all faces, see kfp.cpp.
double stable_kfp_dt(const KineticSystem& system);

/// One RK4 step. Throws StabilityError beyond stable_kfp_dt and
/// PositivityError when a density cell drops below -1e-12.
State step_kfp(const State& state, const KineticSystem& system, double dt);

/// sum rho log(rho / rho_inf) |cell| with 0 log 0 = 0. rho_inf must be positive.
double relative_entropy(const GridField& rho, const GridField& rho_inf, const PhaseGrid& grid);

double l1_distance(const GridField& a, const GridField& b, const PhaseGrid& grid);

/// Diagnostics of one state. dSdt = <dS, kfp_rhs>. The entropy cotangent is
/// floored, not checked, so nearly empty states still produce a record.
DiagnosticsRecord kfp_diagnostics(const State& state, double t, const KineticSystem& system,
                                  const GridField* rho_inf = nullptr);

using KfpObserver = std::function<void(const State&, const DiagnosticsRecord&, long step)>;

struct KfpRunResult {
  std::vector<DiagnosticsRecord> records;
  State initial_state;
  State final_state;
  long steps = 0;
  double dt = 0.0;
  /// Largest d/dt sum H rho |cell| seen at any recorded sample.
  double max_energy_production = 0.0;
};

/// Fixed-horizon run. relEnt is recorded when the momentum window resolves the
/// Maxwellian tail.
KfpRunResult run_kfp(const KfpConfig& cfg, const KfpObserver& observer = {});

struct StationarityResult {
  std::vector<DiagnosticsRecord> records;
  State final_state;
  GridField maxwellian;
  bool converged = false;
  double t_end = 0.0;
  double l1_initial = 0.0;
  double l1_final = 0.0;
  long steps = 0;
  double initial_energy = 0.0;
  /// e_inf = E0 - sum H rho_inf |cell|.
  double predicted_excess = 0.0;
};

inline constexpr double kStationarityTolerance = 1e-3;

/// Integrates until the L1 distance to the Maxwellian drops below `tolerance`
/// or t_final is reached. Throws ConvergenceError when t_final is reached with
/// the distance still above 10 * tolerance.
StationarityResult run_to_stationarity(const KfpConfig& cfg, double tolerance = kStationarityTolerance,
                                       const KfpObserver& observer = {});

}  // namespace relgen
