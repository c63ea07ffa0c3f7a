#include "relgen/kfp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relgen {

State make_kfp_initial_state(const KfpInit& init, const KineticSystem& system) {
  const PhaseGrid& grid = system.grid();
  const ModelParams& params = system.params();
  if (init.kind == KfpInit::Kind::Maxwellian) return {maxwellian(grid, params, system.potential()).density, 0.0};
  if (init.kind == KfpInit::Kind::Gaussian && !(init.sigma_q > 0 && init.sigma_p > 0))
    throw InvalidArgument("Gaussian initial condition needs positive widths");

  const Eigen::ArrayXd v_weight = system.position_boltzmann();
  GridField rho(grid.nq(), grid.np());
  for (int i = 0; i < grid.nq(); ++i) {
    for (int j = 0; j < grid.np(); ++j) {
      switch (init.kind) {
        case KfpInit::Kind::ShiftedMaxwellian:
          rho(i, j) = v_weight(i) * std::exp(-kinetic_energy(grid.p(j) - init.p0, params) / params.theta);
          break;
        case KfpInit::Kind::Gaussian: {
          const double zq = (grid.q(i) - init.q0) / init.sigma_q;
          const double zp = (grid.p(j) - init.p0) / init.sigma_p;
          rho(i, j) = std::exp(-0.5 * (zq * zq + zp * zp));
          break;
        }
        case KfpInit::Kind::Uniform: rho(i, j) = 1.0; break;
        case KfpInit::Kind::Maxwellian: break;
      }
    }
  }
  const double mass = grid.integrate(rho);
  if (!(mass > 0) || !std::isfinite(mass)) throw InvalidArgument("initial condition has no mass on the grid");
  return {rho / mass, 0.0};
}

namespace {

enum class FluxMode {
  Full,
  DissipativeOnly,
  /// Dissipative fluxes with Delta u replaced by |u_R| + |u_L| and summed in
  /// absolute value: the round-off scale of DissipativeOnly.
  DissipativeMagnitude,
};

// Face fluxes F (positive from the left/lower cell to the right/upper cell):
//   q faces: v rhoBar - (|v|/2) rhoHat_down Delta u
//   p faces: v rhoBar - (|v|/2) rhoHat_down Delta u - gamma theta D_f rhoHat_f Delta u / hp
// with u = rho / rhoHat the density relative to the Boltzmann factor along the
// face direction. The terms after the centred transport are the dissipative
// fluxes; their work against Delta H is the excess-energy rate.
Tangent assemble(const State& state, const KineticSystem& system, FluxMode mode) {
  const PhaseGrid& grid = system.grid();
  const ModelParams& params = system.params();
  const int nq = grid.nq();
  const int np = grid.np();
  const double hq = grid.hq();
  const double hp = grid.hp();
  const bool upwind = system.options().upwind_dissipation;
  const bool transport = mode == FluxMode::Full;
  const bool magnitude = mode == FluxMode::DissipativeMagnitude;
  const GridField& rho = state.rho;
  const Eigen::ArrayXd& bq = system.position_boltzmann();
  const Eigen::ArrayXd& bp = system.momentum_boltzmann();
  if (rho.rows() != nq || rho.cols() != np) throw InvalidArgument("state does not match the grid");

  auto difference = [magnitude](double left, double right) {
    return magnitude ? std::abs(right) + std::abs(left) : right - left;
  };

  GridField out = grid.zeros();
  double work = 0.0;
  auto deposit = [&](int il, int jl, int ir, int jr, double flux, double h) {
    if (magnitude) {
      out(ir, jr) += std::abs(flux) / h;
      out(il, jl) += std::abs(flux) / h;
    } else {
      out(ir, jr) += flux / h;
      out(il, jl) -= flux / h;
    }
  };

  for (int j = 0; j < np; ++j) {
    const double v = system.q_velocity()(j);
    for (int i = 0; i < nq; ++i) {
      const int ir = (i + 1) % nq;
      double dissipative = 0.0;
      if (upwind) {
        const double du = difference(rho(i, j) / bq(i), rho(ir, j) / bq(ir));
        dissipative = -0.5 * std::abs(v) * system.q_face_downwind_boltzmann(i, j) * du;
      }
      const double flux = (transport ? 0.5 * v * (rho(i, j) + rho(ir, j)) : 0.0) + dissipative;
      deposit(i, j, ir, j, flux, hq);
      work += dissipative * system.q_face_delta_h()(i, j) / hq;
    }
  }

  const double diffusion = params.gamma * params.theta / hp;
  for (int i = 0; i < nq; ++i) {
    const double v = system.p_velocity()(i);
    for (int j = 0; j < np - 1; ++j) {
      const double du = difference(rho(i, j) / bp(j), rho(i, j + 1) / bp(j + 1));
      double dissipative = -diffusion * system.face_diffusion()(j) * system.face_boltzmann()(j) * du;
      if (upwind) dissipative -= 0.5 * std::abs(v) * system.p_face_downwind_boltzmann(i, j) * du;
      const double flux = (transport ? 0.5 * v * (rho(i, j) + rho(i, j + 1)) : 0.0) + dissipative;
      deposit(i, j, i, j + 1, flux, hp);
      work += dissipative * system.p_face_delta_h()(i, j) / hp;
    }
  }
  return {out, -work * grid.cell_volume()};
}

}  // namespace

Tangent kfp_rhs(const State& state, const KineticSystem& system) {
  return assemble(state, system, FluxMode::Full);
}

Tangent kfp_dissipative_rhs(const State& state, const KineticSystem& system) {
  return assemble(state, system, FluxMode::DissipativeOnly);
}

double kfp_dissipative_scale(const State& state, const KineticSystem& system) {
  return system.grid().norm(assemble(state, system, FluxMode::DissipativeMagnitude).rho);
}

double excess_rhs(const State& state, const KineticSystem& system) { return kfp_rhs(state, system).e; }

double excess_rate_quadrature(const State& state, const KineticSystem& system) {
  const PhaseGrid& grid = system.grid();
  const ModelParams& params = system.params();
  double sum = 0.0;
  for (int j = 0; j < grid.np(); ++j) {
    const double p = grid.p(j);
    const double rate = mobility_drift(p, system.variant(), params) * grad_p_hamiltonian(p, params) -
                        params.theta * div_mobility_drift(p, system.variant(), params);
    sum += rate * state.rho.col(j).sum();
  }
  return params.gamma * sum * grid.cell_volume();
}

// Effective speeds account for the donor-cell dissipation, whose face weight
// uses the downwind Boltzmann factor and can exceed the upwind one; effective
// diffusion accounts for the face-centred Boltzmann factor exceeding the
// cell values it divides.
double stable_kfp_dt(const KineticSystem& system) {
  const PhaseGrid& grid = system.grid();
  const ModelParams& params = system.params();
  const bool upwind = system.options().upwind_dissipation;
  const Eigen::ArrayXd& bq = system.position_boltzmann();
  const Eigen::ArrayXd& bp = system.momentum_boltzmann();
  const int nq = grid.nq();
  const int np = grid.np();
  double dt = std::numeric_limits<double>::infinity();

  auto transport_limit = [&](double v, double b_left, double b_right, double h) {
    if (v == 0.0) return;
    double speed = std::abs(v);
    if (upwind) {
      const double down = v > 0 ? b_right : b_left;
      const double up = v > 0 ? b_left : b_right;
      speed *= std::max(1.0, 0.5 * (1.0 + down / up));
    }
    dt = std::min(dt, 0.4 * h / speed);
  };

  for (int j = 0; j < np; ++j)
    for (int i = 0; i < nq; ++i) transport_limit(system.q_velocity()(j), bq(i), bq((i + 1) % nq), grid.hq());
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < np - 1; ++j) transport_limit(system.p_velocity()(i), bp(j), bp(j + 1), grid.hp());

  double d_max = 0.0;
  for (int j = 0; j < np - 1; ++j) {
    const double amplification =
        std::max({1.0, system.face_boltzmann()(j) / bp(j), system.face_boltzmann()(j) / bp(j + 1)});
    d_max = std::max(d_max, system.face_diffusion()(j) * amplification);
  }
  if (d_max > 0) dt = std::min(dt, 0.25 * grid.hp() * grid.hp() / (params.gamma * params.theta * d_max));
  return dt;
}

State step_kfp(const State& state, const KineticSystem& system, double dt) {
  if (!(dt >= 0) || !std::isfinite(dt)) throw InvalidArgument("time step must be finite and >= 0");
  const double bound = stable_kfp_dt(system);
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "kinetic step dt=" << dt << " exceeds the stability bound " << bound;
    throw StabilityError(msg.str());
  }
  if (dt == 0.0) return state;

  auto advance = [&](const State& base, const Tangent& k, double h) {
    return State{base.rho + h * k.rho, base.e + h * k.e};
  };
  const Tangent k1 = kfp_rhs(state, system);
  const Tangent k2 = kfp_rhs(advance(state, k1, 0.5 * dt), system);
  const Tangent k3 = kfp_rhs(advance(state, k2, 0.5 * dt), system);
  const Tangent k4 = kfp_rhs(advance(state, k3, dt), system);
  State out{state.rho + (dt / 6.0) * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho),
            state.e + (dt / 6.0) * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e)};

  const double low = out.rho.minCoeff();
  if (low < -1e-12) {
    std::ostringstream msg;
    msg << "kinetic density went negative (" << low << ")";
    throw PositivityError(msg.str());
  }
  return out;
}

double relative_entropy(const GridField& rho, const GridField& rho_inf, const PhaseGrid& grid) {
  if (!(rho_inf.minCoeff() > 0)) throw PreconditionError("relative entropy needs a positive reference density");
  const GridField terms = (rho > 0).select(rho * (rho.max(kLogFloor) / rho_inf).log(), 0.0);
  return grid.integrate(terms);
}

double l1_distance(const GridField& a, const GridField& b, const PhaseGrid& grid) {
  return grid.integrate((a - b).abs());
}

DiagnosticsRecord kfp_diagnostics(const State& state, double t, const KineticSystem& system,
                                  const GridField* rho_inf) {
  const PhaseGrid& grid = system.grid();
  const double theta = system.params().theta;
  const CotangentVector ds = floored_entropy_cotangent(state.rho, theta);
  const CotangentVector de = gradient_energy(state, system);

  DiagnosticsRecord r;
  r.t = t;
  r.E = energy_functional(state, system);
  r.S = entropy_functional(state, theta, grid);
  r.mass = grid.integrate(state.rho);
  r.dSdt = pairing(ds, kfp_rhs(state, system), grid);
  r.degL = tangent_norm(apply_poisson(state, ds, grid), grid);
  r.degM = tangent_norm(apply_dissipative(state, de, system), grid);
  if (rho_inf) r.relEnt = relative_entropy(state.rho, *rho_inf, grid);
  r.e = state.e;
  return r;
}

namespace {

struct StepPlan {
  long steps;
  double dt;
};

StepPlan plan_steps(const KfpConfig& cfg, const KineticSystem& system) {
  if (!(cfg.t_final > 0) || !std::isfinite(cfg.t_final)) throw InvalidArgument("final time must be positive");
  if (cfg.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  const double bound = stable_kfp_dt(system);
  const double requested = cfg.dt > 0 ? cfg.dt : bound;
  if (requested > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "configured dt=" << requested << " exceeds the stability bound " << bound;
    throw StabilityError(msg.str());
  }
  const long steps = std::max(1L, long(std::ceil(cfg.t_final / requested - 1e-9)));
  return {steps, cfg.t_final / double(steps)};
}

std::optional<GridField> try_maxwellian(const KineticSystem& system) {
  try {
    return maxwellian(system.grid(), system.params(), system.potential()).density;
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

}  // namespace

KfpRunResult run_kfp(const KfpConfig& cfg, const KfpObserver& observer) {
  const KineticSystem system = cfg.system();
  const StepPlan plan = plan_steps(cfg, system);
  const std::optional<GridField> rho_inf = try_maxwellian(system);

  KfpRunResult result;
  result.steps = plan.steps;
  result.dt = plan.dt;
  result.initial_state = make_kfp_initial_state(cfg.init, system);
  result.max_energy_production = -std::numeric_limits<double>::infinity();
  State state = result.initial_state;

  auto record = [&](long step, double t) {
    const DiagnosticsRecord r = kfp_diagnostics(state, t, system, rho_inf ? &*rho_inf : nullptr);
    const double production = system.grid().inner(system.hamiltonian(), kfp_rhs(state, system).rho);
    result.max_energy_production = std::max(result.max_energy_production, production);
    result.records.push_back(r);
    if (observer) observer(state, r, step);
  };

  record(0, 0.0);
  for (long step = 1; step <= plan.steps; ++step) {
    state = step_kfp(state, system, plan.dt);
    if (step % cfg.record_every == 0 || step == plan.steps)
      record(step, step == plan.steps ? cfg.t_final : double(step) * plan.dt);
  }
  result.final_state = state;
  return result;
}

StationarityResult run_to_stationarity(const KfpConfig& cfg, double tolerance, const KfpObserver& observer) {
  if (!(tolerance > 0)) throw InvalidArgument("stationarity tolerance must be positive");
  const KineticSystem system = cfg.system();
  const PhaseGrid& grid = system.grid();
  const StepPlan plan = plan_steps(cfg, system);

  StationarityResult result;
  result.maxwellian = maxwellian(grid, system.params(), system.potential()).density;
  State state = make_kfp_initial_state(cfg.init, system);
  result.initial_energy = energy_functional(state, system);
  result.predicted_excess = result.initial_energy - grid.inner(system.hamiltonian(), result.maxwellian);

  auto record = [&](long step, double t) {
    const DiagnosticsRecord r = kfp_diagnostics(state, t, system, &result.maxwellian);
    result.records.push_back(r);
    if (observer) observer(state, r, step);
  };

  double l1 = l1_distance(state.rho, result.maxwellian, grid);
  result.l1_initial = l1;
  double t = 0.0;
  long step = 0;
  record(0, 0.0);
  while (l1 > tolerance && step < plan.steps) {
    state = step_kfp(state, system, plan.dt);
    ++step;
    t = step == plan.steps ? cfg.t_final : double(step) * plan.dt;
    l1 = l1_distance(state.rho, result.maxwellian, grid);
    if (step % cfg.record_every == 0 || l1 <= tolerance || step == plan.steps) record(step, t);
  }

  result.final_state = state;
  result.converged = l1 <= tolerance;
  result.t_end = t;
  result.l1_final = l1;
  result.steps = step;
  if (!result.converged && l1 > 10.0 * tolerance) {
    std::ostringstream msg;
    msg << "no convergence to the Maxwellian by t=" << t << ": L1 distance " << l1 << " > 10 x " << tolerance;
    throw ConvergenceError(msg.str());
  }
  return result;
}

}  // namespace relgen
