#include "relgen/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace relgen {

namespace {

constexpr double kTinyDensity = 1e-300;

int next(int i, int n) { return (i + 1) % n; }
int prev(int i, int n) { return (i + n - 1) % n; }

Eigen::ArrayXd face_mean(const Eigen::ArrayXd& rho) {
  const int n = int(rho.size());
  Eigen::ArrayXd bar(n);
  for (int i = 0; i < n; ++i) bar(i) = 0.5 * (rho(i) + rho(next(i, n)));
  return bar;
}

Eigen::ArrayXd face_difference(const Eigen::ArrayXd& f, double h) {
  const int n = int(f.size());
  Eigen::ArrayXd g(n);
  for (int i = 0; i < n; ++i) g(i) = (f(next(i, n)) - f(i)) / h;
  return g;
}

Eigen::ArrayXd face_divergence(const Eigen::ArrayXd& flux, double h) {
  const int n = int(flux.size());
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out(i) = (flux(i) - flux(prev(i, n))) / h;
  return out;
}

void check_state(const HeatState& state, const HeatGrid& grid) {
  if (state.rho.size() != grid.n()) throw InvalidArgument("heat state size does not match the grid");
  if (!state.rho.allFinite()) throw InvalidArgument("heat density has non-finite entries");
}

}  // namespace

double dissipation_potential(const HeatState& state, const Eigen::ArrayXd& xi, const HeatGrid& grid,
                             const ModelParams& params) {
  check_state(state, grid);
  if (xi.size() != grid.n()) throw InvalidArgument("xi size does not match the grid");
  const int n = grid.n();
  const Eigen::ArrayXd face = face_difference(xi, grid.h());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cell_gradient = 0.5 * (face(prev(i, n)) + face(i));
    sum += state.rho(i) * phi_star(cell_gradient, params);
  }
  return params.nu * sum * grid.h();
}

Eigen::ArrayXd heat_face_flux(const Eigen::ArrayXd& rho, const HeatGrid& grid, const ModelParams& params) {
  const Eigen::ArrayXd g = face_difference(rho, grid.h());
  if (params.classical()) return params.nu * g;
  const Eigen::ArrayXd bar = face_mean(rho);
  const double ratio = params.nu / params.c;
  Eigen::ArrayXd flux(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double denom = std::hypot(bar(i), ratio * g(i));
    // bar / denom <= 1 first: the product bar * g underflows near a vacuum front.
    flux(i) = denom > 0 ? params.nu * g(i) * (bar(i) / denom) : 0.0;
  }
  return flux;
}

Eigen::ArrayXd heat_rhs(const HeatState& state, const HeatGrid& grid, const ModelParams& params) {
  check_state(state, grid);
  return face_divergence(heat_face_flux(state.rho, grid, params), grid.h());
}

Eigen::ArrayXd entropy_face_gradient(const Eigen::ArrayXd& rho, const HeatGrid& grid) {
  const Eigen::ArrayXd g = face_difference(rho, grid.h());
  const Eigen::ArrayXd bar = face_mean(rho);
  return (bar > 0).select(-g / bar.max(kTinyDensity), 0.0);
}

Eigen::ArrayXd dissipation_potential_derivative(const Eigen::ArrayXd& rho, const Eigen::ArrayXd& face_gradient,
                                                const HeatGrid& grid, const ModelParams& params) {
  const Eigen::ArrayXd bar = face_mean(rho);
  Eigen::ArrayXd flux(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) flux(i) = bar(i) * grad_phi_star(face_gradient(i), params);
  return -params.nu * face_divergence(flux, grid.h());
}

Eigen::ArrayXd generalized_generic_heat_rhs(const HeatState& state, const HeatGrid& grid,
                                            const ModelParams& params) {
  check_state(state, grid);
  return dissipation_potential_derivative(state.rho, entropy_face_gradient(state.rho, grid), grid, params);
}

double stable_heat_dt(const HeatGrid& grid, const ModelParams& params) {
  const double h = grid.h();
  double dt = h * h / params.nu;
  if (!params.classical()) dt = std::min(dt, h / params.c);
  return 0.25 * dt;
}

HeatState step_heat(const HeatState& state, double dt, const HeatGrid& grid, const ModelParams& params) {
  if (!(dt >= 0) || !std::isfinite(dt)) throw InvalidArgument("time step must be finite and >= 0");
  const double bound = stable_heat_dt(grid, params);
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "heat step dt=" << dt << " exceeds the stability bound " << bound;
    throw StabilityError(msg.str());
  }
  HeatState out{state.rho + dt * heat_rhs(state, grid, params), state.t + dt};
  const double low = out.rho.minCoeff();
  if (low < -1e-14) {
    std::ostringstream msg;
    msg << "heat density went negative (" << low << ") at t=" << out.t;
    throw PositivityError(msg.str());
  }
  return out;
}

double support_radius(const HeatState& state, const HeatGrid& grid, double threshold) {
  if (!(threshold > 0)) throw InvalidArgument("support threshold must be positive");
  int lo = -1, hi = -1;
  for (int i = 0; i < grid.n(); ++i) {
    if (state.rho(i) > threshold) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (lo < 0) return 0.0;
  return 0.5 * (hi - lo + 1) * grid.h();
}

double boltzmann_entropy(const HeatState& state, const HeatGrid& grid) {
  const Eigen::ArrayXd& rho = state.rho;
  const Eigen::ArrayXd terms = (rho > 0).select(rho * rho.max(kTinyDensity).log(), 0.0);
  return -terms.sum() * grid.h();
}

double heat_mass(const HeatState& state, const HeatGrid& grid) { return state.rho.sum() * grid.h(); }

HeatState make_heat_initial_state(const HeatInit& init, const HeatGrid& grid) {
  const int n = grid.n();
  Eigen::ArrayXd rho(n);
  if (init.kind != HeatInit::Kind::Uniform && !(init.width > 0))
    throw InvalidArgument("initial-condition width must be positive");
  for (int i = 0; i < n; ++i) {
    const double dx = grid.x(i) - init.center;
    switch (init.kind) {
      case HeatInit::Kind::Uniform: rho(i) = 1.0; break;
      case HeatInit::Kind::Gaussian: rho(i) = std::exp(-0.5 * dx * dx / (init.width * init.width)); break;
      case HeatInit::Kind::Bump: {
        const double c = std::cos(0.5 * std::numbers::pi * dx / init.width);
        rho(i) = std::abs(dx) < init.width ? c * c : 0.0;
        break;
      }
    }
  }
  const double mass = rho.sum() * grid.h();
  if (!(mass > 0)) throw InvalidArgument("initial condition has no mass on the grid (bump narrower than a cell?)");
  return {rho / mass, 0.0};
}

DiagnosticsRecord heat_diagnostics(const HeatState& state, const HeatGrid& grid, const ModelParams& params) {
  DiagnosticsRecord r;
  r.t = state.t;
  r.S = boltzmann_entropy(state, grid);
  r.mass = heat_mass(state, grid);
  const Eigen::ArrayXd ds = -(state.rho.max(kTinyDensity).log() + 1.0);
  r.dSdt = (ds * heat_rhs(state, grid, params)).sum() * grid.h();
  return r;
}

HeatRunResult run_heat(const HeatRunConfig& cfg, const HeatObserver& observer) {
  cfg.params.validate();
  if (!(cfg.t_final > 0)) throw InvalidArgument("final time must be positive");
  if (cfg.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  const HeatGrid& grid = cfg.grid;
  const ModelParams& params = cfg.params;

  const double bound = stable_heat_dt(grid, params);
  const double requested = cfg.dt > 0 ? cfg.dt : bound;
  if (requested > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "configured dt=" << requested << " exceeds the stability bound " << bound;
    throw StabilityError(msg.str());
  }
  const long steps = std::max(1L, long(std::ceil(cfg.t_final / requested - 1e-9)));

  HeatRunResult result;
  result.dt = cfg.t_final / double(steps);
  result.steps = steps;
  result.initial_state = make_heat_initial_state(cfg.init, grid);
  HeatState state = result.initial_state;
  result.min_entropy_increment = std::numeric_limits<double>::infinity();

  auto record = [&](long step) {
    const DiagnosticsRecord r = heat_diagnostics(state, grid, params);
    result.records.push_back(r);
    if (observer) observer(state, r, step);
  };
  record(0);

  double entropy = boltzmann_entropy(state, grid);
  for (long step = 1; step <= steps; ++step) {
    if (!params.classical()) {
      const Eigen::ArrayXd flux = heat_face_flux(state.rho, grid, params);
      const Eigen::ArrayXd bar = face_mean(state.rho);
      for (Eigen::Index f = 0; f < flux.size(); ++f) {
        if (bar(f) > 0) result.max_flux_ratio = std::max(result.max_flux_ratio, std::abs(flux(f)) / (params.c * bar(f)));
      }
    }
    state = step_heat(state, result.dt, grid, params);
    if (step == steps) state.t = cfg.t_final;
    const double s = boltzmann_entropy(state, grid);
    result.min_entropy_increment = std::min(result.min_entropy_increment, s - entropy);
    entropy = s;
    if (step % cfg.record_every == 0 || step == steps) record(step);
  }
  result.final_state = state;
  return result;
}

}  // namespace relgen
