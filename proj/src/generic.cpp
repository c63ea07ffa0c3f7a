#include "relgen/generic.hpp"

#include <cmath>

namespace relgen {

double log_mean(double a, double b) {
  if (!(a > 0) || !(b > 0)) return 0.0;
  if (a == b) return a;
  const double t = a / b - 1.0;
  if (std::abs(t) < 1e-3) {
    // b t / log(1 + t) with log1p expanded to fifth order.
    const double series = 1.0 - t / 2.0 + t * t / 3.0 - t * t * t / 4.0 + t * t * t * t / 5.0;
    return b / series;
  }
  return (a - b) / std::log(a / b);
}

KineticSystem::KineticSystem(PhaseGrid grid, ModelParams params, Potential potential, Variant variant,
                             Options options)
    : grid_(grid), params_(params), potential_(potential), variant_(variant), options_(options) {
  params_.validate();
  check_variant(variant_, params_);
  if (params_.d != 1) throw InvalidArgument("phase-space solvers require d = 1");

  const int nq = grid_.nq();
  const int np = grid_.np();

  Eigen::ArrayXd kinetic(np);
  for (int j = 0; j < np; ++j) kinetic(j) = kinetic_energy(grid_.p(j), params_);
  Eigen::ArrayXd v(nq);
  for (int i = 0; i < nq; ++i) v(i) = potential_.value(grid_.q(i));

  hamiltonian_.resize(nq, np);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < np; ++j) hamiltonian_(i, j) = relgen::hamiltonian(grid_.q(i), grid_.p(j), params_, potential_);

  // Transport velocities use the same stencils as grad_p / grad_q.
  const GridField kinetic_row = kinetic.transpose();
  const GridField potential_column = v;
  q_velocity_ = grad_p(kinetic_row, grid_).row(0).transpose();
  p_velocity_ = -grad_q(potential_column, grid_).col(0);

  momentum_boltzmann_ = momentum_boltzmann_factor(grid_, params_);
  position_boltzmann_ = position_boltzmann_factor(grid_, params_, potential_);

  const double kinetic_min = kinetic.minCoeff();
  face_diffusion_.resize(np - 1);
  face_boltzmann_.resize(np - 1);
  for (int j = 0; j < np - 1; ++j) {
    const double pf = grid_.p_face(j);
    face_diffusion_(j) = diffusion_coefficient(pf, variant_, params_);
    face_boltzmann_(j) = std::exp(-(kinetic_energy(pf, params_) - kinetic_min) / params_.theta);
  }

  q_face_delta_h_.resize(nq, np);
  for (int i = 0; i < nq; ++i)
    q_face_delta_h_.row(i) = hamiltonian_.row((i + 1) % nq) - hamiltonian_.row(i);
  p_face_delta_h_ = hamiltonian_.rightCols(np - 1) - hamiltonian_.leftCols(np - 1);
}

GridField grad_q(const GridField& f, const PhaseGrid& grid) {
  const int nq = int(f.rows());
  GridField g(f.rows(), f.cols());
  const double inv = 1.0 / (2.0 * grid.hq());
  for (int i = 0; i < nq; ++i) g.row(i) = (f.row((i + 1) % nq) - f.row((i + nq - 1) % nq)) * inv;
  return g;
}

GridField grad_p(const GridField& f, const PhaseGrid& grid) {
  const Eigen::Index np = f.cols();
  GridField g(f.rows(), np);
  const double inv = 1.0 / (2.0 * grid.hp());
  g.middleCols(1, np - 2) = (f.rightCols(np - 2) - f.leftCols(np - 2)) * inv;
  g.col(0) = (f.col(1) - f.col(0)) * inv;
  g.col(np - 1) = (f.col(np - 1) - f.col(np - 2)) * inv;
  return g;
}

GridField div_q(const GridField& f, const PhaseGrid& grid) {
  // The periodic centred difference is skew-adjoint.
  return grad_q(f, grid);
}

GridField div_p(const GridField& f, const PhaseGrid& grid) {
  const Eigen::Index np = f.cols();
  const GridField face = 0.5 * (f.leftCols(np - 1) + f.rightCols(np - 1));
  GridField out = GridField::Zero(f.rows(), np);
  out.leftCols(np - 1) += face / grid.hp();
  out.rightCols(np - 1) -= face / grid.hp();
  return out;
}

double energy_functional(const State& state, const KineticSystem& system) {
  return system.grid().inner(system.hamiltonian(), state.rho) + state.e;
}

double entropy_functional(const State& state, double theta, const PhaseGrid& grid) {
  const GridField& rho = state.rho;
  const GridField rho_log_rho = (rho > 0).select(rho * rho.max(kLogFloor).log(), 0.0);
  return -theta * grid.integrate(rho_log_rho) + state.e;
}

CotangentVector gradient_energy(const State&, const KineticSystem& system) {
  return {system.hamiltonian(), 1.0};
}

CotangentVector gradient_entropy(const State& state, double theta) {
  const Eigen::Index vacuum = (state.rho < kVacuumDensity).count();
  if (2 * vacuum > state.rho.size())
    throw PreconditionError("entropy gradient undefined: more than half of the cells are vacuum");
  return floored_entropy_cotangent(state.rho, theta);
}

CotangentVector floored_entropy_cotangent(const GridField& rho, double theta) {
  return {-theta * (rho.max(kLogFloor).log() + 1.0), 1.0};
}

Tangent apply_poisson(const State& state, const CotangentVector& v, const PhaseGrid& grid) {
  const GridField flux_q = -state.rho * grad_p(v.xi, grid);
  const GridField flux_p = state.rho * grad_q(v.xi, grid);
  return {div_q(flux_q, grid) + div_p(flux_p, grid), 0.0};
}

Tangent apply_dissipative(const State& state, const CotangentVector& v, const KineticSystem& system) {
  const PhaseGrid& grid = system.grid();
  const ModelParams& params = system.params();
  const int nq = grid.nq();
  const int np = grid.np();
  const double hq = grid.hq();
  const double hp = grid.hp();
  const double drift_scale = 1.0 + system.options().drift_perturbation;
  const GridField& rho = state.rho;
  const Eigen::ArrayXd& bq = system.position_boltzmann();
  const Eigen::ArrayXd& bp = system.momentum_boltzmann();

  Tangent out{grid.zeros(), 0.0};
  double energy_exchange = 0.0;  // sum a w g (-Delta H / h)

  auto accumulate = [&](int il, int jl, int ir, int jr, double aw, double delta_h, double h) {
    const double g = (v.xi(ir, jr) - v.xi(il, jl) - v.r * drift_scale * delta_h) / h;
    const double flux = aw * g;
    out.rho(ir, jr) += flux / h;
    out.rho(il, jl) -= flux / h;
    energy_exchange -= flux * drift_scale * delta_h / h;
  };

  if (system.options().upwind_dissipation) {
    for (int j = 0; j < np; ++j) {
      const double a = std::abs(system.q_velocity()(j)) * hq / (2.0 * params.theta);
      if (a == 0.0) continue;
      for (int i = 0; i < nq; ++i) {
        const int ir = (i + 1) % nq;
        const double w = system.q_face_downwind_boltzmann(i, j) * log_mean(rho(i, j) / bq(i), rho(ir, j) / bq(ir));
        accumulate(i, j, ir, j, a * w, system.q_face_delta_h()(i, j), hq);
      }
    }
  }

  for (int i = 0; i < nq; ++i) {
    const double a_num =
        system.options().upwind_dissipation ? std::abs(system.p_velocity()(i)) * hp / (2.0 * params.theta) : 0.0;
    for (int j = 0; j < np - 1; ++j) {
      const double lm = log_mean(rho(i, j) / bp(j), rho(i, j + 1) / bp(j + 1));
      const double aw = lm * (params.gamma * system.face_diffusion()(j) * system.face_boltzmann()(j) +
                              a_num * system.p_face_downwind_boltzmann(i, j));
      accumulate(i, j, i, j + 1, aw, system.p_face_delta_h()(i, j), hp);
    }
  }

  out.e = energy_exchange * grid.cell_volume();
  return out;
}

double pairing(const CotangentVector& v, const Tangent& t, const PhaseGrid& grid) {
  return grid.inner(v.xi, t.rho) + v.r * t.e;
}

double pairing_scale(const CotangentVector& v, const Tangent& t, const PhaseGrid& grid) {
  return (v.xi * t.rho).abs().sum() * grid.cell_volume() + std::abs(v.r * t.e);
}

double poisson_bracket(const State& state, const CotangentVector& v1, const CotangentVector& v2,
                       const PhaseGrid& grid) {
  return pairing(v1, apply_poisson(state, v2, grid), grid);
}

double dissipative_bracket(const State& state, const CotangentVector& v1, const CotangentVector& v2,
                           const KineticSystem& system) {
  return pairing(v1, apply_dissipative(state, v2, system), system.grid());
}

double tangent_norm(const Tangent& t, const PhaseGrid& grid) {
  return std::sqrt(grid.inner(t.rho, t.rho) + t.e * t.e);
}

DegeneracyResiduals degeneracy_residuals(const State& state, const KineticSystem& system) {
  const PhaseGrid& grid = system.grid();
  const CotangentVector de = gradient_energy(state, system);
  const CotangentVector ds = gradient_entropy(state, system.params().theta);
  DegeneracyResiduals out;
  out.poisson_entropy = tangent_norm(apply_poisson(state, ds, grid), grid);
  out.dissipative_energy = tangent_norm(apply_dissipative(state, de, system), grid);
  out.dissipative_energy_scale = tangent_norm(apply_dissipative(state, {de.xi, 0.0}, system), grid) +
                                 tangent_norm(apply_dissipative(state, {grid.zeros(), 1.0}, system), grid);
  return out;
}

Tangent generic_rhs(const State& state, const KineticSystem& system) {
  const Tangent reversible = apply_poisson(state, gradient_energy(state, system), system.grid());
  const Tangent irreversible = apply_dissipative(state, gradient_entropy(state, system.params().theta), system);
  return {reversible.rho + irreversible.rho, reversible.e + irreversible.e};
}

}  // namespace relgen
