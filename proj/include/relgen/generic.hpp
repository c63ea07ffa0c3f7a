#pragma once

// GENERIC building blocks on the (q, p) phase grid: the state z = (rho, e),
// energy and entropy functionals with their derivatives, the Poisson operator
// L and the dissipative operator M, the associated brackets and the
// degeneracy residuals.
//
// Discrete calculus. Two gradients are used:
//  * a cell-centred gradient G (periodic centred difference in q; in p the
//    average of the two adjacent face differences, with the missing boundary
//    face counted as zero). Divergence is -G^T, so L = -G^T rho J G is
//    antisymmetric for any rho, and G annihilates constants (mass is
//    conserved).
//  * face differences (xi_R - xi_L)/h on q faces (periodic) and interior p
//    faces. M is assembled from the quadratic form
//      <v1, M v2> = sum_faces a_f w_f g1_f g2_f |cell|,
//      g_f = (Delta xi - r Delta H)_f / h,
//    with the same Delta H samples in every slot, so M is symmetric, positive
//    semidefinite and M (H, 1) = 0 exactly.
//
// The face weight w_f is the Boltzmann-weighted logarithmic mean
// rhoHat_f * LogMean(rho_L/rhoHat_L, rho_R/rhoHat_R), a second-order face
// density for which w_f * theta * Delta log rho + w_f * Delta H reduces to
// theta * rhoHat_f * Delta(rho/rhoHat); the discrete Maxwellian is therefore an
// exact kernel of M applied to the entropy gradient.
//
// Besides the physical p-diffusion (coefficient gamma * D at p faces), M
// carries an optional first-order numerical dissipation on every face with
// coefficient |v_f| h_f / (2 theta), v_f the transport velocity normal to the
// face. With the downwind Boltzmann factor as rhoHat_f it makes the transport
// flux a donor-cell flux whenever rhoHat is locally flat, which keeps the
// explicit scheme positive on coarse momentum grids without giving up the
// GENERIC structure.

#include <optional>

#include "relgen/maxwellian.hpp"
#include "relgen/model.hpp"
#include "relgen/phase_grid.hpp"

namespace relgen {

struct State {
  GridField rho;
  double e = 0.0;
};

/// Element of the cotangent space: (delta F / delta rho, delta F / delta e).
struct CotangentVector {
  GridField xi;
  double r = 0.0;
};

/// Element of the tangent space (a rate of change of the state).
struct Tangent {
  GridField rho;
  double e = 0.0;
};

/// Density floor applied inside log(rho).
inline constexpr double kLogFloor = 1e-300;
/// Cells below this density are treated as vacuum by gradient_entropy.
inline constexpr double kVacuumDensity = 1e-30;

/// Logarithmic mean (a - b)/(log a - log b), with LogMean(a, a) = a and
/// LogMean(0, b) = 0.
double log_mean(double a, double b);

/// Discretisation of one kinetic model on a phase grid. Immutable; holds the
/// Hamiltonian samples and the face tables used by both operators and the
/// flux-form right-hand side.
class KineticSystem {
 public:
  struct Options {
    /// Add the GENERIC-compatible donor-cell dissipation to M.
    bool upwind_dissipation = true;
    /// Test hook: scale the Delta H samples used in the drift column of M by
    /// (1 + drift_perturbation). Breaks M * dE = 0 on purpose.
    double drift_perturbation = 0.0;
  };

  KineticSystem(PhaseGrid grid, ModelParams params, Potential potential, Variant variant)
      : KineticSystem(grid, params, potential, variant, Options{}) {}
  KineticSystem(PhaseGrid grid, ModelParams params, Potential potential, Variant variant, Options options);

  const PhaseGrid& grid() const noexcept { return grid_; }
  const ModelParams& params() const noexcept { return params_; }
  const Potential& potential() const noexcept { return potential_; }
  Variant variant() const noexcept { return variant_; }
  const Options& options() const noexcept { return options_; }

  /// H(q_i, p_j) at cell centres.
  const GridField& hamiltonian() const noexcept { return hamiltonian_; }
  /// Transport velocity along q, (G_p H)_j, one value per momentum column.
  const Eigen::ArrayXd& q_velocity() const noexcept { return q_velocity_; }
  /// Transport velocity along p, -(G_q H)_i, one value per position row.
  const Eigen::ArrayXd& p_velocity() const noexcept { return p_velocity_; }
  /// exp(-(T(p_j) - min T)/theta).
  const Eigen::ArrayXd& momentum_boltzmann() const noexcept { return momentum_boltzmann_; }
  /// exp(-(V(q_i) - min V)/theta).
  const Eigen::ArrayXd& position_boltzmann() const noexcept { return position_boltzmann_; }
  /// Diffusion coefficient D(p) at the np-1 interior momentum faces.
  const Eigen::ArrayXd& face_diffusion() const noexcept { return face_diffusion_; }
  /// Face-centred Boltzmann factor exp(-(T(p_f) - min T)/theta) at interior p faces.
  const Eigen::ArrayXd& face_boltzmann() const noexcept { return face_boltzmann_; }
  /// Delta H across q faces (i, i+1 mod nq): nq x np.
  const GridField& q_face_delta_h() const noexcept { return q_face_delta_h_; }
  /// Delta H across interior p faces (j, j+1): nq x (np-1).
  const GridField& p_face_delta_h() const noexcept { return p_face_delta_h_; }

  /// Boltzmann factor of the downwind cell of q face (i, i+1) in column j.
  double q_face_downwind_boltzmann(int i, int j) const noexcept {
    const int down = q_velocity_(j) > 0 ? (i + 1) % grid_.nq() : i;
    return position_boltzmann_(down);
  }
  /// Boltzmann factor of the downwind cell of p face (j, j+1) in row i.
  double p_face_downwind_boltzmann(int i, int j) const noexcept {
    return momentum_boltzmann_(p_velocity_(i) > 0 ? j + 1 : j);
  }

 private:
  PhaseGrid grid_;
  ModelParams params_;
  Potential potential_;
  Variant variant_;
  Options options_;

  GridField hamiltonian_;
  Eigen::ArrayXd q_velocity_;
  Eigen::ArrayXd p_velocity_;
  Eigen::ArrayXd momentum_boltzmann_;
  Eigen::ArrayXd position_boltzmann_;
  Eigen::ArrayXd face_diffusion_;
  Eigen::ArrayXd face_boltzmann_;
  GridField q_face_delta_h_;
  GridField p_face_delta_h_;
};

// Discrete calculus.

/// Cell-centred gradient components.
GridField grad_q(const GridField& f, const PhaseGrid& grid);
GridField grad_p(const GridField& f, const PhaseGrid& grid);
/// Exact negative adjoints of grad_q / grad_p under PhaseGrid::inner.
GridField div_q(const GridField& f, const PhaseGrid& grid);
GridField div_p(const GridField& f, const PhaseGrid& grid);

// Functionals.

double energy_functional(const State& state, const KineticSystem& system);
/// -theta * sum rho log rho |cell| + e with 0 log 0 = 0.
double entropy_functional(const State& state, double theta, const PhaseGrid& grid);

CotangentVector gradient_energy(const State& state, const KineticSystem& system);
/// (-theta (log rho + 1), 1). Throws PreconditionError when more than half
/// the cells are below kVacuumDensity.
CotangentVector gradient_entropy(const State& state, double theta);
/// The same cotangent with the log floor only, for diagnostics of nearly
/// empty states.
CotangentVector floored_entropy_cotangent(const GridField& rho, double theta);

// Operators and brackets.

Tangent apply_poisson(const State& state, const CotangentVector& v, const PhaseGrid& grid);
Tangent apply_dissipative(const State& state, const CotangentVector& v, const KineticSystem& system);

/// Pairing <v, t> = sum xi * rho_t |cell| + r * e_t.
double pairing(const CotangentVector& v, const Tangent& t, const PhaseGrid& grid);
/// Sum of absolute values of the terms of `pairing`, the natural round-off
/// scale of that sum.
double pairing_scale(const CotangentVector& v, const Tangent& t, const PhaseGrid& grid);

double poisson_bracket(const State& state, const CotangentVector& v1, const CotangentVector& v2,
                       const PhaseGrid& grid);
double dissipative_bracket(const State& state, const CotangentVector& v1, const CotangentVector& v2,
                           const KineticSystem& system);

/// Grid norm of a tangent: sqrt(sum rho^2 |cell| + e^2).
double tangent_norm(const Tangent& t, const PhaseGrid& grid);

struct DegeneracyResiduals {
  double poisson_entropy = 0.0;    ///< |L dS|
  double dissipative_energy = 0.0; ///< |M dE|
  /// |M (H, 0)| + |M (0, 1)|: size of the terms that cancel in M dE.
  double dissipative_energy_scale = 0.0;
};

DegeneracyResiduals degeneracy_residuals(const State& state, const KineticSystem& system);

/// L dE + M dS assembled from the operators.
Tangent generic_rhs(const State& state, const KineticSystem& system);

}  // namespace relgen
