#pragma once

#include "relgen/model.hpp"
#include "relgen/phase_grid.hpp"

namespace relgen {

/// Boltzmann factors of the separable Hamiltonian H = mc^2 + T(p) + V(q):
/// exp(-(T(p_j) - min T)/theta) and exp(-(V(q_i) - min V)/theta). Their outer
/// product is exp(-(H - min H)/theta) on the grid.
Eigen::ArrayXd momentum_boltzmann_factor(const PhaseGrid& grid, const ModelParams& params);
Eigen::ArrayXd position_boltzmann_factor(const PhaseGrid& grid, const ModelParams& params,
                                         const Potential& potential);

/// Relative tail value exp(-(H(q, Pmax) - H(q, 0))/theta) of the momentum window.
double momentum_tail_ratio(double pmax, const ModelParams& params);

/// Largest admissible relative Maxwellian value at the momentum cutoff.
inline constexpr double kMaxwellianTailTolerance = 1e-14;

struct MaxwellianResult {
  GridField density;
  /// Quadrature normaliser of exp(-H/theta) (carries the factor exp(-min H/theta)
  /// only through `log_partition`, which stays finite for large c).
  double log_partition = 0.0;
};

/// rho_inf = exp(-H/theta)/Z at cell centres with Z from the grid's own
/// midpoint quadrature, so the discrete mass is 1 to round-off.
/// Throws PreconditionError when the momentum window truncates the tail above
/// kMaxwellianTailTolerance.
MaxwellianResult maxwellian(const PhaseGrid& grid, const ModelParams& params, const Potential& potential);

}  // namespace relgen
