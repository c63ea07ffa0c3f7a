#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>

#include "relgen/generic.hpp"
#include "relgen/splitmix64.hpp"

namespace relgen::testing {

/// Positive density exp(U(-1, 1)) per cell, normalised to mass 1.
inline GridField random_density(SplitMix64& rng, const PhaseGrid& grid) {
  GridField rho(grid.nq(), grid.np());
  for (Eigen::Index k = 0; k < rho.size(); ++k) rho(k) = std::exp(rng.uniform(-1.0, 1.0));
  return rho / grid.integrate(rho);
}

inline CotangentVector random_cotangent(SplitMix64& rng, const PhaseGrid& grid) {
  CotangentVector v{GridField(grid.nq(), grid.np()), rng.uniform(-1.0, 1.0)};
  for (Eigen::Index k = 0; k < v.xi.size(); ++k) v.xi(k) = rng.uniform(-1.0, 1.0);
  return v;
}

/// Smooth, non-separable test density on q in [-pi, pi), p in [-8, 8].
inline GridField smooth_density(const PhaseGrid& grid) {
  GridField rho(grid.nq(), grid.np());
  for (int i = 0; i < grid.nq(); ++i)
    for (int j = 0; j < grid.np(); ++j) {
      const double q = grid.q(i), p = grid.p(j);
      rho(i, j) = std::exp(-0.5 * p * p + 0.5 * std::sin(q) + 0.3 * p * std::cos(q));
    }
  return rho / grid.integrate(rho);
}

/// |L dS| for smooth_density on an n x n grid.
inline double poisson_entropy_residual(int n) {
  const PhaseGrid grid(n, n, 2.0 * std::numbers::pi, 8.0);
  const State state{smooth_density(grid), 0.0};
  return tangent_norm(apply_poisson(state, gradient_entropy(state, 1.0), grid), grid);
}

}  // namespace relgen::testing
