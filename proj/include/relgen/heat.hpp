#pragma once

// Relativistic heat equation on a periodic 1-D grid,
//   d_t rho = nu div( rho grad rho / sqrt(rho^2 + (nu/c)^2 |grad rho|^2) ),
// as a generalized GENERIC flow d_t rho = d_xi K(rho, dS/drho) with
// K(rho; xi) = nu int rho phi*(grad xi) and S = -int rho log rho.
// c = kInfinite gives the classical heat equation d_t rho = nu lap rho.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "relgen/diagnostics.hpp"
#include "relgen/model.hpp"

namespace relgen {

/// Periodic grid x in [-L/2, L/2) with n cells.
class HeatGrid {
 public:
  HeatGrid(int n, double length) : n_(n), length_(length) {
    if (n < 8 || n % 2 != 0) throw InvalidArgument("heat grid cell count must be even and >= 8");
    if (!(length > 0) || !std::isfinite(length)) throw InvalidArgument("heat grid length must be positive");
  }

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return length_ / n_; }
  double x(int i) const noexcept { return -0.5 * length_ + (i + 0.5) * h(); }

  bool operator==(const HeatGrid&) const = default;

 private:
  int n_;
  double length_;
};

struct HeatState {
  Eigen::ArrayXd rho;
  double t = 0.0;
};

/// phi*(z) = (c^2/nu^2)(sqrt(1 + (nu^2/c^2)|z|^2) - 1), evaluated as
/// |z|^2 / (sqrt(1 + a) + 1) to avoid cancellation. Returns the limit |z|^2/2
/// for c = kInfinite.
template <typename Derived>
typename Derived::Scalar phi_star(const Eigen::MatrixBase<Derived>& z, const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (!z.allFinite()) throw InvalidArgument("phi_star argument has non-finite entries");
  const Scalar z2 = z.squaredNorm();
  if (params.classical()) return z2 / Scalar(2);
  const Scalar ratio = Scalar(params.nu) / Scalar(params.c);
  return z2 / (sqrt(Scalar(1) + ratio * ratio * z2) + Scalar(1));
}

/// grad phi*(z) = z / sqrt(1 + (nu^2/c^2)|z|^2); |grad phi*| < c/nu.
template <typename Derived>
VectorOf<Derived> grad_phi_star(const Eigen::MatrixBase<Derived>& z, const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (!z.allFinite()) throw InvalidArgument("grad_phi_star argument has non-finite entries");
  if (params.classical()) return z;
  const Scalar ratio = Scalar(params.nu) / Scalar(params.c);
  return z / sqrt(Scalar(1) + ratio * ratio * z.squaredNorm());
}

inline double phi_star(double z, const ModelParams& params) {
  return phi_star(Eigen::Matrix<double, 1, 1>(z), params);
}
inline double grad_phi_star(double z, const ModelParams& params) {
  return grad_phi_star(Eigen::Matrix<double, 1, 1>(z), params)(0);
}

/// K(rho; xi) = nu sum rho_i phi*((grad xi)_i) h, with the face differences of
/// xi averaged to cells.
double dissipation_potential(const HeatState& state, const Eigen::ArrayXd& xi, const HeatGrid& grid,
                             const ModelParams& params);

/// Face flux F_{i+1/2} = nu rhoBar g / sqrt(rhoBar^2 + (nu/c)^2 g^2), g the
/// face difference of rho and rhoBar the arithmetic mean (F = nu g for
/// c = kInfinite). Entry i is the face between cells i and i+1 (periodic).
Eigen::ArrayXd heat_face_flux(const Eigen::ArrayXd& rho, const HeatGrid& grid, const ModelParams& params);

/// (F_{i+1/2} - F_{i-1/2}) / h. Sums to zero over the grid.
Eigen::ArrayXd heat_rhs(const HeatState& state, const HeatGrid& grid, const ModelParams& params);

/// Face gradient of dS/drho = -(log rho + 1) in the discrete chain-rule form
/// -(rho_{i+1} - rho_i) / (h rhoBar), zero across vacuum faces.
Eigen::ArrayXd entropy_face_gradient(const Eigen::ArrayXd& rho, const HeatGrid& grid);

/// d_xi K for the face-based potential nu sum_f rhoBar_f phi*(z_f) h evaluated
/// at face gradients z: -nu (rhoBar grad phi*(z))_{i+1/2} - (..)_{i-1/2}) / h.
Eigen::ArrayXd dissipation_potential_derivative(const Eigen::ArrayXd& rho, const Eigen::ArrayXd& face_gradient,
                                                const HeatGrid& grid, const ModelParams& params);

/// The generalized-GENERIC assembly d_xi K(rho, dS/drho).
Eigen::ArrayXd generalized_generic_heat_rhs(const HeatState& state, const HeatGrid& grid,
                                            const ModelParams& params);

/// 0.25 min(h^2/nu, h/c); the h/c guard is dropped for c = kInfinite.
double stable_heat_dt(const HeatGrid& grid, const ModelParams& params);

/// One forward-Euler step. Throws StabilityError when dt exceeds the bound and
/// PositivityError if a cell falls below -1e-14.
HeatState step_heat(const HeatState& state, double dt, const HeatGrid& grid, const ModelParams& params);

/// Half the width of the smallest interval of cells containing every cell with
/// rho > threshold (a single cell gives h/2). Assumes the support does not wrap
/// around the periodic seam. Returns 0 when no cell exceeds the threshold.
double support_radius(const HeatState& state, const HeatGrid& grid, double threshold = 1e-12);

/// -sum rho log rho h with 0 log 0 = 0.
double boltzmann_entropy(const HeatState& state, const HeatGrid& grid);

double heat_mass(const HeatState& state, const HeatGrid& grid);

struct HeatInit {
  enum class Kind { Uniform, Gaussian, Bump };
  Kind kind = Kind::Gaussian;
  /// Gaussian standard deviation or bump half-width.
  double width = 0.1;
  double center = 0.0;
};

/// Mass-1 initial density. The bump is cos^2(pi (x - x0) / (2 w)) on |x - x0| < w.
HeatState make_heat_initial_state(const HeatInit& init, const HeatGrid& grid);

struct HeatRunConfig {
  HeatGrid grid{256, 1.0};
  ModelParams params;
  /// Non-positive selects the stability bound. The step is shrunk so that
  /// t_final is hit exactly.
  double dt = 0.0;
  double t_final = 0.05;
  int record_every = 100;
  HeatInit init;
};

struct HeatRunResult {
  std::vector<DiagnosticsRecord> records;
  HeatState initial_state;
  HeatState final_state;
  long steps = 0;
  double dt = 0.0;
  /// max over steps and faces of |F| / (c rhoBar); 0 for c = kInfinite.
  double max_flux_ratio = 0.0;
  /// Smallest per-step entropy change (negative means a decrease).
  double min_entropy_increment = 0.0;
};

using HeatObserver = std::function<void(const HeatState&, const DiagnosticsRecord&, long step)>;

DiagnosticsRecord heat_diagnostics(const HeatState& state, const HeatGrid& grid, const ModelParams& params);

HeatRunResult run_heat(const HeatRunConfig& cfg, const HeatObserver& observer = {});

}  // namespace relgen
