#pragma once

#include <Eigen/Dense>

#include "relgen/errors.hpp"

namespace relgen {

/// Grid function over the (q, p) phase grid: rows index position cells,
/// columns index momentum cells.
using GridField = Eigen::ArrayXXd;

/// Uniform tensor grid for d = 1: q in [-Lq/2, Lq/2) periodic, p in
/// [-Pmax, Pmax] with zero-flux faces at the ends. Values live at cell
/// midpoints.
class PhaseGrid {
 public:
  PhaseGrid(int nq, int np, double lq, double pmax) : nq_(nq), np_(np), lq_(lq), pmax_(pmax) {
    if (nq < 8 || np < 8 || nq % 2 != 0 || np % 2 != 0)
      throw InvalidArgument("grid cell counts must be even and >= 8");
    if (!(lq > 0) || !(pmax > 0) || !std::isfinite(lq) || !std::isfinite(pmax))
      throw InvalidArgument("grid extents Lq and Pmax must be positive");
  }

  int nq() const noexcept { return nq_; }
  int np() const noexcept { return np_; }
  double lq() const noexcept { return lq_; }
  double pmax() const noexcept { return pmax_; }
  double hq() const noexcept { return lq_ / nq_; }
  double hp() const noexcept { return 2.0 * pmax_ / np_; }
  double cell_volume() const noexcept { return hq() * hp(); }

  double q(int i) const noexcept { return -0.5 * lq_ + (i + 0.5) * hq(); }
  double p(int j) const noexcept { return -pmax_ + (j + 0.5) * hp(); }
  /// Interior momentum face between cells j and j+1, j = 0..np-2.
  double p_face(int j) const noexcept { return -pmax_ + (j + 1) * hp(); }

  Eigen::ArrayXd q_centers() const {
    return Eigen::ArrayXd::NullaryExpr(nq_, [this](Eigen::Index i) { return q(int(i)); });
  }
  Eigen::ArrayXd p_centers() const {
    return Eigen::ArrayXd::NullaryExpr(np_, [this](Eigen::Index j) { return p(int(j)); });
  }

  GridField zeros() const { return GridField::Zero(nq_, np_); }

  /// Midpoint-rule inner product sum a*b*cellVolume.
  double inner(const GridField& a, const GridField& b) const { return (a * b).sum() * cell_volume(); }
  double norm(const GridField& a) const { return std::sqrt(inner(a, a)); }
  double integrate(const GridField& a) const { return a.sum() * cell_volume(); }

  bool operator==(const PhaseGrid&) const = default;

 private:
  int nq_;
  int np_;
  double lq_;
  double pmax_;
};

}  // namespace relgen
