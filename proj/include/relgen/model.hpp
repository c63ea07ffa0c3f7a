#pragma once

// Physical model: parameters, external potentials, relativistic and classical
// Hamiltonians, the momentum diffusion matrices of the two relativistic
// Fokker-Planck variants, and their fluctuation-dissipation drift.
//
// Pointwise functions are templated on the Eigen expression type so that they
// work for any scalar (double, long double) and any momentum dimension d.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "relgen/errors.hpp"

namespace relgen {

/// Speed of light value selecting the classical (Newtonian) formulas.
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

struct ModelParams {
  double m = 1.0;
  double c = kInfinite;
  double gamma = 1.0;
  double theta = 1.0;
  double nu = 1.0;
  int d = 1;

  bool classical() const noexcept { return std::isinf(c); }

  void validate() const {
    if (!(std::isfinite(m) && m > 0)) throw InvalidArgument("mass m must be positive and finite");
    if (!(c > 0) || std::isnan(c)) throw InvalidArgument("speed of light c must be positive or infinite");
    if (!(std::isfinite(gamma) && gamma > 0)) throw InvalidArgument("friction gamma must be positive");
    if (!(std::isfinite(theta) && theta > 0)) throw InvalidArgument("temperature theta must be positive");
    if (!(std::isfinite(nu) && nu > 0)) throw InvalidArgument("diffusivity nu must be positive");
    if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  }
};

enum class Variant { DMR, DH, Classical };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::DMR: return "DMR";
    case Variant::DH: return "DH";
    case Variant::Classical: return "Classical";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "DMR" || s == "dmr") return Variant::DMR;
  if (s == "DH" || s == "dh") return Variant::DH;
  if (s == "Classical" || s == "classical") return Variant::Classical;
  throw InvalidArgument("unknown variant '" + std::string(s) + "' (expected DMR, DH or Classical)");
}

/// DMR and DH live at finite c; Classical only at c = kInfinite.
inline void check_variant(Variant v, const ModelParams& params) {
  if (v == Variant::Classical && !params.classical())
    throw InvalidArgument("Classical variant requires c = inf");
  if (v != Variant::Classical && params.classical())
    throw InvalidArgument(std::string(to_string(v)) + " variant requires finite c");
}

/// Non-negative external potential V(q). Multi-dimensional positions are
/// handled separably: V(q) = sum_k v(q_k) for the cosine kind and k|q|^2/2
/// for the harmonic kind.
class Potential {
 public:
  enum class Kind { Zero, Harmonic, Cosine };

  static Potential zero() { return Potential(Kind::Zero, 0.0, 1.0); }
  static Potential harmonic(double stiffness) {
    if (!(std::isfinite(stiffness) && stiffness >= 0))
      throw InvalidArgument("harmonic stiffness must be >= 0");
    return Potential(Kind::Harmonic, stiffness, 1.0);
  }
  static Potential cosine(double amplitude, double period = 2.0 * std::numbers::pi) {
    if (!(std::isfinite(amplitude) && amplitude >= 0))
      throw InvalidArgument("cosine amplitude must be >= 0");
    if (!(std::isfinite(period) && period > 0)) throw InvalidArgument("cosine period must be > 0");
    return Potential(Kind::Cosine, amplitude, period);
  }

  Kind kind() const noexcept { return kind_; }
  double strength() const noexcept { return strength_; }
  double period() const noexcept { return period_; }

  template <typename Scalar>
  Scalar value(Scalar q) const {
    using std::cos;
    switch (kind_) {
      case Kind::Zero: return Scalar(0);
      case Kind::Harmonic: return Scalar(strength_) * q * q / Scalar(2);
      case Kind::Cosine: return Scalar(strength_) * (Scalar(1) - cos(wavenumber<Scalar>() * q));
    }
    return Scalar(0);
  }

  template <typename Scalar>
  Scalar derivative(Scalar q) const {
    using std::sin;
    switch (kind_) {
      case Kind::Zero: return Scalar(0);
      case Kind::Harmonic: return Scalar(strength_) * q;
      case Kind::Cosine: return Scalar(strength_) * wavenumber<Scalar>() * sin(wavenumber<Scalar>() * q);
    }
    return Scalar(0);
  }

  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& q) const {
    using Scalar = typename Derived::Scalar;
    Scalar sum(0);
    for (Eigen::Index k = 0; k < q.size(); ++k) sum += value(q(k));
    return sum;
  }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> gradient(
      const Eigen::MatrixBase<Derived>& q) const {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> g(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) g(k) = derivative(q(k));
    return g;
  }

 private:
  Potential(Kind kind, double strength, double period)
      : kind_(kind), strength_(strength), period_(period) {}

  template <typename Scalar>
  Scalar wavenumber() const {
    return Scalar(2) * Scalar(std::numbers::pi_v<long double>) / Scalar(period_);
  }

  Kind kind_;
  double strength_;
  double period_;
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, const char* what) {
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

/// sqrt(m^2 c^2 + |p|^2), the relativistic momentum scale.
template <typename Scalar>
Scalar momentum_scale(Scalar p2, const ModelParams& params) {
  using std::sqrt;
  const Scalar mc = Scalar(params.m) * Scalar(params.c);
  return sqrt(mc * mc + p2);
}

}  // namespace detail

template <typename Derived>
using VectorOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
template <typename Derived>
using MatrixOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Kinetic energy with the rest energy removed: c sqrt(m^2c^2+|p|^2) - mc^2,
/// evaluated without cancellation, or |p|^2/(2m) in the classical case.
template <typename Derived>
typename Derived::Scalar kinetic_energy(const Eigen::MatrixBase<Derived>& p, const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(p, "momentum");
  const Scalar p2 = p.squaredNorm();
  const Scalar m(params.m);
  if (params.classical()) return p2 / (Scalar(2) * m);
  const Scalar c(params.c);
  return c * p2 / (detail::momentum_scale(p2, params) + m * c);
}

/// Rest energy mc^2 (zero in the classical case, where it is an irrelevant constant).
inline double rest_energy(const ModelParams& params) {
  return params.classical() ? 0.0 : params.m * params.c * params.c;
}

template <typename DerivedQ, typename DerivedP>
typename DerivedP::Scalar hamiltonian(const Eigen::MatrixBase<DerivedQ>& q,
                                      const Eigen::MatrixBase<DerivedP>& p,
                                      const ModelParams& params, const Potential& potential) {
  using Scalar = typename DerivedP::Scalar;
  detail::require_finite(q, "position");
  detail::require_finite(p, "momentum");
  const Scalar v = potential(q.template cast<Scalar>());
  if (params.classical()) return p.squaredNorm() / (Scalar(2) * Scalar(params.m)) + v;
  return Scalar(params.c) * detail::momentum_scale(p.squaredNorm(), params) + v;
}

/// Relativistic velocity c p / sqrt(m^2c^2+|p|^2), or p/m classically.
template <typename Derived>
VectorOf<Derived> grad_p_hamiltonian(const Eigen::MatrixBase<Derived>& p, const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(p, "momentum");
  if (params.classical()) return p / Scalar(params.m);
  return Scalar(params.c) * p / detail::momentum_scale(p.squaredNorm(), params);
}

/// The momentum diffusion matrix: identity for DMR and Classical,
/// (mc/s)(I + p p^T/(m^2c^2)) with s = sqrt(m^2c^2+|p|^2) for DH.
template <typename Derived>
MatrixOf<Derived> diffusion_matrix(const Eigen::MatrixBase<Derived>& p, Variant variant,
                                   const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(p, "momentum");
  check_variant(variant, params);
  const Eigen::Index d = p.size();
  MatrixOf<Derived> identity = MatrixOf<Derived>::Identity(d, d);
  if (variant != Variant::DH) return identity;
  const Scalar mc = Scalar(params.m) * Scalar(params.c);
  const Scalar s = detail::momentum_scale(p.squaredNorm(), params);
  return (mc / s) * (identity + (p * p.transpose()) / (mc * mc));
}

/// D grad_p H. Equals p/m exactly for DH and Classical.
template <typename Derived>
VectorOf<Derived> mobility_drift(const Eigen::MatrixBase<Derived>& p, Variant variant,
                                 const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  check_variant(variant, params);
  if (variant == Variant::DMR) return grad_p_hamiltonian(p, params);
  detail::require_finite(p, "momentum");
  return p / Scalar(params.m);
}

/// div_p(D grad_p H): d/m for DH and Classical, c(d/s - |p|^2/s^3) for DMR.
template <typename Derived>
typename Derived::Scalar div_mobility_drift(const Eigen::MatrixBase<Derived>& p, Variant variant,
                                            const ModelParams& params) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(p, "momentum");
  check_variant(variant, params);
  const Scalar d(p.size());
  if (variant != Variant::DMR) return d / Scalar(params.m);
  const Scalar p2 = p.squaredNorm();
  const Scalar s = detail::momentum_scale(p2, params);
  return Scalar(params.c) * (d / s - p2 / (s * s * s));
}

// One-dimensional conveniences used by the phase-space solvers.

inline double kinetic_energy(double p, const ModelParams& params) {
  return kinetic_energy(Eigen::Matrix<double, 1, 1>(p), params);
}
inline double hamiltonian(double q, double p, const ModelParams& params, const Potential& potential) {
  return hamiltonian(Eigen::Matrix<double, 1, 1>(q), Eigen::Matrix<double, 1, 1>(p), params, potential);
}
inline double grad_p_hamiltonian(double p, const ModelParams& params) {
  return grad_p_hamiltonian(Eigen::Matrix<double, 1, 1>(p), params)(0);
}
inline double diffusion_coefficient(double p, Variant variant, const ModelParams& params) {
  return diffusion_matrix(Eigen::Matrix<double, 1, 1>(p), variant, params)(0, 0);
}
inline double mobility_drift(double p, Variant variant, const ModelParams& params) {
  return mobility_drift(Eigen::Matrix<double, 1, 1>(p), variant, params)(0);
}
inline double div_mobility_drift(double p, Variant variant, const ModelParams& params) {
  return div_mobility_drift(Eigen::Matrix<double, 1, 1>(p), variant, params);
}

}  // namespace relgen
