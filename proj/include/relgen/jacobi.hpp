#pragma once

// Finite-difference check of the Jacobi identity for a constant
// antisymmetric Poisson matrix L on R^n:
//   {{F1,F2},F3} + {{F2,F3},F1} + {{F3,F1},F2} = 0,  {F,G} = grad F^T L grad G.
// Brackets are evaluated with central differences and the outer gradient of a
// bracket with a second, nested central difference. Run it in long double
// when the residual has to be resolved below ~1e-8.

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "relgen/errors.hpp"

namespace relgen {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ScalarFunction = std::function<Scalar(const VectorX<Scalar>&)>;
template <typename Scalar>
using DomainPredicate = std::function<bool(const VectorX<Scalar>&)>;

template <typename Scalar>
struct JacobiResult {
  Scalar residual{};
  /// Sum of the magnitudes of the three cyclic terms.
  Scalar scale{};
};

inline constexpr int kMaxJacobiDimension = 8;

namespace detail {

template <typename Scalar>
class BracketProbe {
 public:
  BracketProbe(const MatrixX<Scalar>& poisson, Scalar step, const DomainPredicate<Scalar>& in_domain)
      : poisson_(poisson), step_(step), in_domain_(in_domain) {}

  Scalar evaluate(const ScalarFunction<Scalar>& f, const VectorX<Scalar>& z) const {
    if (in_domain_ && !in_domain_(z)) throw PreconditionError("finite-difference stencil left the evaluable region");
    return f(z);
  }

  VectorX<Scalar> gradient(const ScalarFunction<Scalar>& f, const VectorX<Scalar>& z) const {
    VectorX<Scalar> g(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      VectorX<Scalar> zp = z, zm = z;
      zp(k) += step_;
      zm(k) -= step_;
      g(k) = (evaluate(f, zp) - evaluate(f, zm)) / (Scalar(2) * step_);
    }
    return g;
  }

  Scalar bracket(const ScalarFunction<Scalar>& f, const ScalarFunction<Scalar>& g, const VectorX<Scalar>& z) const {
    return gradient(f, z).dot(poisson_ * gradient(g, z));
  }

  /// {{f, g}, h}(z).
  Scalar nested(const ScalarFunction<Scalar>& f, const ScalarFunction<Scalar>& g, const ScalarFunction<Scalar>& h,
                const VectorX<Scalar>& z) const {
    const ScalarFunction<Scalar> inner = [&](const VectorX<Scalar>& y) { return bracket(f, g, y); };
    return gradient(inner, z).dot(poisson_ * gradient(h, z));
  }

 private:
  const MatrixX<Scalar>& poisson_;
  Scalar step_;
  const DomainPredicate<Scalar>& in_domain_;
};

}  // namespace detail

template <typename Scalar>
JacobiResult<Scalar> jacobi_residual_fd(const MatrixX<Scalar>& poisson, const ScalarFunction<Scalar>& f1,
                                        const ScalarFunction<Scalar>& f2, const ScalarFunction<Scalar>& f3,
                                        const VectorX<Scalar>& z, Scalar step = Scalar(1e-4),
                                        const DomainPredicate<Scalar>& in_domain = {}) {
  using std::abs;
  const Eigen::Index n = z.size();
  if (n < 1 || n > kMaxJacobiDimension) throw InvalidArgument("Jacobi check supports 1 <= n <= 8");
  if (poisson.rows() != n || poisson.cols() != n) throw InvalidArgument("Poisson matrix must be n x n");
  const Scalar asym = (poisson + poisson.transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-14) * (Scalar(1) + poisson.cwiseAbs().maxCoeff()))
    throw InvalidArgument("Poisson matrix must be antisymmetric");
  if (!(step > Scalar(0))) throw InvalidArgument("finite-difference step must be positive");

  const detail::BracketProbe<Scalar> probe(poisson, step, in_domain);
  const Scalar t1 = probe.nested(f1, f2, f3, z);
  const Scalar t2 = probe.nested(f2, f3, f1, z);
  const Scalar t3 = probe.nested(f3, f1, f2, z);
  return {abs(t1 + t2 + t3), abs(t1) + abs(t2) + abs(t3)};
}

}  // namespace relgen
