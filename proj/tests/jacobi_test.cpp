#include <cmath>

#include "doctest.h"
#include "relgen/jacobi.hpp"
#include "relgen/splitmix64.hpp"

using namespace relgen;

namespace {

template <typename Scalar>
ScalarFunction<Scalar> cubic(SplitMix64& rng, int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a(n), b(n * n), c(n * n * n);
  for (auto* v : {&a, &b, &c})
    for (Eigen::Index k = 0; k < v->size(); ++k) (*v)(k) = Scalar(rng.uniform(-1.0, 1.0));
  return [=](const VectorX<Scalar>& z) {
    Scalar f(0);
    for (int i = 0; i < n; ++i) {
      f += a(i) * z(i);
      for (int j = 0; j < n; ++j) {
        f += b(i * n + j) * z(i) * z(j);
        for (int k = 0; k < n; ++k) f += c((i * n + j) * n + k) * z(i) * z(j) * z(k);
      }
    }
    return f;
  };
}

template <typename Scalar>
MatrixX<Scalar> random_antisymmetric(SplitMix64& rng, int n) {
  MatrixX<Scalar> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Scalar(rng.uniform(-1.0, 1.0));
  return a - a.transpose();
}

}  // namespace

TEST_CASE("quadratic functions with the canonical matrix") {
  MatrixX<double> j(2, 2);
  j << 0, 1, -1, 0;
  const ScalarFunction<double> f1 = [](const VectorX<double>& z) { return z(0) * z(0) + 0.5 * z(1); };
  const ScalarFunction<double> f2 = [](const VectorX<double>& z) { return z(0) * z(1); };
  const ScalarFunction<double> f3 = [](const VectorX<double>& z) { return 3.0 * z(1) * z(1) - z(0); };
  const VectorX<double> z = VectorX<double>::Constant(2, 0.3);
  CHECK(jacobi_residual_fd(j, f1, f2, f3, z).residual <= 1e-10);
}

TEST_CASE("random cubics with a random constant matrix") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixX<long double> l = random_antisymmetric<long double>(rng, 4);
    VectorX<long double> z(4);
    for (int k = 0; k < 4; ++k) z(k) = rng.uniform(-1.0, 1.0);
    const auto r = jacobi_residual_fd<long double>(l, cubic<long double>(rng, 4), cubic<long double>(rng, 4),
                                                   cubic<long double>(rng, 4), z);
    CHECK(r.scale > 0);
    CHECK(double(r.residual / r.scale) <= 1e-4);
  }
  // Double precision meets the same bound, with less margin.
  const MatrixX<double> l = random_antisymmetric<double>(rng, 4);
  const VectorX<double> z = VectorX<double>::Constant(4, 0.2);
  const auto r = jacobi_residual_fd<double>(l, cubic<double>(rng, 4), cubic<double>(rng, 4), cubic<double>(rng, 4), z);
  CHECK(r.residual / r.scale <= 1e-4);
}

TEST_CASE("a constant function makes every bracket vanish") {
  SplitMix64 rng(8);
  const MatrixX<long double> l = random_antisymmetric<long double>(rng, 3);
  const ScalarFunction<long double> flat = [](const VectorX<long double>&) { return 4.0L; };
  const VectorX<long double> z = VectorX<long double>::Constant(3, 0.5L);
  CHECK(double(jacobi_residual_fd<long double>(l, cubic<long double>(rng, 3), cubic<long double>(rng, 3), flat, z)
                   .residual) <= 1e-12);
}

TEST_CASE("argument validation") {
  const ScalarFunction<double> f = [](const VectorX<double>& z) { return z.sum(); };
  MatrixX<double> sym(2, 2);
  sym << 0, 1, 1, 0;
  CHECK_THROWS_AS(jacobi_residual_fd<double>(sym, f, f, f, VectorX<double>::Zero(2)), InvalidArgument);
  CHECK_THROWS_AS(jacobi_residual_fd<double>(MatrixX<double>::Zero(9, 9), f, f, f, VectorX<double>::Zero(9)),
                  InvalidArgument);
  MatrixX<double> j(2, 2);
  j << 0, 1, -1, 0;
  const DomainPredicate<double> positive = [](const VectorX<double>& z) { return (z.array() > 0).all(); };
  CHECK_THROWS_AS(jacobi_residual_fd<double>(j, f, f, f, VectorX<double>::Constant(2, 1e-5), 1e-4, positive),
                  PreconditionError);
}
