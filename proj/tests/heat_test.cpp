#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relgen/heat.hpp"
#include "relgen/splitmix64.hpp"

using namespace relgen;
using Eigen::ArrayXd;

namespace {

ModelParams heat_params(double c = 1.0, double nu = 1.0) {
  ModelParams p;
  p.c = c;
  p.nu = nu;
  return p;
}

ArrayXd random_positive(SplitMix64& rng, int n, double lo = 0.1, double hi = 2.0) {
  ArrayXd a(n);
  for (int i = 0; i < n; ++i) a(i) = rng.uniform(lo, hi);
  return a;
}

ArrayXd random_signed(SplitMix64& rng, int n, double amplitude) {
  ArrayXd a(n);
  for (int i = 0; i < n; ++i) a(i) = rng.uniform(-amplitude, amplitude);
  return a;
}

}  // namespace

TEST_CASE("phi* values") {
  CHECK(phi_star(0.0, heat_params()) == 0.0);
  CHECK(phi_star(std::sqrt(3.0), heat_params()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(phi_star(1.0, heat_params(1e6)) - 0.5) <= 1e-6);
  CHECK(phi_star(3.0, ModelParams{}) == 4.5);
  Eigen::Vector2d z(1.0, 1.0);
  CHECK(phi_star(z, heat_params()) == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("grad phi* values and bound") {
  CHECK(grad_phi_star(0.0, heat_params()) == 0.0);
  CHECK(grad_phi_star(1.0, heat_params()) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(grad_phi_star(1e3, heat_params(2.0, 0.5))) < 4.0);
  CHECK(std::abs(grad_phi_star(1e12, heat_params(2.0, 0.5))) <= 4.0);
  SplitMix64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const double z = rng.uniform(-5.0, 5.0), h = 1e-5;
    const double fd = (phi_star(z + h, heat_params()) - phi_star(z - h, heat_params())) / (2.0 * h);
    const double exact = grad_phi_star(z, heat_params());
    CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), 1e-3));
  }
}

TEST_CASE("dissipation potential is nonnegative, convex and zero on constants") {
  const HeatGrid grid(32, 2.0);
  const ModelParams params = heat_params(1.5, 0.7);
  SplitMix64 rng(6);
  const HeatState state{random_positive(rng, 32), 0.0};
  CHECK(dissipation_potential(state, ArrayXd::Constant(32, 3.0), grid, params) == 0.0);
  for (int k = 0; k < 100; ++k) {
    const HeatState rho{random_positive(rng, 32, 0.0, 1.0), 0.0};
    const ArrayXd a = random_signed(rng, 32, 5.0), b = random_signed(rng, 32, 5.0);
    const double ka = dissipation_potential(rho, a, grid, params), kb = dissipation_potential(rho, b, grid, params);
    CHECK(ka >= 0.0);
    CHECK(dissipation_potential(rho, 0.5 * (a + b), grid, params) <= 0.5 * (ka + kb) + 1e-12);
  }
}

TEST_CASE("heat right-hand side") {
  const HeatGrid grid(64, 1.0);
  CHECK(heat_rhs({ArrayXd::Constant(64, 1.0), 0.0}, grid, heat_params()).abs().maxCoeff() == 0.0);

  SplitMix64 rng(10);
  for (int k = 0; k < 20; ++k) {
    ArrayXd rho = random_positive(rng, 64, 0.0, 1.0);
    rho(7) = 50.0;
    const ModelParams params = heat_params(rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0));
    const ArrayXd flux = heat_face_flux(rho, grid, params);
    for (int i = 0; i < 64; ++i) {
      const double bar = 0.5 * (rho(i) + rho((i + 1) % 64));
      CHECK(std::abs(flux(i)) <= params.c * bar * (1.0 + 1e-14));
    }
    const ArrayXd rhs = heat_rhs({rho, 0.0}, grid, params);
    CHECK(std::abs(rhs.sum()) <= 1e-12 * rhs.abs().sum());
  }
}

TEST_CASE("classical tendency of a cosine mode is second-order accurate") {
  const double length = 2.0, nu = 0.8;
  ModelParams params;
  params.nu = nu;
  double previous = 0.0;
  for (int n : {32, 64, 128}) {
    const HeatGrid grid(n, length);
    const double k = 2.0 * std::numbers::pi / length;
    ArrayXd rho(n), exact(n);
    for (int i = 0; i < n; ++i) {
      rho(i) = 1.0 + 0.1 * std::cos(k * grid.x(i));
      exact(i) = -nu * k * k * 0.1 * std::cos(k * grid.x(i));
    }
    const double error = (heat_rhs({rho, 0.0}, grid, params) - exact).abs().maxCoeff();
    CHECK(error <= 0.1 * nu * k * k * k * k * grid.h() * grid.h());
    if (previous > 0) CHECK(std::log2(previous / error) == doctest::Approx(2.0).epsilon(0.05));
    previous = error;
  }
}

TEST_CASE("flux form and generalized-GENERIC assembly agree") {
  const HeatGrid grid(48, 3.0);
  SplitMix64 rng(12);
  for (int k = 0; k < 20; ++k) {
    const HeatState state{random_positive(rng, 48, 1e-3, 2.0), 0.0};
    for (const ModelParams& params : {heat_params(0.3, 1.2), heat_params(), ModelParams{}}) {
      const ArrayXd a = heat_rhs(state, grid, params);
      const ArrayXd b = generalized_generic_heat_rhs(state, grid, params);
      CHECK((a - b).abs().maxCoeff() <= 1e-12 * std::max(1.0, a.abs().maxCoeff()));
    }
  }
}

TEST_CASE("time step") {
  const HeatGrid grid(64, 1.0);
  const ModelParams params = heat_params();
  const HeatState state = make_heat_initial_state({HeatInit::Kind::Gaussian, 0.1, 0.0}, grid);
  const HeatState same = step_heat(state, 0.0, grid, params);
  CHECK((same.rho == state.rho).all());
  CHECK(stable_heat_dt(grid, params) == doctest::Approx(0.25 * grid.h() * grid.h()));
  CHECK(stable_heat_dt(grid, heat_params(1000.0)) == doctest::Approx(0.25 * grid.h() / 1000.0));
  CHECK_THROWS_AS(step_heat(state, 2.0 * stable_heat_dt(grid, params), grid, params), StabilityError);
}

TEST_CASE("mass and entropy over many steps") {
  const HeatGrid grid(64, 1.0);
  const ModelParams params = heat_params(0.5);
  HeatState state = make_heat_initial_state({HeatInit::Kind::Bump, 0.2, 0.1}, grid);
  const double mass0 = heat_mass(state, grid);
  const double dt = stable_heat_dt(grid, params);
  double entropy = boltzmann_entropy(state, grid), worst = 0.0;
  for (int step = 0; step < 10000; ++step) {
    state = step_heat(state, dt, grid, params);
    const double s = boltzmann_entropy(state, grid);
    worst = std::min(worst, s - entropy);
    entropy = s;
  }
  CHECK(std::abs(heat_mass(state, grid) - mass0) <= 1e-12);
  CHECK(worst >= -1e-10);
  CHECK((state.rho >= 0).all());
}

TEST_CASE("support radius") {
  const HeatGrid grid(32, 1.0);
  HeatState spike{ArrayXd::Zero(32), 0.0};
  spike.rho(10) = 1.0 / grid.h();
  CHECK(support_radius(spike, grid) == doctest::Approx(0.5 * grid.h()));
  CHECK(support_radius({ArrayXd::Zero(32), 0.0}, grid) == 0.0);

  ModelParams classical;
  const HeatState next = step_heat(spike, stable_heat_dt(grid, classical), grid, classical);
  CHECK(next.rho(9) > 0.0);
  CHECK(next.rho(11) > 0.0);
  CHECK(support_radius(next, grid) == doctest::Approx(1.5 * grid.h()));
}

TEST_CASE("Boltzmann entropy") {
  const HeatGrid grid(16, 3.0);
  CHECK(boltzmann_entropy({ArrayXd::Constant(16, 1.0 / 3.0), 0.0}, grid) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
  HeatState spike{ArrayXd::Zero(16), 0.0};
  spike.rho(4) = 1.0 / grid.h();
  CHECK(boltzmann_entropy(spike, grid) == doctest::Approx(std::log(grid.h())).epsilon(1e-14));

  SplitMix64 rng(2);
  ArrayXd rho = random_positive(rng, 16);
  const double s = boltzmann_entropy({rho, 0.0}, grid);
  std::reverse(rho.begin(), rho.end());
  CHECK(boltzmann_entropy({rho, 0.0}, grid) == doctest::Approx(s).epsilon(1e-15));
}

TEST_CASE("initial states have unit mass") {
  const HeatGrid grid(128, 2.0);
  for (auto kind : {HeatInit::Kind::Uniform, HeatInit::Kind::Gaussian, HeatInit::Kind::Bump})
    CHECK(heat_mass(make_heat_initial_state({kind, 0.3, -0.2}, grid), grid) == doctest::Approx(1.0).epsilon(1e-14));
  const HeatState bump = make_heat_initial_state({HeatInit::Kind::Bump, 0.25, 0.0}, grid);
  CHECK(support_radius(bump, grid, 1e-300) <= 0.25 + grid.h());
}

TEST_CASE("a full run hits the final time and records monotone entropy") {
  HeatRunConfig cfg;
  cfg.grid = HeatGrid(64, 1.0);
  cfg.params = heat_params(2.0);
  cfg.t_final = 0.01;
  cfg.record_every = 50;
  const HeatRunResult result = run_heat(cfg);
  CHECK(result.final_state.t == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(result.records.back().t == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(result.max_flux_ratio <= 1.0);
  for (std::size_t k = 1; k < result.records.size(); ++k) CHECK(result.records[k].S >= result.records[k - 1].S - 1e-10);
}
