#include <cmath>

#include "doctest.h"
#include "relgen/kfp.hpp"
#include "support.hpp"

using namespace relgen;
using relgen::testing::random_density;

namespace {

ModelParams unit_relativistic(double gamma = 0.5) {
  ModelParams p;
  p.c = 1.0;
  p.gamma = gamma;
  return p;
}

KineticSystem harmonic(Variant variant, int n = 32, KineticSystem::Options options = {}) {
  return KineticSystem(PhaseGrid(n, n, 16.0, 34.0), unit_relativistic(), Potential::harmonic(1.0), variant, options);
}

GridField maxwellian_of(const KineticSystem& system) {
  return maxwellian(system.grid(), system.params(), system.potential()).density;
}

}  // namespace

TEST_CASE("the dissipative tendency vanishes on the discrete Maxwellian") {
  for (Variant variant : {Variant::DH, Variant::DMR}) {
    const KineticSystem system = harmonic(variant);
    const State state{maxwellian_of(system), 0.0};
    const Tangent d = kfp_dissipative_rhs(state, system);
    CHECK(tangent_norm(d, system.grid()) <= 1e-14 * kfp_dissipative_scale(state, system));
  }
  ModelParams classical;
  classical.gamma = 0.5;
  const KineticSystem kramers(PhaseGrid(32, 32, 16.0, 9.0), classical, Potential::harmonic(1.0), Variant::Classical);
  const State state{maxwellian_of(kramers), 0.0};
  CHECK(tangent_norm(kfp_dissipative_rhs(state, kramers), kramers.grid()) <=
        1e-14 * kfp_dissipative_scale(state, kramers));
}

TEST_CASE("the two variants dissipate differently away from equilibrium") {
  SplitMix64 rng(3);
  const KineticSystem dh = harmonic(Variant::DH), dmr = harmonic(Variant::DMR);
  const State state{random_density(rng, dh.grid()), 0.0};
  const Tangent a = kfp_dissipative_rhs(state, dh), b = kfp_dissipative_rhs(state, dmr);
  CHECK(dh.grid().norm(a.rho - b.rho) > 1e-3 * dh.grid().norm(a.rho));
}

TEST_CASE("transport alone conserves the kinetic energy without a potential") {
  KineticSystem::Options options;
  options.upwind_dissipation = false;
  const KineticSystem system(PhaseGrid(32, 32, 8.0, 34.0), unit_relativistic(), Potential::zero(), Variant::DH,
                             options);
  SplitMix64 rng(4);
  const State state{random_density(rng, system.grid()), 0.0};
  const GridField transport = kfp_rhs(state, system).rho - kfp_dissipative_rhs(state, system).rho;
  const double scale = (system.hamiltonian() * transport).abs().sum() * system.grid().cell_volume();
  CHECK(std::abs(system.grid().inner(system.hamiltonian(), transport)) <= 1e-10 * scale);
}

TEST_CASE("excess rate of a momentum spike at rest") {
  const double gamma = 0.5;
  const KineticSystem system(PhaseGrid(8, 2000, 1.0, 10.0), unit_relativistic(gamma), Potential::zero(), Variant::DH);
  const PhaseGrid& grid = system.grid();
  GridField spike = grid.zeros();
  spike.col(grid.np() / 2).setConstant(1.0 / (grid.lq() * grid.hp()));
  const State state{spike, 0.0};
  // gamma [D grad H . grad H - theta div(D grad H)] at p = hp/2.
  const double p = grid.p(grid.np() / 2);
  const double expected = gamma * (p * grad_p_hamiltonian(p, system.params()) - 1.0);
  CHECK(excess_rate_quadrature(state, system) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-gamma).epsilon(1e-4));
}

TEST_CASE("excess energy compensates the kinetic energy exactly") {
  for (Variant variant : {Variant::DH, Variant::DMR}) {
    const KineticSystem system = harmonic(variant);
    SplitMix64 rng(5);
    for (int k = 0; k < 10; ++k) {
      const State state{random_density(rng, system.grid()), 0.0};
      const Tangent rhs = kfp_rhs(state, system);
      const double production = system.grid().inner(system.hamiltonian(), rhs.rho);
      const double scale = (system.hamiltonian() * rhs.rho).abs().sum() * system.grid().cell_volume();
      CHECK(std::abs(excess_rhs(state, system) + production) <= 1e-10 * scale);
      CHECK(excess_rhs(state, system) == rhs.e);
    }
  }
}

TEST_CASE("kinetic energy production is bounded by gamma theta d / m") {
  for (Variant variant : {Variant::DH, Variant::DMR}) {
    const KineticSystem system = harmonic(variant);
    const ModelParams& p = system.params();
    SplitMix64 rng(6);
    for (int k = 0; k < 50; ++k) {
      const State state{random_density(rng, system.grid()), 0.0};
      CHECK(-excess_rhs(state, system) <= p.gamma * p.theta * p.d / p.m + 1e-10);
    }
  }
}

TEST_CASE("discrete and pointwise excess rates agree on a smooth state") {
  const KineticSystem system = harmonic(Variant::DH, 64);
  KfpInit init;
  init.sigma_p = 2.0;
  const State state = make_kfp_initial_state(init, system);
  CHECK(excess_rhs(state, system) == doctest::Approx(excess_rate_quadrature(state, system)).epsilon(0.1));
}

TEST_CASE("relative entropy") {
  const KineticSystem system = harmonic(Variant::DH, 16);
  const GridField inf = maxwellian_of(system);
  CHECK(std::abs(relative_entropy(inf, inf, system.grid())) <= 1e-14);
  SplitMix64 rng(7);
  for (int k = 0; k < 100; ++k) CHECK(relative_entropy(random_density(rng, system.grid()), inf, system.grid()) >= 0.0);
  CHECK(l1_distance(inf, inf, system.grid()) == 0.0);
}

TEST_CASE("RK4 step") {
  const KineticSystem system = harmonic(Variant::DH, 16);
  SplitMix64 rng(8);
  const State state{random_density(rng, system.grid()), 0.25};
  const State same = step_kfp(state, system, 0.0);
  CHECK((same.rho == state.rho).all());
  CHECK(same.e == state.e);
  CHECK_THROWS_AS(step_kfp(state, system, 10.0 * stable_kfp_dt(system)), StabilityError);
}

TEST_CASE("coupled energy is conserved over a thousand steps") {
  KfpConfig cfg;
  cfg.grid = PhaseGrid(64, 64, 16.0, 34.0);
  cfg.params = unit_relativistic();
  cfg.potential = Potential::harmonic(1.0);
  cfg.dt = 1e-3;
  cfg.t_final = 1.0;
  cfg.record_every = 100;
  cfg.init = {KfpInit::Kind::Gaussian, 0.5, 1.0, 0.5, 1.0};
  const KfpRunResult result = run_kfp(cfg);
  CHECK(result.steps == 1000);
  const double e0 = result.records.front().E;
  for (const DiagnosticsRecord& r : result.records) {
    CHECK(std::abs(r.E - e0) <= 1e-6 * std::abs(e0));
    CHECK(std::abs(r.mass - 1.0) <= 1e-10);
  }
  for (std::size_t k = 1; k < result.records.size(); ++k) {
    CHECK(result.records[k].S >= result.records[k - 1].S - 1e-8);
    REQUIRE(result.records[k].relEnt.has_value());
    CHECK(*result.records[k].relEnt <= *result.records[k - 1].relEnt + 1e-8);
  }
}

TEST_CASE("starting at the Maxwellian converges immediately") {
  KfpConfig cfg;
  cfg.grid = PhaseGrid(16, 32, 16.0, 34.0);
  cfg.params = unit_relativistic();
  cfg.potential = Potential::harmonic(1.0);
  cfg.init.kind = KfpInit::Kind::Maxwellian;
  const StationarityResult result = run_to_stationarity(cfg);
  CHECK(result.converged);
  CHECK(result.steps == 0);
  CHECK(result.l1_initial <= 1e-12);
  CHECK(std::abs(result.predicted_excess) <= 1e-12 * std::abs(result.initial_energy));
}

TEST_CASE("stationarity gives up with an error when far from equilibrium") {
  KfpConfig cfg;
  cfg.grid = PhaseGrid(16, 32, 16.0, 34.0);
  cfg.params = unit_relativistic(0.01);
  cfg.potential = Potential::harmonic(1.0);
  cfg.t_final = 0.1;
  cfg.init = {KfpInit::Kind::Gaussian, 3.0, 2.0, 0.5, 0.5};
  CHECK_THROWS_AS(run_to_stationarity(cfg), ConvergenceError);
}

TEST_CASE("diagnostics of a nearly empty state stay finite") {
  const KineticSystem system = harmonic(Variant::DH, 16);
  GridField rho = system.grid().zeros();
  rho(3, 8) = 1.0 / system.grid().cell_volume();
  const DiagnosticsRecord r = kfp_diagnostics({rho, 0.0}, 0.0, system);
  CHECK(std::isfinite(r.S));
  CHECK(std::isfinite(r.dSdt));
  CHECK(!r.relEnt.has_value());
}
