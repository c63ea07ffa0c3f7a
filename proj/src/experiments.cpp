#include "relgen/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "relgen/io.hpp"
#include "relgen/jacobi.hpp"
#include "relgen/splitmix64.hpp"

namespace relgen {

namespace fs = std::filesystem;

void ExperimentReport::require_at_most(std::string name, double measured, double limit) {
  checks.push_back({std::move(name), measured, "<=", limit, measured <= limit});
}

void ExperimentReport::require_at_least(std::string name, double measured, double limit) {
  checks.push_back({std::move(name), measured, ">=", limit, measured >= limit});
}

void ExperimentReport::require(std::string name, bool condition) {
  checks.push_back({std::move(name), condition ? 1.0 : 0.0, ">=", 1.0, condition});
}

void ExperimentReport::note(std::string line) { notes.push_back(std::move(line)); }

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ExperimentReport::find(std::string_view name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ExperimentReport::render() const {
  std::ostringstream out;
  out << "experiment: " << experiment << '\n';
  std::size_t width = 5;
  for (const Check& c : checks) width = std::max(width, c.name.size());
  out << std::left << std::setw(int(width)) << "check" << "  " << std::setw(24) << "measured" << "    "
      << std::setw(24) << "limit" << "  status\n";
  out << std::scientific << std::setprecision(6);
  for (const Check& c : checks) {
    out << std::left << std::setw(int(width)) << c.name << "  " << std::right << std::setw(24) << c.measured << "  "
        << c.relation << "  " << std::setw(24) << c.limit << "  " << (c.passed ? "PASS" : "FAIL") << '\n';
  }
  for (const std::string& n : notes) out << "note: " << n << '\n';
  out << "result: " << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

namespace {

fs::path prepare(const std::optional<fs::path>& out) {
  if (!out) return {};
  std::error_code ec;
  fs::create_directories(*out, ec);
  if (ec) throw IoError("cannot create output directory '" + out->string() + "': " + ec.message());
  return *out;
}

void write_report(const ExperimentReport& report, const std::optional<fs::path>& out) {
  if (!out) return;
  const fs::path path = *out / "report.txt";
  std::ofstream file(path);
  file << report.render();
  if (!file) throw IoError("cannot write '" + path.string() + "'");
}

std::string dump_name(const std::string& prefix, long step) {
  std::ostringstream name;
  name << prefix << "_" << std::setw(8) << std::setfill('0') << step << ".txt";
  return name.str();
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

// Heat.

ExperimentReport run_heat_experiment(const RunConfig& cfg, const std::optional<fs::path>& out) {
  const fs::path dir = prepare(out);
  const HeatRunConfig run_cfg = cfg.heat_run_config();
  const HeatGrid& grid = run_cfg.grid;
  std::vector<double> radii;

  const HeatObserver observer = [&](const HeatState& state, const DiagnosticsRecord&, long step) {
    radii.push_back(support_radius(state, grid, cfg.support_threshold));
    if (out && cfg.dump_every > 0 && step % cfg.dump_every == 0) dump_density(state, grid, dir / dump_name("density", step));
  };
  const HeatRunResult result = run_heat(run_cfg, observer);
  if (out) {
    write_timeseries_csv(result.records, dir / "timeseries.csv");
    dump_density(result.final_state, grid, dir / "density_final.txt");
  }

  ExperimentReport report;
  report.experiment = "heat";
  const double mass0 = result.records.front().mass;
  double mass_drift = 0.0;
  for (const DiagnosticsRecord& r : result.records) mass_drift = std::max(mass_drift, std::abs(r.mass - mass0));
  report.require_at_most("mass_drift", mass_drift, 1e-12);
  report.require_at_least("entropy_step_increment_min", result.min_entropy_increment, -1e-10);
  if (!cfg.model.classical()) report.require_at_most("flux_saturation_ratio_max", result.max_flux_ratio, 1.0 + 1e-12);

  const double r0 = radii.front();
  const double r1 = radii.back();
  report.note("steps=" + std::to_string(result.steps) + " dt=" + fmt(result.dt));
  report.note("support_radius initial=" + fmt(r0) + " final=" + fmt(r1) + " threshold=" + fmt(cfg.support_threshold));
  if (cfg.check_finite_speed) {
    const double bound = cfg.model.c * cfg.t_final + 2.0 * grid.h();
    report.require_at_most("support_growth", r1 - r0, bound);
    for (double threshold : {1e-9, 1e-6, 1e-3}) {
      const double growth = support_radius(result.final_state, grid, threshold) -
                            support_radius(result.initial_state, grid, threshold);
      report.note("support_growth at threshold " + fmt(threshold) + " = " + fmt(growth) + " (bound " + fmt(bound) + ")");
    }
  }
  if (cfg.check_full_support) {
    const double after_one_interval = radii.size() > 1 ? radii[1] : r0;
    report.require_at_least("support_radius_after_first_interval", after_one_interval, 0.5 * grid.length());
  }
  write_report(report, out);
  return report;
}

// Kinetic.

namespace {

void entropy_checks(ExperimentReport& report, const std::vector<DiagnosticsRecord>& records, const std::string& tag) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < records.size(); ++k) worst = std::min(worst, records[k].S - records[k - 1].S);
  if (records.size() < 2) worst = 0.0;
  report.require_at_least(tag + "entropy_sample_increment_min", worst, -1e-8);
}

}  // namespace

ExperimentReport run_kfp_experiment(const RunConfig& cfg, const std::optional<fs::path>& out) {
  const fs::path dir = prepare(out);
  const KfpConfig kcfg = cfg.kfp_config();
  const PhaseGrid& grid = kcfg.grid;
  const KfpObserver observer = [&](const State& state, const DiagnosticsRecord& r, long step) {
    if (out && cfg.dump_every > 0 && step % cfg.dump_every == 0)
      dump_density(state, grid, r.t, dir / dump_name("density", step));
  };
  const KfpRunResult result = run_kfp(kcfg, observer);
  if (out) {
    write_timeseries_csv(result.records, dir / "timeseries.csv");
    dump_density(result.final_state, grid, kcfg.t_final, dir / "density_final.txt");
  }

  ExperimentReport report;
  report.experiment = "kfp";
  const DiagnosticsRecord& first = result.records.front();
  double energy_drift = 0.0, mass_drift = 0.0;
  for (const DiagnosticsRecord& r : result.records) {
    energy_drift = std::max(energy_drift, std::abs(r.E - first.E) / std::abs(first.E));
    mass_drift = std::max(mass_drift, std::abs(r.mass - first.mass));
  }
  report.require_at_most("energy_relative_drift", energy_drift, 1e-6);
  entropy_checks(report, result.records, "");
  report.require_at_most("mass_drift", mass_drift, 1e-10);
  const ModelParams& p = cfg.model;
  report.require_at_most("energy_production_max", result.max_energy_production, p.gamma * p.theta * p.d / p.m + 1e-10);
  report.note("variant=" + std::string(to_string(kcfg.variant)) + " steps=" + std::to_string(result.steps) +
              " dt=" + fmt(result.dt));
  report.note("min_density_final=" + fmt(result.final_state.rho.minCoeff()) + " e_final=" + fmt(result.final_state.e));
  write_report(report, out);
  return report;
}

ExperimentReport run_stationary_experiment(const RunConfig& cfg, const std::optional<fs::path>& out) {
  const fs::path dir = prepare(out);
  ExperimentReport report;
  report.experiment = "stationary";
  std::optional<GridField> shared;

  for (Variant v : cfg.stationary_variants) {
    if ((v == Variant::Classical) != cfg.model.classical())
      throw ConfigError("stationary.variants", "stationary.variants: " + std::string(to_string(v)) +
                                                   " is inconsistent with model.c");
    KfpConfig kcfg = cfg.kfp_config();
    kcfg.variant = v;
    const std::string tag = std::string(to_string(v)) + ".";
    const StationarityResult result = run_to_stationarity(kcfg, cfg.tolerance);
    if (out) {
      write_timeseries_csv(result.records, dir / ("timeseries_" + std::string(to_string(v)) + ".csv"));
      dump_density(result.final_state, kcfg.grid, result.t_end, dir / ("density_final_" + std::string(to_string(v)) + ".txt"));
    }

    report.require_at_most(tag + "l1_to_maxwellian", result.l1_final, cfg.tolerance);
    double rel_increase = 0.0;
    for (std::size_t k = 1; k < result.records.size(); ++k)
      rel_increase = std::max(rel_increase, *result.records[k].relEnt - *result.records[k - 1].relEnt);
    report.require_at_most(tag + "relative_entropy_increase_max", rel_increase, 1e-8);
    entropy_checks(report, result.records, tag);

    const DiagnosticsRecord& last = result.records.back();
    report.require_at_most(tag + "energy_relative_drift",
                           std::abs(last.E - result.initial_energy) / std::abs(result.initial_energy), 1e-6);

    const KineticSystem system = kcfg.system();
    const State equilibrium{result.maxwellian, 0.0};
    const double flux_residual = system.grid().norm(kfp_dissipative_rhs(equilibrium, system).rho);
    const double flux_scale = kfp_dissipative_scale(equilibrium, system);
    report.require_at_most(tag + "dissipative_tendency_at_maxwellian", flux_residual / flux_scale, 1e-14);

    if (shared) {
      report.require_at_most(tag + "maxwellian_difference_vs_first_variant", (*shared - result.maxwellian).abs().maxCoeff(), 0.0);
    } else {
      shared = result.maxwellian;
    }
    report.note(tag + " converged_at_t=" + fmt(result.t_end) + " steps=" + std::to_string(result.steps) +
                " l1_initial=" + fmt(result.l1_initial));
    report.note(tag + " e_final=" + fmt(result.final_state.e) + " e_inf_predicted=" + fmt(result.predicted_excess));
  }
  write_report(report, out);
  return report;
}

// Verification suite.

namespace {

using LVector = VectorX<long double>;
using LMatrix = MatrixX<long double>;

GridField random_density(SplitMix64& rng, const PhaseGrid& grid) {
  GridField rho(grid.nq(), grid.np());
  for (Eigen::Index k = 0; k < rho.size(); ++k) rho(k) = std::exp(rng.uniform(-1.0, 1.0));
  return rho / grid.integrate(rho);
}

CotangentVector random_cotangent(SplitMix64& rng, const PhaseGrid& grid) {
  CotangentVector v{GridField(grid.nq(), grid.np()), 0.0};
  for (Eigen::Index k = 0; k < v.xi.size(); ++k) v.xi(k) = rng.uniform(-1.0, 1.0);
  v.r = rng.uniform(-1.0, 1.0);
  return v;
}

/// Random polynomial of degree <= 3 in n variables.
ScalarFunction<long double> random_polynomial(SplitMix64& rng, int n, int degree) {
  std::vector<long double> linear(n), quadratic(n * n), cubic(n * n * n, 0.0L);
  for (auto& a : linear) a = rng.uniform(-1.0, 1.0);
  for (auto& a : quadratic) a = rng.uniform(-1.0, 1.0);
  if (degree >= 3)
    for (auto& a : cubic) a = rng.uniform(-1.0, 1.0);
  return [=](const LVector& z) {
    long double f = 0.0L;
    for (int i = 0; i < n; ++i) {
      f += linear[i] * z(i);
      for (int j = 0; j < n; ++j) {
        f += quadratic[i * n + j] * z(i) * z(j);
        for (int k = 0; k < n; ++k) f += cubic[(i * n + j) * n + k] * z(i) * z(j) * z(k);
      }
    }
    return f;
  };
}

LMatrix random_antisymmetric(SplitMix64& rng, int n) {
  LMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a - a.transpose();
}

LVector random_point(SplitMix64& rng, int n) {
  LVector z(n);
  for (int i = 0; i < n; ++i) z(i) = rng.uniform(-1.0, 1.0);
  return z;
}

}  // namespace

ExperimentReport run_verify(const RunConfig& cfg, const std::optional<fs::path>& out) {
  prepare(out);
  SplitMix64 rng(cfg.seed);
  const KfpConfig kcfg = cfg.kfp_config();
  const KineticSystem system = kcfg.system();
  const PhaseGrid& grid = system.grid();
  const ModelParams& params = system.params();
  const int samples = cfg.verify_samples;
  const int states = std::max(1, samples / 100);

  ExperimentReport report;
  report.experiment = "verify";

  double antisym = 0.0, sym = 0.0, psd = std::numeric_limits<double>::infinity(), deg_m = 0.0, dual = 0.0;
  double mass_l = 0.0, mass_m = 0.0, adjoint = 0.0;
  const int per_state = std::max(1, samples / states);
  for (int s = 0; s < states; ++s) {
    const State state{random_density(rng, grid), rng.uniform(-1.0, 1.0)};
    for (int k = 0; k < per_state; ++k) {
      const CotangentVector v1 = random_cotangent(rng, grid);
      const CotangentVector v2 = random_cotangent(rng, grid);
      const Tangent l2 = apply_poisson(state, v2, grid);
      const Tangent m1 = apply_dissipative(state, v1, system);
      if (k % 10 == 0) {
        const Tangent l1 = apply_poisson(state, v1, grid);
        const Tangent m2 = apply_dissipative(state, v2, system);
        antisym = std::max(antisym, std::abs(pairing(v1, l2, grid) + pairing(v2, l1, grid)) /
                                        (pairing_scale(v1, l2, grid) + pairing_scale(v2, l1, grid)));
        sym = std::max(sym, std::abs(pairing(v1, m2, grid) - pairing(v2, m1, grid)) /
                                (pairing_scale(v1, m2, grid) + pairing_scale(v2, m1, grid)));
        mass_l = std::max(mass_l, std::abs(l2.rho.sum()) / l2.rho.abs().sum());
        mass_m = std::max(mass_m, std::abs(m1.rho.sum()) / m1.rho.abs().sum());

        const GridField a = v1.xi, b = v2.xi;
        const double adj_q = grid.inner(a, div_q(b, grid)) + grid.inner(grad_q(a, grid), b);
        const double adj_p = grid.inner(a, div_p(b, grid)) + grid.inner(grad_p(a, grid), b);
        const double adj_scale = (a * div_q(b, grid)).abs().sum() * grid.cell_volume() +
                                 (a * div_p(b, grid)).abs().sum() * grid.cell_volume();
        adjoint = std::max(adjoint, (std::abs(adj_q) + std::abs(adj_p)) / adj_scale);
      }
      const double scale = pairing_scale(v1, m1, grid);
      psd = std::min(psd, pairing(v1, m1, grid) / scale);
    }
    const DegeneracyResiduals res = degeneracy_residuals(state, system);
    deg_m = std::max(deg_m, res.dissipative_energy / res.dissipative_energy_scale);

    const Tangent a = kfp_rhs(state, system);
    const Tangent b = generic_rhs(state, system);
    const double dual_scale = grid.norm(a.rho.abs()) + grid.norm(b.rho.abs());
    dual = std::max(dual, (grid.norm(a.rho - b.rho) + std::abs(a.e - b.e)) / dual_scale);
  }
  report.require_at_most("L_antisymmetry", antisym, 1e-12);
  report.require_at_most("M_symmetry", sym, 1e-12);
  report.require_at_least("M_psd", psd, -1e-14);
  report.require_at_most("M_dE", deg_m, 1e-12);
  report.require_at_most("L_mass_conservation", mass_l, 1e-12);
  report.require_at_most("M_mass_conservation", mass_m, 1e-12);
  report.require_at_most("discrete_adjointness", adjoint, 1e-12);
  report.require_at_most("dual_assembly", dual, 1e-10);

  // Pointwise model identities over random momenta |p| <= 10 mc in d = 1..3.
  {
    const double c = params.classical() ? 1.0 : params.c;
    ModelParams rel = params;
    rel.c = c;
    double fd = 0.0, d_psd = std::numeric_limits<double>::infinity(), dmr = -std::numeric_limits<double>::infinity();
    double speed = 0.0;
    for (int k = 0; k < samples; ++k) {
      const int d = 1 + int(rng.next() % 3);
      Eigen::VectorXd p(d), xi(d);
      for (int i = 0; i < d; ++i) p(i) = rng.uniform(-1.0, 1.0);
      p *= rng.uniform(0.0, 10.0 * rel.m * c) / std::max(p.norm(), 1e-300);
      for (int i = 0; i < d; ++i) xi(i) = rng.uniform(-1.0, 1.0);
      rel.d = d;
      const Eigen::MatrixXd dm = diffusion_matrix(p, Variant::DH, rel);
      const Eigen::VectorXd drift = dm * grad_p_hamiltonian(p, rel);
      fd = std::max(fd, (drift - p / rel.m).norm() / (1.0 + p.norm() / rel.m));
      d_psd = std::min(d_psd, xi.dot(dm * xi) / xi.squaredNorm());
      dmr = std::max(dmr, div_mobility_drift(p, Variant::DMR, rel) - d / rel.m);
      speed = std::max(speed, grad_p_hamiltonian(p, rel).norm() / c);
    }
    report.require_at_most("fluctuation_dissipation", fd, 1e-12);
    report.require_at_least("D_psd", d_psd, -1e-14);
    report.require_at_most("DMR_divergence_excess", dmr, 1e-14);
    report.require_at_most("velocity_over_c", speed, 1.0);
  }

  // Jacobi identity for constant Poisson matrices.
  {
    const int trials = 20;
    LMatrix canonical(2, 2);
    canonical << 0.0L, 1.0L, -1.0L, 0.0L;
    long double quadratic = 0.0L, cubic = 0.0L, constant = 0.0L;
    for (int t = 0; t < trials; ++t) {
      const LVector z2 = random_point(rng, 2);
      const JacobiResult<long double> q = jacobi_residual_fd<long double>(
          canonical, random_polynomial(rng, 2, 2), random_polynomial(rng, 2, 2), random_polynomial(rng, 2, 2), z2);
      quadratic = std::max(quadratic, q.residual);

      const LMatrix l4 = random_antisymmetric(rng, 4);
      const LVector z4 = random_point(rng, 4);
      const JacobiResult<long double> cu = jacobi_residual_fd<long double>(
          l4, random_polynomial(rng, 4, 3), random_polynomial(rng, 4, 3), random_polynomial(rng, 4, 3), z4);
      cubic = std::max(cubic, cu.residual / cu.scale);

      const long double value = rng.uniform(-1.0, 1.0);
      const ScalarFunction<long double> flat = [value](const LVector&) { return value; };
      const JacobiResult<long double> k = jacobi_residual_fd<long double>(
          l4, random_polynomial(rng, 4, 3), random_polynomial(rng, 4, 3), flat, z4);
      constant = std::max(constant, k.residual);
    }
    report.require_at_most("jacobi_quadratic", double(quadratic), 1e-10);
    report.require_at_most("jacobi_cubic_relative", double(cubic), 1e-4);
    report.require_at_most("jacobi_constant", double(constant), 1e-12);
  }

  report.note("grid=" + std::to_string(grid.nq()) + "x" + std::to_string(grid.np()) + " seed=" +
              std::to_string(cfg.seed) + " samples=" + std::to_string(samples) + " variant=" +
              std::string(to_string(system.variant())));
  write_report(report, out);
  return report;
}

// Limit study.

ExperimentReport run_limit_study(const RunConfig& cfg, const std::optional<fs::path>& out) {
  const fs::path dir = prepare(out);
  ExperimentReport report;
  const bool heat = cfg.limit_model == LimitModel::Heat;
  report.experiment = heat ? "limit-study (heat)" : "limit-study (kfp)";

  std::vector<double> deviations;
  if (heat) {
    HeatRunConfig base = cfg.heat_run_config();
    base.params.c = kInfinite;
    double dt = cfg.dt;
    if (!(dt > 0)) {
      dt = stable_heat_dt(base.grid, base.params);
      for (double c : cfg.limit_speeds) {
        ModelParams p = base.params;
        p.c = c;
        dt = std::min(dt, stable_heat_dt(base.grid, p));
      }
    }
    base.dt = dt;
    const Eigen::ArrayXd classical = run_heat(base).final_state.rho;
    for (double c : cfg.limit_speeds) {
      HeatRunConfig run = base;
      run.params.c = c;
      deviations.push_back((run_heat(run).final_state.rho - classical).abs().maxCoeff());
    }
    report.note("dt=" + fmt(dt) + " n=" + std::to_string(base.grid.n()) + " t_final=" + fmt(base.t_final));
  } else {
    KfpConfig base = cfg.kfp_config();
    base.params.c = kInfinite;
    base.variant = Variant::Classical;
    const Variant relativistic = cfg.variant == Variant::Classical ? Variant::DH : cfg.variant;
    double dt = cfg.dt;
    if (!(dt > 0)) {
      dt = stable_kfp_dt(base.system());
      for (double c : cfg.limit_speeds) {
        KfpConfig k = base;
        k.params.c = c;
        k.variant = relativistic;
        dt = std::min(dt, stable_kfp_dt(k.system()));
      }
    }
    base.dt = dt;
    const GridField classical = run_kfp(base).final_state.rho;
    for (double c : cfg.limit_speeds) {
      KfpConfig run = base;
      run.params.c = c;
      run.variant = relativistic;
      deviations.push_back((run_kfp(run).final_state.rho - classical).abs().maxCoeff());
    }
    report.note("variant=" + std::string(to_string(relativistic)) + " dt=" + fmt(dt) + " t_final=" + fmt(base.t_final));
  }

  if (out) {
    const fs::path path = dir / (heat ? "limit_heat.csv" : "limit_kfp.csv");
    std::ofstream csv(path);
    csv << "c,deviation\n";
    for (std::size_t k = 0; k < deviations.size(); ++k)
      csv << format_double(cfg.limit_speeds[k]) << ',' << format_double(deviations[k]) << '\n';
    if (!csv) throw IoError("cannot write '" + path.string() + "'");
  }

  double worst_ratio = 0.0;
  for (std::size_t k = 1; k < deviations.size(); ++k)
    worst_ratio = std::max(worst_ratio, deviations[k] / deviations[k - 1]);
  for (std::size_t k = 0; k < deviations.size(); ++k)
    report.note("c=" + fmt(cfg.limit_speeds[k]) + " deviation=" + fmt(deviations[k]));
  if (deviations.size() > 1) {
    // Strict decrease means every successive ratio is below 1.
    report.checks.push_back({"successive_deviation_ratio_max", worst_ratio, "<", 1.0, worst_ratio < 1.0});
  }
  report.require_at_most("deviation_at_largest_c", deviations.back(), cfg.limit_max_deviation);
  write_report(report, out);
  return report;
}

ExperimentReport run_experiment(const RunConfig& cfg, const std::optional<fs::path>& out) {
  switch (cfg.experiment) {
    case Experiment::Heat: return run_heat_experiment(cfg, out);
    case Experiment::Kfp: return run_kfp_experiment(cfg, out);
    case Experiment::Verify: return run_verify(cfg, out);
    case Experiment::Stationary: return run_stationary_experiment(cfg, out);
    case Experiment::LimitStudy: return run_limit_study(cfg, out);
  }
  throw ConfigError("experiment", "experiment: unsupported");
}

}  // namespace relgen
