#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "relgen/config.hpp"
#include "relgen/experiments.hpp"
#include "relgen/io.hpp"

using namespace relgen;
namespace fs = std::filesystem;

namespace {

RunConfig small_verify(double drift = 0.0) {
  RunConfig cfg = parse_config(
      "experiment = verify\nmodel.c = 1\nmodel.gamma = 0.5\npotential.kind = harmonic\n"
      "grid.nq = 16\ngrid.np = 16\ngrid.lq = 16\ngrid.pmax = 34\nverify.samples = 1000\n");
  cfg.drift_perturbation = drift;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "relgen_experiments_test" / name;
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(RELGEN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("verify passes and is deterministic") {
  const ExperimentReport a = run_verify(small_verify(), std::nullopt);
  const ExperimentReport b = run_verify(small_verify(), std::nullopt);
  CHECK(a.passed());
  CHECK(a.render() == b.render());
  CHECK(a.render().find("result: PASS") != std::string::npos);
}

TEST_CASE("verify detects a perturbed drift column") {
  const ExperimentReport report = run_verify(small_verify(1e-6), std::nullopt);
  REQUIRE(report.find("M_dE") != nullptr);
  CHECK(!report.find("M_dE")->passed);
  CHECK(!report.passed());
}

TEST_CASE("report rendering") {
  ExperimentReport report;
  report.experiment = "demo";
  report.require_at_most("small", 1.0, 2.0);
  report.require_at_least("large", 1.0, 2.0);
  report.note("hello");
  const std::string text = report.render();
  CHECK(text.find("small") != std::string::npos);
  CHECK(text.find("note: hello") != std::string::npos);
  CHECK(text.find("result: FAIL") != std::string::npos);
  CHECK(report.find("missing") == nullptr);
}

TEST_CASE("heat limit study writes its sweep") {
  const RunConfig cfg = parse_config(
      "experiment = limit-study\nlimit.model = heat\ngrid.n = 64\nsolver.t_final = 0.01\n"
      "init.kind = gaussian\ninit.width = 0.1\n");
  const fs::path dir = scratch("limit");
  const ExperimentReport report = run_limit_study(cfg, dir);
  CHECK(report.passed());
  std::ifstream in(dir / "limit_heat.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "c,deviation");
  CHECK(fs::exists(dir / "report.txt"));
}

TEST_CASE("heat experiment artifacts") {
  const RunConfig cfg = parse_config(
      "experiment = heat\nmodel.c = 1\ngrid.n = 64\nsolver.t_final = 0.01\nsolver.record_every = 20\n"
      "output.dump_every = 40\n");
  const fs::path dir = scratch("heat");
  CHECK(run_heat_experiment(cfg, dir).passed());
  const std::vector<DiagnosticsRecord> series = read_timeseries_csv(dir / "timeseries.csv");
  CHECK(series.size() > 2);
  CHECK(series.back().t == doctest::Approx(0.01));
  CHECK(load_density(dir / "density_final.txt").kind == "heat");
  CHECK(fs::exists(dir / "density_00000040.txt"));
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const std::string ok = (dir / "ok.cfg").string();
  std::ofstream(ok) << "experiment = heat\nmodel.c = 1\ngrid.n = 32\nsolver.t_final = 0.001\n";
  const std::string bad = (dir / "bad.cfg").string();
  std::ofstream(bad) << "experiment = heat\nmodel.theta = -1\n";
  const std::string failing = (dir / "failing.cfg").string();
  std::ofstream(failing) << "experiment = verify\nmodel.c = 1\ngrid.nq = 16\ngrid.np = 16\ngrid.pmax = 34\n"
                            "verify.samples = 200\nverify.drift_perturbation = 1e-6\n";
  const std::string out = " --out " + (dir / "out").string();

  CHECK(run_cli("heat --config " + ok + out) == 0);
  CHECK(fs::exists(dir / "out" / "report.txt"));
  CHECK(run_cli("heat --config " + bad + out) == 2);
  CHECK(run_cli("heat --config " + (dir / "missing.cfg").string() + out) == 2);
  CHECK(run_cli("kfp --config " + ok + out) == 2);
  CHECK(run_cli("nonsense --config " + ok + out) == 2);
  CHECK(run_cli("verify --config " + failing + out + " --seed 3") == 1);
}
