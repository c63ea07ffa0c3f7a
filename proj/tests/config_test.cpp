#include <string>

#include "doctest.h"
#include "relgen/config.hpp"

using namespace relgen;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return std::string(e.key()) + " | " + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a minimal heat config takes the defaults") {
  const RunConfig cfg = parse_config("experiment = heat\n");
  CHECK(cfg.experiment == Experiment::Heat);
  CHECK(cfg.model.m == 1.0);
  CHECK(cfg.model.classical());
  CHECK(cfg.variant == Variant::Classical);
  CHECK(cfg.n == 256);
  CHECK(cfg.seed == 1);
  CHECK(cfg.limit_max_deviation == 1e-4);
  CHECK(cfg.heat_run_config().grid == HeatGrid(256, 1.0));
}

TEST_CASE("comments, whitespace and finite c") {
  const RunConfig cfg = parse_config(
      "# comment\n"
      "experiment = kfp   # trailing\n"
      "\n"
      "  model.c = 2.5\n"
      "model.variant = DMR\n"
      "potential.kind = cosine\n"
      "potential.amplitude = 0.5\n"
      "seed = 18446744073709551615\n");
  CHECK(cfg.model.c == 2.5);
  CHECK(cfg.variant == Variant::DMR);
  CHECK(cfg.potential.kind() == Potential::Kind::Cosine);
  CHECK(cfg.seed == 18446744073709551615ull);
  CHECK(parse_config("experiment = kfp\nmodel.c = 3\n").variant == Variant::DH);
  CHECK(parse_config("experiment = limit-study\nlimit.model = kfp\n").limit_max_deviation == 1e-3);
}

TEST_CASE("constraint violations name the key") {
  const std::string err = error_of("experiment = heat\nmodel.theta = -1\n");
  CHECK(err.find("model.theta") == 0);
  CHECK(err.find("line 2") != std::string::npos);
  CHECK(err.find("> 0") != std::string::npos);
}

TEST_CASE("unknown, duplicate and malformed entries are rejected") {
  CHECK(error_of("experiment = heat\nmodel.tmperature = 1\n").find("model.tmperature") == 0);
  CHECK(error_of("experiment = heat\nmodel.m = 1\nmodel.m = 2\n").find("duplicate") != std::string::npos);
  CHECK(error_of("experiment = heat\nmodel.m = abc\n").find("model.m") == 0);
  CHECK(error_of("experiment = heat\nmodel.m\n").find("expected") != std::string::npos);
  CHECK(error_of("experiment = warp\n").find("experiment") == 0);
  CHECK(error_of("experiment = kfp\nmodel.c = inf\nmodel.variant = DH\n").find("model.variant") == 0);
  CHECK(error_of("experiment = heat\ninit.kind = maxwellian\n").find("init.kind") == 0);
}

TEST_CASE("the requested experiment must agree with the document") {
  CHECK(parse_config("model.m = 2\n", Experiment::Verify).experiment == Experiment::Verify);
  CHECK_THROWS_AS(parse_config("experiment = heat\n", Experiment::Kfp), ConfigError);
  CHECK(error_of("model.m = 2\n").find("experiment") == 0);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("committed configs parse") {
  for (const char* name : {"verify", "kfp_conservation", "stationary", "limit_heat", "limit_kfp", "heat_finite_speed",
                           "heat_classical_control"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(RELGEN_CONFIG_DIR) + "/" + name + ".cfg"));
  }
}
