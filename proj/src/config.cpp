#include "relgen/config.hpp"

#include <cerrno>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace relgen {

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Heat: return "heat";
    case Experiment::Kfp: return "kfp";
    case Experiment::Verify: return "verify";
    case Experiment::Stationary: return "stationary";
    case Experiment::LimitStudy: return "limit-study";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::Heat, Experiment::Kfp, Experiment::Verify, Experiment::Stationary,
                       Experiment::LimitStudy})
    if (name == to_string(e)) return e;
  throw ConfigError("experiment", "experiment: unknown experiment '" + std::string(name) +
                                      "' (expected heat, kfp, verify, stationary or limit-study)");
}

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "experiment",       "model.m",          "model.c",           "model.gamma",          "model.theta",
    "model.nu",         "model.variant",    "potential.kind",    "potential.stiffness",  "potential.amplitude",
    "potential.period", "grid.nq",          "grid.np",           "grid.lq",              "grid.pmax",
    "grid.n",           "grid.length",      "solver.dt",         "solver.t_final",       "solver.record_every",
    "solver.tolerance", "init.kind",        "init.width",        "init.center",          "init.q0",
    "init.p0",          "init.sigma_q",     "init.sigma_p",      "output.dir",           "output.dump_every",
    "seed",             "verify.samples",   "verify.drift_perturbation", "stationary.variants", "limit.model",
    "limit.speeds",     "limit.max_deviation", "heat.threshold", "heat.check_finite_speed",
    "heat.check_full_support",
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Entry {
  std::string value;
  int line;
};

class Document {
 public:
  explicit Document(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("", "line " + std::to_string(line_no) + ": expected `key = value`, got '" + line + "'");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      if (!kKnownKeys.contains(key))
        throw ConfigError(key, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      if (value.empty()) throw ConfigError(key, "line " + std::to_string(line_no) + ": " + key + " has no value");
      if (!entries_.emplace(key, Entry{value, line_no}).second)
        throw ConfigError(key, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return entries_.contains(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? "" : "line " + std::to_string(it->second.line) + ": ";
    throw ConfigError(key, where + key + ": " + what);
  }

  const std::string* raw(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second.value;
  }

  void number(const std::string& key, double& target, bool allow_infinite = false) const {
    const std::string* v = raw(key);
    if (!v) return;
    if (allow_infinite && (*v == "inf" || *v == "INFINITE" || *v == "infinite")) {
      target = kInfinite;
      return;
    }
    target = parse_number(key, *v);
  }

  double parse_number(const std::string& key, const std::string& text) const {
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(x))
      fail(key, "expected a finite number, got '" + text + "'");
    return x;
  }

  template <typename Int>
  void integer(const std::string& key, Int& target) const {
    const std::string* v = raw(key);
    if (!v) return;
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size() || errno == ERANGE) fail(key, "expected an integer, got '" + *v + "'");
    target = Int(x);
    if ((long long)target != x) fail(key, "integer out of range");
  }

  void flag(const std::string& key, bool& target) const {
    const std::string* v = raw(key);
    if (!v) return;
    if (*v == "true") target = true;
    else if (*v == "false") target = false;
    else fail(key, "expected true or false, got '" + *v + "'");
  }

  void text(const std::string& key, std::string& target) const {
    if (const std::string* v = raw(key)) target = *v;
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> items;
    const std::string* v = raw(key);
    if (!v) return items;
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      items.push_back(item);
    }
    return items;
  }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

void require_positive(const Document& doc, const std::string& key, double value) {
  if (!(value > 0)) {
    std::ostringstream msg;
    msg << "must be > 0 (got " << value << ")";
    doc.fail(key, msg.str());
  }
}

void require_nonnegative(const Document& doc, const std::string& key, double value) {
  if (!(value >= 0)) {
    std::ostringstream msg;
    msg << "must be >= 0 (got " << value << ")";
    doc.fail(key, msg.str());
  }
}

void require_grid_count(const Document& doc, const std::string& key, int value) {
  if (value < 8 || value % 2 != 0) doc.fail(key, "must be an even integer >= 8 (got " + std::to_string(value) + ")");
}

Variant variant_from(const Document& doc, const std::string& key, const std::string& name) {
  try {
    return parse_variant(name);
  } catch (const InvalidArgument&) {
    doc.fail(key, "unknown variant '" + name + "' (expected DMR, DH or Classical)");
  }
}

}  // namespace

RunConfig parse_config(std::string_view text, std::optional<Experiment> experiment) {
  const Document doc(text);
  RunConfig cfg;
  if (experiment) cfg.experiment = *experiment;

  if (const std::string* e = doc.raw("experiment")) {
    Experiment named{};
    try {
      named = parse_experiment(*e);
    } catch (const ConfigError&) {
      doc.fail("experiment", "unknown experiment '" + *e + "' (expected heat, kfp, verify, stationary or limit-study)");
    }
    if (experiment && named != *experiment)
      doc.fail("experiment",
               "config is for '" + *e + "' but '" + std::string(to_string(*experiment)) + "' was requested");
    cfg.experiment = named;
  } else if (!experiment) {
    throw ConfigError("experiment", "experiment: missing; set `experiment = ...` or name it on the command line");
  }

  doc.number("model.m", cfg.model.m);
  doc.number("model.c", cfg.model.c, true);
  doc.number("model.gamma", cfg.model.gamma);
  doc.number("model.theta", cfg.model.theta);
  doc.number("model.nu", cfg.model.nu);
  require_positive(doc, "model.m", cfg.model.m);
  require_positive(doc, "model.c", cfg.model.c);
  require_positive(doc, "model.gamma", cfg.model.gamma);
  require_positive(doc, "model.theta", cfg.model.theta);
  require_positive(doc, "model.nu", cfg.model.nu);

  cfg.variant = cfg.model.classical() ? Variant::Classical : Variant::DH;
  if (const std::string* v = doc.raw("model.variant")) cfg.variant = variant_from(doc, "model.variant", *v);
  if (cfg.variant == Variant::Classical && !cfg.model.classical())
    doc.fail("model.variant", "Classical requires model.c = inf");
  if (cfg.variant != Variant::Classical && cfg.model.classical())
    doc.fail("model.variant", std::string(to_string(cfg.variant)) + " requires a finite model.c");

  {
    std::string kind = "zero";
    double stiffness = 1.0, amplitude = 1.0, period = 2.0 * std::numbers::pi;
    doc.text("potential.kind", kind);
    doc.number("potential.stiffness", stiffness);
    doc.number("potential.amplitude", amplitude);
    doc.number("potential.period", period);
    if (kind == "zero") {
      cfg.potential = Potential::zero();
    } else if (kind == "harmonic") {
      require_nonnegative(doc, "potential.stiffness", stiffness);
      cfg.potential = Potential::harmonic(stiffness);
    } else if (kind == "cosine") {
      require_nonnegative(doc, "potential.amplitude", amplitude);
      require_positive(doc, "potential.period", period);
      cfg.potential = Potential::cosine(amplitude, period);
    } else {
      doc.fail("potential.kind", "unknown potential '" + kind + "' (expected zero, harmonic or cosine)");
    }
  }

  doc.integer("grid.nq", cfg.nq);
  doc.integer("grid.np", cfg.np);
  doc.number("grid.lq", cfg.lq);
  doc.number("grid.pmax", cfg.pmax);
  doc.integer("grid.n", cfg.n);
  doc.number("grid.length", cfg.length);
  require_grid_count(doc, "grid.nq", cfg.nq);
  require_grid_count(doc, "grid.np", cfg.np);
  require_grid_count(doc, "grid.n", cfg.n);
  require_positive(doc, "grid.lq", cfg.lq);
  require_positive(doc, "grid.pmax", cfg.pmax);
  require_positive(doc, "grid.length", cfg.length);

  doc.number("solver.dt", cfg.dt);
  doc.number("solver.t_final", cfg.t_final);
  doc.integer("solver.record_every", cfg.record_every);
  doc.number("solver.tolerance", cfg.tolerance);
  require_nonnegative(doc, "solver.dt", cfg.dt);
  require_positive(doc, "solver.t_final", cfg.t_final);
  if (cfg.record_every < 1) doc.fail("solver.record_every", "must be >= 1");
  require_positive(doc, "solver.tolerance", cfg.tolerance);

  doc.text("init.kind", cfg.init_kind);
  doc.number("init.width", cfg.init_width);
  doc.number("init.center", cfg.init_center);
  doc.number("init.q0", cfg.init_q0);
  doc.number("init.p0", cfg.init_p0);
  doc.number("init.sigma_q", cfg.init_sigma_q);
  doc.number("init.sigma_p", cfg.init_sigma_p);
  require_positive(doc, "init.width", cfg.init_width);
  require_positive(doc, "init.sigma_q", cfg.init_sigma_q);
  require_positive(doc, "init.sigma_p", cfg.init_sigma_p);
  {
    const bool heat_like = cfg.experiment == Experiment::Heat ||
                           (cfg.experiment == Experiment::LimitStudy && !doc.has("limit.model")) ||
                           (cfg.experiment == Experiment::LimitStudy && *doc.raw("limit.model") == "heat");
    const std::set<std::string> heat_kinds{"uniform", "gaussian", "bump"};
    const std::set<std::string> kfp_kinds{"uniform", "gaussian", "maxwellian", "shifted-maxwellian"};
    const auto& allowed = heat_like ? heat_kinds : kfp_kinds;
    if (!allowed.contains(cfg.init_kind))
      doc.fail("init.kind", "unsupported initial condition '" + cfg.init_kind + "' for this experiment");
  }

  {
    std::string dir;
    doc.text("output.dir", dir);
    if (!dir.empty()) cfg.output_dir = dir;
  }
  doc.integer("output.dump_every", cfg.dump_every);
  if (cfg.dump_every < 0) doc.fail("output.dump_every", "must be >= 0");

  if (const std::string* s = doc.raw("seed")) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(s->c_str(), &end, 10);
    if (s->empty() || (*s)[0] == '-' || end != s->c_str() + s->size() || errno == ERANGE)
      doc.fail("seed", "expected an unsigned 64-bit integer, got '" + *s + "'");
    cfg.seed = x;
  }

  doc.integer("verify.samples", cfg.verify_samples);
  if (cfg.verify_samples < 1) doc.fail("verify.samples", "must be >= 1");
  doc.number("verify.drift_perturbation", cfg.drift_perturbation);

  if (doc.has("stationary.variants")) {
    cfg.stationary_variants.clear();
    for (const std::string& name : doc.list("stationary.variants"))
      cfg.stationary_variants.push_back(variant_from(doc, "stationary.variants", name));
  }

  if (const std::string* m = doc.raw("limit.model")) {
    if (*m == "heat") cfg.limit_model = LimitModel::Heat;
    else if (*m == "kfp") cfg.limit_model = LimitModel::Kfp;
    else doc.fail("limit.model", "expected heat or kfp, got '" + *m + "'");
  }
  if (doc.has("limit.speeds")) {
    cfg.limit_speeds.clear();
    for (const std::string& item : doc.list("limit.speeds"))
      cfg.limit_speeds.push_back(doc.parse_number("limit.speeds", item));
    if (cfg.limit_speeds.empty()) doc.fail("limit.speeds", "needs at least one value");
    for (std::size_t k = 0; k < cfg.limit_speeds.size(); ++k) {
      if (!(cfg.limit_speeds[k] > 0)) doc.fail("limit.speeds", "speeds must be positive");
      if (k > 0 && !(cfg.limit_speeds[k] > cfg.limit_speeds[k - 1]))
        doc.fail("limit.speeds", "speeds must be strictly increasing");
    }
  }
  cfg.limit_max_deviation = cfg.limit_model == LimitModel::Heat ? 1e-4 : 1e-3;
  doc.number("limit.max_deviation", cfg.limit_max_deviation);
  require_positive(doc, "limit.max_deviation", cfg.limit_max_deviation);

  doc.number("heat.threshold", cfg.support_threshold);
  require_positive(doc, "heat.threshold", cfg.support_threshold);
  doc.flag("heat.check_finite_speed", cfg.check_finite_speed);
  doc.flag("heat.check_full_support", cfg.check_full_support);
  if (cfg.check_finite_speed && cfg.model.classical())
    doc.fail("heat.check_finite_speed", "needs a finite model.c");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Experiment> experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), experiment);
}

HeatRunConfig RunConfig::heat_run_config() const {
  HeatRunConfig out;
  out.grid = heat_grid();
  out.params = model;
  out.dt = dt;
  out.t_final = t_final;
  out.record_every = record_every;
  if (init_kind == "uniform") out.init.kind = HeatInit::Kind::Uniform;
  else if (init_kind == "bump") out.init.kind = HeatInit::Kind::Bump;
  else out.init.kind = HeatInit::Kind::Gaussian;
  out.init.width = init_width;
  out.init.center = init_center;
  return out;
}

KfpConfig RunConfig::kfp_config() const {
  KfpConfig out;
  out.grid = phase_grid();
  out.params = model;
  out.potential = potential;
  out.variant = variant;
  out.options.drift_perturbation = drift_perturbation;
  out.dt = dt;
  out.t_final = t_final;
  out.record_every = record_every;
  if (init_kind == "uniform") out.init.kind = KfpInit::Kind::Uniform;
  else if (init_kind == "maxwellian") out.init.kind = KfpInit::Kind::Maxwellian;
  else if (init_kind == "shifted-maxwellian") out.init.kind = KfpInit::Kind::ShiftedMaxwellian;
  else out.init.kind = KfpInit::Kind::Gaussian;
  out.init.q0 = init_q0;
  out.init.p0 = init_p0;
  out.init.sigma_q = init_sigma_q;
  out.init.sigma_p = init_sigma_p;
  return out;
}

}  // namespace relgen
