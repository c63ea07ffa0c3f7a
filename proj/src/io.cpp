#include "relgen/io.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace relgen {

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

double parse_double(const std::string& field, const std::filesystem::path& path) {
  if (field.empty()) throw IoError("empty numeric field in '" + path.string() + "'");
  char* end = nullptr;
  const double x = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size())
    throw IoError("malformed number '" + field + "' in '" + path.string() + "'");
  return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void write_timeseries_csv(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw InvalidArgument("refusing to write an empty time series to '" + path.string() + "'");
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].t < records[k - 1].t) throw InvalidArgument("time series is not monotone in t");

  std::ofstream out = open_for_writing(path);
  out << kTimeseriesHeader << '\n';
  for (const DiagnosticsRecord& r : records) {
    out << format_double(r.t) << ',' << format_double(r.E) << ',' << format_double(r.S) << ','
        << format_double(r.mass) << ',' << format_double(r.dSdt) << ',' << format_double(r.degL) << ','
        << format_double(r.degM) << ',' << (r.relEnt ? format_double(*r.relEnt) : std::string()) << ','
        << format_double(r.e) << '\n';
  }
  finish(out, path);
}

std::vector<DiagnosticsRecord> read_timeseries_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader)
    throw IoError("'" + path.string() + "' does not start with the time-series header");
  std::vector<DiagnosticsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 9) throw IoError("expected 9 fields per row in '" + path.string() + "'");
    DiagnosticsRecord r;
    r.t = parse_double(f[0], path);
    r.E = parse_double(f[1], path);
    r.S = parse_double(f[2], path);
    r.mass = parse_double(f[3], path);
    r.dSdt = parse_double(f[4], path);
    r.degL = parse_double(f[5], path);
    r.degM = parse_double(f[6], path);
    if (!f[7].empty()) r.relEnt = parse_double(f[7], path);
    r.e = parse_double(f[8], path);
    records.push_back(r);
  }
  return records;
}

void dump_density(const State& state, const PhaseGrid& grid, double t, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  out << "# kind=kfp\n"
      << "# Nq=" << grid.nq() << " Np=" << grid.np() << " Lq=" << format_double(grid.lq())
      << " Pmax=" << format_double(grid.pmax()) << " t=" << format_double(t) << '\n';
  for (int i = 0; i < grid.nq(); ++i)
    for (int j = 0; j < grid.np(); ++j)
      out << i << ',' << j << ',' << format_double(grid.q(i)) << ',' << format_double(grid.p(j)) << ','
          << format_double(state.rho(i, j)) << '\n';
  finish(out, path);
}

void dump_density(const HeatState& state, const HeatGrid& grid, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  out << "# kind=heat\n"
      << "# Nq=" << grid.n() << " Lq=" << format_double(grid.length()) << " t=" << format_double(state.t) << '\n';
  for (int i = 0; i < grid.n(); ++i)
    out << i << ',' << format_double(grid.x(i)) << ',' << format_double(state.rho(i)) << '\n';
  finish(out, path);
}

double DensityDump::mass() const {
  const double hq = lq / nq;
  const double hp = kind == "kfp" ? 2.0 * pmax / np : 1.0;
  return rho.sum() * hq * hp;
}

DensityDump load_density(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  DensityDump dump;

  if (!std::getline(in, line) || line.rfind("# kind=", 0) != 0)
    throw IoError("'" + path.string() + "' lacks the kind header");
  dump.kind = line.substr(7);
  if (dump.kind != "kfp" && dump.kind != "heat") throw IoError("unknown dump kind '" + dump.kind + "'");

  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw IoError("'" + path.string() + "' lacks the metadata header");
  std::map<std::string, std::string> meta;
  std::istringstream tokens(line.substr(2));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw IoError("malformed metadata '" + token + "'");
    meta[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto need = [&](const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw IoError("metadata key '" + key + "' missing in '" + path.string() + "'");
    return it->second;
  };
  const bool kinetic = dump.kind == "kfp";
  dump.nq = int(parse_double(need("Nq"), path));
  dump.lq = parse_double(need("Lq"), path);
  dump.t = parse_double(need("t"), path);
  if (kinetic) {
    dump.np = int(parse_double(need("Np"), path));
    dump.pmax = parse_double(need("Pmax"), path);
  }
  if (dump.nq < 1 || dump.np < 1) throw IoError("bad grid size in '" + path.string() + "'");
  dump.rho = Eigen::ArrayXXd::Constant(dump.nq, dump.np, std::numeric_limits<double>::quiet_NaN());

  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != (kinetic ? 5u : 3u)) throw IoError("wrong field count in '" + path.string() + "'");
    const int i = std::stoi(f[0]);
    const int j = kinetic ? std::stoi(f[1]) : 0;
    if (i < 0 || i >= dump.nq || j < 0 || j >= dump.np) throw IoError("cell index out of range");
    dump.rho(i, j) = parse_double(f.back(), path);
    ++rows;
  }
  if (rows != long(dump.nq) * dump.np || !dump.rho.allFinite())
    throw IoError("'" + path.string() + "' does not cover every cell exactly once");
  return dump;
}

}  // namespace relgen
