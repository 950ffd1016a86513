#include "bench/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "heat3d/decomp.hpp"
#include "heat3d/solver.hpp"

namespace bench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_int(std::string_view key, std::string_view v) {
  T out{};
  const auto s = trim(v);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("bad integer for " + std::string(key) + ": '" + s + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const auto s = trim(v);
  double out = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc{} && p == s.data() + s.size() && !s.empty()) return out;
  throw ConfigError("bad number for " + std::string(key) + ": '" + s + "'");
}

std::size_t hop_index(std::string_view suffix) {
  if (suffix == "intra") return 0;
  if (suffix == "rank1") return 1;
  if (suffix == "rank2") return 2;
  return 3;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

heat3d::GridSpec Experiment::grid() const {
  heat3d::GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = dx;
  g.dy = dy;
  g.dz = dz;
  g.boundary_temp = boundary_temp;
  g.initial_temp = initial_temp;
  g.seed = seed;
  return g;
}

heat3d::SolverParams Experiment::params() const {
  heat3d::SolverParams p;
  p.iterations = iterations;
  p.alpha0 = alpha0;
  p.alpha_slope = alpha_slope;
  p.check_interval = check_interval;
  p.convergence_eps = convergence_eps;
  p.dt = dt ? *dt : heat3d::stable_dt(grid(), p);
  return p;
}

pgas::RuntimeConfig Experiment::runtime() const {
  pgas::RuntimeConfig c;
  c.num_units = units;
  c.node_size = node_size;
  c.blades_per_chassis = blades_per_chassis;
  c.chassis_per_group = chassis_per_group;
  c.latency = latency;
  c.routing = mode;
  return c;
}

void Experiment::validate() const {
  if (repetitions < 1) throw ConfigError("reps must be >= 1");
  try {
    runtime().validate();
  } catch (const pgas::Error& err) {
    throw ConfigError(err.what());
  }
  heat3d::validate(grid(), params());
  (void)heat3d::decompose(grid(), static_cast<int>(units));
}

std::string_view mode_name(pgas::RoutingMode m) {
  return m == pgas::RoutingMode::Oblivious ? "oblivious" : "locality_aware";
}

pgas::RoutingMode parse_mode(std::string_view s) {
  const auto t = trim(s);
  if (t == "locality_aware") return pgas::RoutingMode::LocalityAware;
  if (t == "oblivious") return pgas::RoutingMode::Oblivious;
  throw ConfigError("mode must be locality_aware or oblivious, got '" + t + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "units",          "node_size",     "blades_per_chassis", "chassis_per_group", "grid",
      "nx",             "ny",            "nz",                 "iters",             "mode",
      "reps",           "seed",          "csv",                "dump_field",        "dt",
      "dx",             "dy",            "dz",                 "alpha0",            "alpha_slope",
      "boundary_temp",  "initial_temp",  "check_interval",     "convergence_eps",   "base_intra_us",
      "base_rank1_us",  "base_rank2_us", "base_rank3_us",      "invbw_intra_ns",    "invbw_rank1_ns",
      "invbw_rank2_ns", "invbw_rank3_ns"};
  return keys;
}

void apply_setting(Experiment& e, std::string_view key, std::string_view value) {
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    std::string msg = "unknown key '" + std::string(key) + "'; valid keys:";
    for (const auto& k : keys) msg += " " + k;
    throw ConfigError(msg);
  }
  const std::string v = trim(value);
  if (key == "units") e.units = parse_int<std::uint32_t>(key, v);
  else if (key == "node_size") e.node_size = parse_int<std::uint32_t>(key, v);
  else if (key == "blades_per_chassis") e.blades_per_chassis = parse_int<std::uint32_t>(key, v);
  else if (key == "chassis_per_group") e.chassis_per_group = parse_int<std::uint32_t>(key, v);
  else if (key == "grid") {
    const auto a = v.find_first_of("xX");
    const auto b = a == std::string::npos ? a : v.find_first_of("xX", a + 1);
    if (b == std::string::npos) throw ConfigError("grid must look like NXxNYxNZ, got '" + v + "'");
    e.nx = parse_int<std::int64_t>("grid", std::string_view(v).substr(0, a));
    e.ny = parse_int<std::int64_t>("grid", std::string_view(v).substr(a + 1, b - a - 1));
    e.nz = parse_int<std::int64_t>("grid", std::string_view(v).substr(b + 1));
  } else if (key == "nx") e.nx = parse_int<std::int64_t>(key, v);
  else if (key == "ny") e.ny = parse_int<std::int64_t>(key, v);
  else if (key == "nz") e.nz = parse_int<std::int64_t>(key, v);
  else if (key == "iters") e.iterations = parse_int<std::int64_t>(key, v);
  else if (key == "mode") e.mode = parse_mode(v);
  else if (key == "reps") e.repetitions = parse_int<int>(key, v);
  else if (key == "seed") e.seed = parse_int<std::uint64_t>(key, v);
  else if (key == "csv") e.csv_path = v;
  else if (key == "dump_field") e.dump_field_path = v;
  else if (key == "dt") e.dt = parse_double(key, v);
  else if (key == "dx") e.dx = parse_double(key, v);
  else if (key == "dy") e.dy = parse_double(key, v);
  else if (key == "dz") e.dz = parse_double(key, v);
  else if (key == "alpha0") e.alpha0 = parse_double(key, v);
  else if (key == "alpha_slope") e.alpha_slope = parse_double(key, v);
  else if (key == "boundary_temp") e.boundary_temp = parse_double(key, v);
  else if (key == "initial_temp") e.initial_temp = parse_double(key, v);
  else if (key == "check_interval") e.check_interval = parse_int<std::int64_t>(key, v);
  else if (key == "convergence_eps") e.convergence_eps = parse_double(key, v);
  else if (key.starts_with("base_")) e.latency.base_seconds[hop_index(key.substr(5, 5))] = parse_double(key, v) * 1e-6;
  else e.latency.seconds_per_byte[hop_index(key.substr(6, 5))] = parse_double(key, v) * 1e-9;
}

Experiment parse_config_text(std::string_view text, Experiment base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return base;
}

Experiment parse_config(const std::filesystem::path& path, Experiment base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config_text(text.str(), std::move(base));
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

void set_weak_scaling_grid(Experiment& e, std::int64_t per_unit_edge) {
  const auto t = heat3d::choose_factors(static_cast<int>(e.units));
  e.nx = per_unit_edge * t.px;
  e.ny = per_unit_edge * t.py;
  e.nz = per_unit_edge * t.pz;
}

const ResultRow& ExperimentResult::mean() const {
  for (const auto& r : rows)
    if (r.run == "mean") return r;
  throw std::logic_error("result has no mean row");
}

std::vector<ResultRow> ExperimentResult::runs() const {
  std::vector<ResultRow> out;
  for (const auto& r : rows)
    if (r.run != "mean" && r.run != "stddev") out.push_back(r);
  return out;
}

ExperimentResult run_experiment(const Experiment& e) {
  e.validate();
  const auto grid = e.grid();
  const auto params = e.params();

  ResultRow shape;
  shape.units = e.units;
  shape.node_size = e.node_size;
  shape.blades_per_chassis = e.blades_per_chassis;
  shape.chassis_per_group = e.chassis_per_group;
  shape.mode = e.mode;
  shape.nx = e.nx;
  shape.ny = e.ny;
  shape.nz = e.nz;
  shape.iters = e.iterations;

  ExperimentResult result;
  std::vector<double> compute, exchange, sync, pure;
  for (int rep = 0; rep < e.repetitions; ++rep) {
    heat3d::RunOptions opts{e.runtime()};
    opts.assemble_field = rep == 0 && !e.dump_field_path.empty();
    auto report = heat3d::run(grid, params, opts);
    if (report.field) result.field = std::move(report.field);

    ResultRow row = shape;
    row.run = std::to_string(rep);
    row.compute_s = report.compute_seconds;
    row.exchange_s = report.exchange_seconds;
    row.sync_s = report.sync_seconds;
    row.pure_exchange_s = report.pure_exchange_seconds();
    row.envelopes = report.launch.transport.envelopes;
    row.gets = report.total_gets();
    for (const auto& r : report.ranks) row.barriers += r.barriers;
    compute.push_back(row.compute_s);
    exchange.push_back(row.exchange_s);
    sync.push_back(row.sync_s);
    pure.push_back(row.pure_exchange_s);
    result.rows.push_back(row);
  }

  ResultRow mean = result.rows.front();
  mean.run = "mean";
  mean.compute_s = mean_of(compute);
  mean.exchange_s = mean_of(exchange);
  mean.sync_s = mean_of(sync);
  mean.pure_exchange_s = mean_of(pure);
  ResultRow sd = mean;
  sd.run = "stddev";
  sd.compute_s = stddev_of(compute);
  sd.exchange_s = stddev_of(exchange);
  sd.sync_s = stddev_of(sync);
  sd.pure_exchange_s = stddev_of(pure);
  result.rows.push_back(mean);
  result.rows.push_back(sd);
  return result;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.run << ',' << r.units << ',' << r.node_size << ',' << r.blades_per_chassis << ',' << r.chassis_per_group
       << ',' << mode_name(r.mode) << ',' << r.nx << ',' << r.ny << ',' << r.nz << ',' << r.iters << ','
       << r.compute_s << ',' << r.exchange_s << ',' << r.sync_s << ',' << r.pure_exchange_s << '\n';
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write CSV to " + path.string());
  emit_csv(rows, os);
  if (!os.flush()) throw ConfigError("write to " + path.string() + " failed");
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read CSV " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError(path.string() + ": unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 14) throw ConfigError(path.string() + ": row with " + std::to_string(f.size()) + " fields");
    ResultRow r;
    r.run = f[0];
    r.units = parse_int<std::uint32_t>("units", f[1]);
    r.node_size = parse_int<std::uint32_t>("node_size", f[2]);
    r.blades_per_chassis = parse_int<std::uint32_t>("blades_per_chassis", f[3]);
    r.chassis_per_group = parse_int<std::uint32_t>("chassis_per_group", f[4]);
    r.mode = parse_mode(f[5]);
    r.nx = parse_int<std::int64_t>("nx", f[6]);
    r.ny = parse_int<std::int64_t>("ny", f[7]);
    r.nz = parse_int<std::int64_t>("nz", f[8]);
    r.iters = parse_int<std::int64_t>("iters", f[9]);
    r.compute_s = parse_double("compute_s", f[10]);
    r.exchange_s = parse_double("exchange_s", f[11]);
    r.sync_s = parse_double("sync_s", f[12]);
    r.pure_exchange_s = parse_double("pure_exchange_s", f[13]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace bench
