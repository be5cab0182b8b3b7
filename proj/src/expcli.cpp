#include "herald/expcli.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "herald/bounds.hpp"
#include "herald/games.hpp"

namespace herald {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw InvalidArgument("config field '" + field + "': " + msg);
}

bool is_file_ref(const Json& ref) {
  if (ref.is_object()) return ref.contains("file");
  if (!ref.is_string()) return false;
  const auto s = ref.get<std::string>();
  return s.size() > 5 && s.substr(s.size() - 5) == ".json";
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (base_dir.empty() || fs::path(p).is_absolute() || fs::exists(p)) return p;
  return (fs::path(base_dir) / p).string();
}

/// Replaces file references by their JSON content.
Json inline_ref(const Json& ref, const std::string& base_dir, const std::string& field) {
  if (!is_file_ref(ref)) return ref;
  const std::string path = ref.is_object() ? ref.at("file").get<std::string>() : ref.get<std::string>();
  try {
    return read_json_file(resolve_path(path, base_dir));
  } catch (const InvalidArgument& e) {
    field_error(field, e.what());
  }
}

std::vector<Json> ref_list(Json& body, const char* key, const std::string& base_dir, bool required) {
  if (!body.contains(key)) {
    if (required) field_error(key, "missing");
    return {};
  }
  Json& list = body[key];
  if (list.is_string() || list.is_object()) list = Json::array({list});
  if (!list.is_array() || list.empty()) field_error(key, "must be a nonempty list");
  std::vector<Json> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string f = std::string(key) + "[" + std::to_string(i) + "]";
    list[i] = inline_ref(list[i], base_dir, f);
    out.push_back(list[i]);
  }
  return out;
}

KrausChannel channel_at(const Json& ref, const std::string& field) {
  try {
    return load_channel(ref);
  } catch (const InvalidArgument& e) {
    field_error(field, e.what());
  }
}

int int_field(const Json& body, const char* key, int fallback, int lo, int hi) {
  if (!body.contains(key)) return fallback;
  const Json& v = body.at(key);
  if (!v.is_number_integer()) field_error(key, "must be an integer");
  const int x = v.get<int>();
  if (x < lo || x > hi) field_error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

std::vector<double> number_list(const Json& body, const char* key) {
  const Json& v = body.at(key);
  if (!v.is_array()) field_error(key, "must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) field_error(key, "must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

HolevoOptions holevo_options(const Json& body, std::uint64_t seed) {
  HolevoOptions h;
  h.seed = seed;
  if (!body.contains("optimizer")) return h;
  const Json& o = body.at("optimizer");
  h.restarts = o.value("restarts", h.restarts);
  h.max_iters = o.value("max_iters", h.max_iters);
  h.tol = o.value("tol", h.tol);
  h.ensemble_size = o.value("ensemble_size", h.ensemble_size);
  return h;
}

SeesawOptions seesaw_options(const Json& body, std::uint64_t seed) {
  SeesawOptions s;
  s.seed = seed;
  if (!body.contains("optimizer")) return s;
  const Json& o = body.at("optimizer");
  s.restarts = o.value("restarts", s.restarts);
  s.max_sweeps = o.value("max_iters", s.max_sweeps);
  s.tol = o.value("tol", s.tol);
  return s;
}

void check_optimizer(const Json& body) {
  if (!body.contains("optimizer")) return;
  const Json& o = body.at("optimizer");
  if (!o.is_object()) field_error("optimizer", "must be an object");
  for (auto it = o.begin(); it != o.end(); ++it) {
    const std::string f = "optimizer." + it.key();
    if (it.key() == "tol") {
      if (!it->is_number() || !(it->get<double>() > 0.0)) field_error(f, "must be a positive number");
    } else if (it.key() == "restarts" || it.key() == "max_iters" || it.key() == "ensemble_size") {
      if (!it->is_number_integer() || it->get<int>() < 0) field_error(f, "must be a nonnegative integer");
    } else {
      field_error(f, "unknown option");
    }
  }
}

/// Inputs resolved once per run and shared read-only by the workers.
struct Resolved {
  std::vector<KrausChannel> channels;
  std::optional<KrausChannel> phi0;
  std::vector<Game> games;
  std::vector<double> f1;
  std::vector<double> fpot;
};

Resolved resolve(const ExperimentConfig& c) {
  Resolved r;
  const Json& b = c.body;
  if (b.contains("channels")) {
    for (std::size_t i = 0; i < b.at("channels").size(); ++i) {
      r.channels.push_back(channel_at(b.at("channels")[i], "channels[" + std::to_string(i) + "]"));
    }
  }
  if (b.contains("phi0")) r.phi0 = channel_at(b.at("phi0"), "phi0");
  if (b.contains("games")) {
    for (std::size_t i = 0; i < b.at("games").size(); ++i) {
      try {
        r.games.push_back(load_game(b.at("games")[i]));
      } catch (const InvalidArgument& e) {
        field_error("games[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  if (c.experiment == "blocksize") {
    const std::size_t n = r.channels.size();
    if (b.contains("f1")) {
      r.f1 = number_list(b, "f1");
      if (r.f1.size() != n) field_error("f1", "needs one value per channel");
    }
    if (b.contains("fpot")) {
      r.fpot = number_list(b, "fpot");
      if (r.fpot.size() != n) field_error("fpot", "needs one value per channel");
    }
  }
  return r;
}

struct Point {
  BoundReport report;
  int restarts_used = 0;
};

Point evaluate(const ExperimentConfig& c, const Resolved& in, double x, std::uint64_t seed) {
  const Json& b = c.body;
  BoundsOptions bo;
  bo.holevo = holevo_options(b, seed);
  Point p;
  if (c.experiment == "erasure-sweep") {
    p.report = cor53_bound(in.channels.front(), x, bo);
  } else if (c.experiment == "heralded-additivity") {
    const int n = static_cast<int>(x);
    HeraldBlock block;
    for (int j = 0; j < n; ++j) block.phis.push_back(in.channels[static_cast<std::size_t>(j) % in.channels.size()]);
    block.k = b.value("k", 1);
    HeraldSpec spec{{block}};
    p.report = in.phi0 ? cor43_bound(*in.phi0, spec, bo) : cor42_bound(spec, bo);
  } else if (c.experiment == "thm51") {
    ChiPotSpec pot;
    if (b.contains("chi_pot")) {
      pot.mode = ChiPotMode::declared;
      pot.value = b.at("chi_pot").get<double>();
    }
    p.report = thm51_compare(in.channels.front(), b.at("n").get<int>(), x, pot, bo);
  } else if (c.experiment == "blocksize") {
    std::vector<double> f1 = in.f1;
    if (f1.empty()) {
      for (const auto& ch : in.channels) f1.push_back(estimate_chi(ch, bo.holevo).value);
    }
    const std::vector<double> fpot = in.fpot.empty() ? f1 : in.fpot;
    BlocksizeOptions opts;
    opts.evaluate_lhs = b.value("evaluate_lhs", false);
    opts.holevo = bo.holevo;
    p.report = blocksize_bound(in.channels, x, f1, fpot, opts);
  } else {
    const int n = static_cast<int>(x);
    std::vector<Game> games;
    for (int i = 0; i < n; ++i) games.push_back(in.games[static_cast<std::size_t>(i) % in.games.size()]);
    const int dA = b.value("dA", 2);
    const std::vector<int> dBs(static_cast<std::size_t>(n), b.value("dB", 2));
    const SeesawOptions so = seesaw_options(b, seed);
    const GameValueReport g = multi_bob_values(games, dA, dBs, so);
    BoundReport& r = p.report;
    r.id = "games-monogamy";
    r.seed = seed;
    r.lhs = g.gap();
    r.rhs = *g.monogamy_bound;
    r.rhs_components = {{"monogamy_bound", r.rhs}};
    r.diagnostics = {{"classical", g.classical},
                     {"entangled_lower", g.entangled_lower},
                     {"restarts_used", static_cast<double>(g.trace.size())}};
    std::string names;
    for (const auto& gm : games) names += gm.name() + ";";
    r.inputs_fingerprint = hex64(fnv1a64(names + std::to_string(dA)));
    settle(r, "see-saw lower bound on the entangled value");
  }
  const double ru = p.report.diagnostic("restarts_used");
  p.restarts_used = std::isnan(ru) ? 0 : static_cast<int>(ru);
  return p;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_verdict(const Json& report) {
  const std::string v = report.at("verdict").get<std::string>();
  if (v == "PASS") return v;
  const std::string reason = report.at("reason").get<std::string>();
  return reason.rfind("hypothesis", 0) == 0 ? "INCONCLUSIVE(hypothesis)" : "INCONCLUSIVE(estimate)";
}

Json environment_stamp() {
  Json e;
  e["version"] = kVersion;
#ifdef __VERSION__
  e["compiler"] = __VERSION__;
#endif
  e["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  e["cxx"] = static_cast<long>(__cplusplus);
  return e;
}

std::string checksum(const Json& record) { return hex64(fnv1a64(record.dump())); }

std::optional<Json> read_cache(const std::string& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    std::ifstream in(path);
    const Json entry = Json::parse(in);
    if (!entry.contains("checksum") || !entry.contains("record")) return std::nullopt;
    if (entry.at("checksum").get<std::string>() != checksum(entry.at("record"))) return std::nullopt;
    return entry.at("record");
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  const auto d = std::chrono::steady_clock::now() - t0;
  return std::round(std::chrono::duration<double, std::milli>(d).count() * 1000.0) / 1000.0;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"erasure-sweep", "heralded-additivity", "thm51", "blocksize",
                                               "games-monogamy"};
  return ids;
}

std::vector<double> parse_grid_axis(const Json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double a = 0, b = 0;
    int n = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &a, &b, &n, &tail) != 3) {
      field_error(field, "expected \"start:end:points\", got \"" + s + "\"");
    }
    if (n < 1) field_error(field, "needs at least one point");
    if (n == 1 && a != b) field_error(field, "one point needs start == end");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) field_error(field, "list entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    field_error(field, "must be \"start:end:points\" or a list");
  }
  if (out.empty()) field_error(field, "grid is empty");
  for (double x : out) {
    if (!std::isfinite(x)) field_error(field, "grid values must be finite");
  }
  return out;
}

ExperimentConfig parse_config(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig c;
  c.body = j;
  Json& b = c.body;
  if (!b.contains("experiment") || !b.at("experiment").is_string()) field_error("experiment", "missing");
  c.experiment = b.at("experiment").get<std::string>();
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end()) {
    field_error("experiment", "unknown experiment '" + c.experiment + "'");
  }

  if (!b.contains("grid") || !b.at("grid").is_object()) field_error("grid", "missing or not an object");
  const Json& g = b.at("grid");
  if (g.size() != 1) field_error("grid", "expects exactly one axis (lambda or n)");
  c.grid_axis = g.begin().key();
  const bool wants_n = c.experiment == "heralded-additivity" || c.experiment == "games-monogamy";
  const std::string axis = wants_n ? "n" : "lambda";
  if (c.grid_axis != axis) field_error("grid", c.experiment + " sweeps over '" + axis + "'");
  c.grid = parse_grid_axis(g.begin().value(), "grid." + c.grid_axis);
  for (double x : c.grid) {
    if (wants_n && (x != std::floor(x) || x < 1)) field_error("grid.n", "values must be positive integers");
    if (!wants_n && !(x >= 0.0 && x <= 1.0)) field_error("grid.lambda", "values must lie in [0, 1]");
    if (!wants_n && c.experiment != "thm51" && c.experiment != "blocksize" && x == 0.0) {
      field_error("grid.lambda", "values must be positive");
    }
  }

  if (b.contains("seed")) {
    const Json& s = b.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      field_error("seed", "must be a nonnegative integer");
    }
    c.seed = b.at("seed").get<std::uint64_t>();
  }
  c.jobs = int_field(b, "jobs", 1, 1, 256);
  if (b.contains("wall_clock") && !b.at("wall_clock").is_boolean()) field_error("wall_clock", "must be a boolean");
  check_optimizer(b);
  if (b.contains("out")) {
    const Json& o = b.at("out");
    if (!o.is_object()) field_error("out", "must be an object");
    for (auto it = o.begin(); it != o.end(); ++it) {
      if (!it->is_string()) field_error("out." + it.key(), "must be a path");
      if (it.key() == "csv") c.out_csv = it->get<std::string>();
      else if (it.key() == "json") c.out_json = it->get<std::string>();
      else if (it.key() == "svg") c.out_svg = it->get<std::string>();
      else field_error("out." + it.key(), "unknown output kind");
    }
  }

  if (c.experiment == "games-monogamy") {
    if (!b.contains("games")) b["games"] = Json::array({"chsh"});
    ref_list(b, "games", base_dir, true);
    int_field(b, "dA", 2, 1, 64);
    int_field(b, "dB", 2, 1, 64);
  } else {
    ref_list(b, "channels", base_dir, true);
  }
  if (b.contains("phi0")) {
    if (c.experiment != "heralded-additivity") field_error("phi0", "only used by heralded-additivity");
    b["phi0"] = inline_ref(b.at("phi0"), base_dir, "phi0");
  }
  if (c.experiment == "heralded-additivity") {
    const int k = int_field(b, "k", 1, 1, 64);
    for (double x : c.grid) {
      if (x < k) field_error("grid.n", "every n must be at least k = " + std::to_string(k));
    }
  }
  if (c.experiment == "thm51") {
    if (!b.contains("n")) field_error("n", "missing");
    int_field(b, "n", 0, 1, 3);
    if (b.contains("chi_pot") && !b.at("chi_pot").is_number()) field_error("chi_pot", "must be a number");
  }
  if (c.experiment == "blocksize" && b.contains("evaluate_lhs") && !b.at("evaluate_lhs").is_boolean()) {
    field_error("evaluate_lhs", "must be a boolean");
  }
  if ((c.experiment == "erasure-sweep" || c.experiment == "thm51") && b.at("channels").size() != 1) {
    field_error("channels", c.experiment + " takes exactly one channel");
  }
  resolve(c);  // every reference must load
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  const Json j = read_json_file(path);
  return parse_config(j, fs::path(path).parent_path().string());
}

std::string config_fingerprint(const ExperimentConfig& c) {
  Json canon = c.body;
  canon.erase("out");
  canon.erase("jobs");
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return hex64(fnv1a64(canon.dump() + "|" + kVersion));
}

std::string default_cache_dir() {
  if (const char* env = std::getenv("HERALD_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  return ".cache";
}

std::string cache_path(const std::string& cache_dir, const std::string& fingerprint) {
  return (fs::path(cache_dir) / (fingerprint + ".json")).string();
}

ResultRecord run(const ExperimentConfig& c, const RunOptions& opts) {
  ResultRecord out;
  out.fingerprint = config_fingerprint(c);
  const std::string dir = opts.cache_dir.empty() ? default_cache_dir() : opts.cache_dir;
  const std::string path = cache_path(dir, out.fingerprint);
  if (opts.use_cache) {
    if (auto rec = read_cache(path)) {
      out.record = std::move(*rec);
      out.cached = true;
      return out;
    }
  }

  const Resolved in = resolve(c);
  const bool clock = c.body.value("wall_clock", true);
  const std::size_t n = c.grid.size();
  std::vector<Point> points(n);
  std::vector<double> wall(n, 0.0);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto t0 = std::chrono::steady_clock::now();
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto ti = std::chrono::steady_clock::now();
      try {
        points[i] = evaluate(c, in, c.grid[i], derive_seed(c.seed, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
      wall[i] = clock ? elapsed_ms(ti) : 0.0;
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs > 0 ? opts.jobs : c.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Json rows = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row;
    row["x"] = c.grid[i];
    row["report"] = report_to_json(points[i].report);
    row["restarts_used"] = points[i].restarts_used;
    row["wall_ms"] = wall[i];
    rows.push_back(std::move(row));
  }
  Json& r = out.record;
  r["fingerprint"] = out.fingerprint;
  r["version"] = kVersion;
  r["experiment"] = c.experiment;
  r["axis"] = c.grid_axis;
  Json cfg = c.body;
  cfg.erase("out");
  cfg.erase("jobs");
  r["config"] = std::move(cfg);
  r["rows"] = std::move(rows);
  r["timings"] = {{"total_ms", clock ? elapsed_ms(t0) : 0.0}};
  r["environment"] = environment_stamp();

  if (opts.use_cache && !read_cache(path)) {
    Json entry;
    entry["checksum"] = checksum(r);
    entry["record"] = r;
    write_file_atomic(path, entry.dump());
  }
  return out;
}

std::string render_csv(const Json& record) {
  std::string s = record.at("axis").get<std::string>() + ",lhs,rhs,slack,verdict,restarts_used,wall_ms\n";
  for (const auto& row : record.at("rows")) {
    const Json& rep = row.at("report");
    s += csv_number(row.at("x").get<double>()) + ",";
    s += csv_number(number_from_json(rep.at("lhs"))) + ",";
    s += csv_number(number_from_json(rep.at("rhs"))) + ",";
    s += csv_number(number_from_json(rep.at("slack"))) + ",";
    s += csv_verdict(rep) + ",";
    s += std::to_string(row.at("restarts_used").get<int>()) + ",";
    s += csv_number(row.at("wall_ms").get<double>()) + "\n";
  }
  return s;
}

std::string render_record_json(const Json& record) { return record.dump(2) + "\n"; }

std::string render_record_svg(const Json& record) {
  Series lhs{"lhs", {}, {}};
  Series rhs{"rhs", {}, {}};
  for (const auto& row : record.at("rows")) {
    const double x = row.at("x").get<double>();
    lhs.xs.push_back(x);
    lhs.ys.push_back(number_from_json(row.at("report").at("lhs")));
    rhs.xs.push_back(x);
    rhs.ys.push_back(number_from_json(row.at("report").at("rhs")));
  }
  SvgStyle st;
  st.title = record.at("experiment").get<std::string>();
  st.x_label = record.at("axis").get<std::string>();
  st.y_label = "bits";
  return render_svg({lhs, rhs}, st);
}

std::string render_csv_svg(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("render: empty CSV");
  const std::string axis = line.substr(0, line.find(','));
  if (line.find(",lhs,rhs,") == std::string::npos) throw InvalidArgument("render: CSV lacks lhs/rhs columns");
  Series lhs{"lhs", {}, {}};
  Series rhs{"rhs", {}, {}};
  auto num = [](const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw InvalidArgument("render: bad number '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) throw InvalidArgument("render: short CSV row");
    const double x = num(cells[0]);
    lhs.xs.push_back(x);
    lhs.ys.push_back(num(cells[1]));
    rhs.xs.push_back(x);
    rhs.ys.push_back(num(cells[2]));
  }
  SvgStyle st;
  st.x_label = axis;
  st.y_label = "bits";
  return render_svg({lhs, rhs}, st);
}

void write_outputs(const ExperimentConfig& c, const ResultRecord& r) {
  if (!c.out_csv.empty()) write_file_atomic(c.out_csv, render_csv(r.record));
  if (!c.out_json.empty()) write_file_atomic(c.out_json, render_record_json(r.record));
  if (!c.out_svg.empty()) write_file_atomic(c.out_svg, render_record_svg(r.record));
}

int verdict_exit_code(const Json& record) {
  const Json& rows = record.at("rows");
  if (rows.empty()) return 0;
  for (const auto& row : rows) {
    if (row.at("report").at("verdict").get<std::string>() == "PASS") return 0;
  }
  return 4;
}

}  // namespace herald
