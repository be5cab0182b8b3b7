#include "herald/serialize.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace herald {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

/// Splits at top-level occurrences of `sep`.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

struct Call {
  std::string name;
  std::string inner;
};

Call split_call(const std::string& raw) {
  const std::string s = trim(raw);
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, ""};
  if (s.back() != ')') throw InvalidArgument("malformed spec '" + s + "'");
  return {trim(s.substr(0, open)), s.substr(open + 1, s.size() - open - 2)};
}

double to_double(const std::string& s, const std::string& ctx) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse number '" + s + "' in " + ctx);
  }
  if (used != s.size()) throw InvalidArgument("cannot parse number '" + s + "' in " + ctx);
  return v;
}

int to_int(const std::string& s, const std::string& ctx) {
  const double v = to_double(s, ctx);
  if (v != std::floor(v)) throw InvalidArgument("expected an integer, got '" + s + "' in " + ctx);
  return static_cast<int>(v);
}

void expect_args(const std::vector<std::string>& args, std::size_t n, const std::string& spec) {
  if (args.size() != n) {
    throw InvalidArgument("spec '" + spec + "' expects " + std::to_string(n) + " argument(s)");
  }
}

std::vector<int> int_list(const Json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw InvalidArgument(std::string("missing integer list '") + field + "'");
  }
  return j.at(field).get<std::vector<int>>();
}

std::vector<Matrix> kraus_list(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("'kraus' must be a list of matrices");
  std::vector<Matrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

Json pairs_to_json(const std::vector<std::pair<std::string, double>>& items) {
  Json o = Json::array();
  for (const auto& [k, v] : items) o.push_back(Json::array({k, number_to_json(v)}));
  return o;
}

}  // namespace

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a nonempty list of rows");
  const long rows = static_cast<long>(j.size());
  const long cols = static_cast<long>(j.at(0).size());
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<long>(row.size()) != cols) throw InvalidArgument("matrix rows differ in length");
    for (long c = 0; c < cols; ++c) {
      const Json& e = row.at(static_cast<std::size_t>(c));
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw InvalidArgument("matrix entry must be a number or [re, im]");
      }
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) {
      const Complex v = m(r, c);
      if (v.imag() == 0.0) {
        row.push_back(v.real());
      } else {
        row.push_back(Json::array({v.real(), v.imag()}));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidArgument("expected a number");
}

KrausChannel parse_channel_spec(const std::string& spec) {
  const Call c = split_call(spec);
  if (c.name == "heralded") {
    const auto parts = split_top(c.inner, ';');
    expect_args(parts, 2, spec);
    const int k = to_int(parts[0], spec);
    std::vector<KrausChannel> phis;
    for (const auto& s : split_top(parts[1], ',')) phis.push_back(parse_channel_spec(s));
    return heralded_channel(phis, k);
  }
  const auto args = split_top(c.inner, ',');
  if (c.name == "identity") {
    expect_args(args, 1, spec);
    return identity_channel(to_int(args[0], spec));
  }
  if (c.name == "depolarizing") {
    expect_args(args, 2, spec);
    return depolarizing_channel(to_int(args[0], spec), to_double(args[1], spec));
  }
  if (c.name == "dephasing") {
    expect_args(args, 1, spec);
    return dephasing_channel(to_double(args[0], spec));
  }
  if (c.name == "trivial") {
    expect_args(args, 1, spec);
    return trivial_channel(to_int(args[0], spec));
  }
  if (c.name == "erasure") {
    expect_args(args, 2, spec);
    return erasure_channel(parse_channel_spec(args[0]), to_double(args[1], spec));
  }
  throw InvalidArgument("unknown channel '" + c.name + "'");
}

DensityOperator parse_state_spec(const std::string& spec) {
  const Call c = split_call(spec);
  const auto args = split_top(c.inner, ',');
  if (c.name == "bell") return bell_state();
  if (c.name == "ghz") {
    expect_args(args, 1, spec);
    return ghz_state(to_int(args[0], spec));
  }
  if (c.name == "werner") {
    expect_args(args, 1, spec);
    return werner_state(to_double(args[0], spec));
  }
  if (c.name == "mixed") {
    expect_args(args, 1, spec);
    return maximally_mixed(SpaceShape({to_int(args[0], spec)}));
  }
  if (c.name == "basis") {
    expect_args(args, 2, spec);
    return basis_state(SpaceShape({to_int(args[0], spec)}), to_int(args[1], spec));
  }
  if (c.name == "product") {
    if (args.empty()) throw InvalidArgument("product() needs at least one factor");
    std::vector<DensityOperator> parts;
    for (const auto& a : args) parts.push_back(parse_state_spec(a));
    return product_state(parts);
  }
  throw InvalidArgument("unknown state '" + c.name + "'");
}

Game parse_game_spec(const std::string& spec) {
  const std::string s = trim(spec);
  if (s == "chsh") return chsh_game();
  if (s == "always-win") return constant_game(2, 2, 2, 2, true);
  if (s == "never-win") return constant_game(2, 2, 2, 2, false);
  throw InvalidArgument("unknown game '" + s + "'");
}

KrausChannel channel_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("channel must be an object");
  const std::string name = j.value("name", "channel");
  const SpaceShape in(int_list(j, "in_dims"));
  if (j.contains("sectors")) {
    const SpaceShape qout(int_list(j, "quantum_out_dims"));
    std::vector<FlagSector> sectors;
    for (const auto& s : j.at("sectors")) {
      FlagSector fs;
      fs.label.name = s.value("label", "");
      fs.label.subset = s.value("subset", std::vector<int>{});
      fs.label.positions = s.value("positions", 0);
      fs.kraus = kraus_list(s.at("kraus"));
      sectors.push_back(std::move(fs));
    }
    return KrausChannel::flagged(name, in, qout, std::move(sectors));
  }
  const SpaceShape out(int_list(j, "out_dims"));
  if (!j.contains("kraus")) throw InvalidArgument("channel needs 'kraus'");
  return KrausChannel(name, in, out, kraus_list(j.at("kraus")));
}

Json channel_to_json(const KrausChannel& c) {
  Json j;
  j["name"] = c.name();
  j["in_dims"] = c.in_shape().dims();
  if (c.is_flagged()) {
    j["quantum_out_dims"] = c.quantum_out_shape().dims();
    Json sectors = Json::array();
    for (const auto& s : c.sectors()) {
      Json o;
      o["label"] = s.label.name;
      o["subset"] = s.label.subset;
      o["positions"] = s.label.positions;
      Json ks = Json::array();
      for (const auto& k : s.kraus) ks.push_back(matrix_to_json(k));
      o["kraus"] = std::move(ks);
      sectors.push_back(std::move(o));
    }
    j["sectors"] = std::move(sectors);
  } else {
    j["out_dims"] = c.out_shape().dims();
    Json ks = Json::array();
    for (const auto& k : c.kraus()) ks.push_back(matrix_to_json(k));
    j["kraus"] = std::move(ks);
  }
  return j;
}

KrausChannel load_channel(const Json& ref) {
  if (ref.is_object()) {
    if (ref.contains("file")) return channel_from_json(read_json_file(ref.at("file").get<std::string>()));
    return channel_from_json(ref);
  }
  if (!ref.is_string()) throw InvalidArgument("channel reference must be a string or an object");
  const auto s = ref.get<std::string>();
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") return channel_from_json(read_json_file(s));
  return parse_channel_spec(s);
}

DensityOperator state_from_json(const Json& j) {
  if (j.is_string()) return parse_state_spec(j.get<std::string>());
  if (j.contains("constructor")) return parse_state_spec(j.at("constructor").get<std::string>());
  if (!j.contains("matrix")) throw InvalidArgument("state needs 'matrix' or 'constructor'");
  const Matrix m = matrix_from_json(j.at("matrix"));
  std::vector<int> dims = j.contains("dims") ? int_list(j, "dims") : std::vector<int>{static_cast<int>(m.rows())};
  return DensityOperator(SpaceShape(dims), m);
}

Game game_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("game must be an object");
  const std::string name = j.value("name", "game");
  for (const char* f : {"nX", "nY", "nA", "nB", "pi", "v"}) {
    if (!j.contains(f)) throw InvalidArgument(std::string("game: missing field '") + f + "'");
  }
  const int nX = j.at("nX").get<int>();
  const int nY = j.at("nY").get<int>();
  const int nA = j.at("nA").get<int>();
  const int nB = j.at("nB").get<int>();
  const Json& pj = j.at("pi");
  if (!pj.is_array() || static_cast<int>(pj.size()) != nX) throw InvalidArgument("game: pi must have nX rows");
  bool exact = true;
  std::vector<Rational> pr;
  std::vector<double> pf;
  for (const auto& row : pj) {
    if (!row.is_array() || static_cast<int>(row.size()) != nY) throw InvalidArgument("game: pi rows must have nY entries");
    for (const auto& e : row) {
      if (e.is_string()) {
        const Rational r = Rational::parse(e.get<std::string>());
        pr.push_back(r);
        pf.push_back(r.value());
      } else if (e.is_number_integer()) {
        pr.push_back(Rational{e.get<std::int64_t>(), 1});
        pf.push_back(e.get<double>());
      } else if (e.is_number()) {
        exact = false;
        pf.push_back(e.get<double>());
      } else {
        throw InvalidArgument("game: pi entries must be numbers or \"p/q\" strings");
      }
    }
  }
  std::vector<std::uint8_t> v;
  const Json& vj = j.at("v");
  if (!vj.is_array() || static_cast<int>(vj.size()) != nX) throw InvalidArgument("game: v must be nested [x][y][a][b]");
  for (const auto& vx : vj) {
    if (static_cast<int>(vx.size()) != nY) throw InvalidArgument("game: v has the wrong shape");
    for (const auto& vy : vx) {
      if (static_cast<int>(vy.size()) != nA) throw InvalidArgument("game: v has the wrong shape");
      for (const auto& va : vy) {
        if (static_cast<int>(va.size()) != nB) throw InvalidArgument("game: v has the wrong shape");
        for (const auto& vb : va) {
          const int b = vb.get<int>();
          if (b != 0 && b != 1) throw InvalidArgument("game: v entries must be 0 or 1");
          v.push_back(static_cast<std::uint8_t>(b));
        }
      }
    }
  }
  if (exact) return Game(name, nX, nY, nA, nB, std::move(pr), std::move(v));
  return Game(name, nX, nY, nA, nB, std::move(pf), std::move(v));
}

Json game_to_json(const Game& g) {
  Json j;
  j["name"] = g.name();
  j["nX"] = g.nX();
  j["nY"] = g.nY();
  j["nA"] = g.nA();
  j["nB"] = g.nB();
  Json pi = Json::array();
  for (int x = 0; x < g.nX(); ++x) {
    Json row = Json::array();
    for (int y = 0; y < g.nY(); ++y) {
      if (g.pi_exact()) {
        row.push_back((*g.pi_exact())[static_cast<std::size_t>(x * g.nY() + y)].to_string());
      } else {
        row.push_back(g.pi(x, y));
      }
    }
    pi.push_back(std::move(row));
  }
  j["pi"] = std::move(pi);
  Json v = Json::array();
  for (int x = 0; x < g.nX(); ++x) {
    Json vx = Json::array();
    for (int y = 0; y < g.nY(); ++y) {
      Json vy = Json::array();
      for (int a = 0; a < g.nA(); ++a) {
        Json va = Json::array();
        for (int b = 0; b < g.nB(); ++b) va.push_back(g.win(x, y, a, b) ? 1 : 0);
        vy.push_back(std::move(va));
      }
      vx.push_back(std::move(vy));
    }
    v.push_back(std::move(vx));
  }
  j["v"] = std::move(v);
  return j;
}

Game load_game(const Json& ref) {
  if (ref.is_object()) {
    if (ref.contains("file")) return game_from_json(read_json_file(ref.at("file").get<std::string>()));
    return game_from_json(ref);
  }
  const auto s = ref.get<std::string>();
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") return game_from_json(read_json_file(s));
  return parse_game_spec(s);
}

std::vector<MonogamyCase> suite_from_json(const Json& j) {
  if (!j.contains("states") || !j.at("states").is_array()) throw InvalidArgument("suite needs a 'states' list");
  std::vector<MonogamyCase> out;
  for (const auto& s : j.at("states")) {
    const std::string name = s.value("name", "state");
    if (!s.contains("analytic_esq")) throw InvalidArgument("suite state '" + name + "' has no analytic_esq");
    std::vector<double> analytic;
    const Json& a = s.at("analytic_esq");
    if (a.is_array()) {
      analytic = a.get<std::vector<double>>();
    } else {
      analytic.push_back(a.get<double>());
    }
    out.push_back({name, state_from_json(s), analytic, s.value("analytic_note", "")});
  }
  return out;
}

Json report_to_json(const BoundReport& r) {
  Json j;
  j["id"] = r.id;
  j["lhs"] = number_to_json(r.lhs);
  j["lhs_provenance"] = to_string(r.lhs_provenance);
  j["rhs"] = number_to_json(r.rhs);
  j["rhs_components"] = pairs_to_json(r.rhs_components);
  j["slack"] = number_to_json(r.slack);
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  j["inputs_fingerprint"] = r.inputs_fingerprint;
  j["seed"] = r.seed;
  j["diagnostics"] = pairs_to_json(r.diagnostics);
  j["notes"] = r.notes;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp =
      path + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  fs::rename(tmp, target);
}

}  // namespace herald
