#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "herald/expcli.hpp"

using namespace herald;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("herald_expcli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json sweep_config() {
  return Json::parse(R"J({
    "experiment": "erasure-sweep",
    "channels": ["identity(2)"],
    "grid": {"lambda": "0.1:0.5:5"},
    "optimizer": {"restarts": 2, "max_iters": 100},
    "seed": 3
  })J");
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = parse_grid_axis(Json("0:1:5"), "grid.lambda");
  REQUIRE(g.size() == 5);
  CHECK(g[1] == doctest::Approx(0.25));
  CHECK(parse_grid_axis(Json::parse("[0.2, 0.4]"), "grid.lambda").size() == 2);
  CHECK_THROWS_WITH_AS(parse_grid_axis(Json("0.1:0.5"), "grid.lambda"), doctest::Contains("grid.lambda"),
                       InvalidArgument);
  CHECK_THROWS_AS(parse_grid_axis(Json::parse("[]"), "grid.lambda"), InvalidArgument);
}

TEST_CASE("config errors name the field") {
  Json j = sweep_config();
  j["grid"] = {{"lambda", "oops"}};
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("grid.lambda"), InvalidArgument);
  j = sweep_config();
  j["experiment"] = "nope";
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("experiment"), InvalidArgument);
  j = sweep_config();
  j["channels"] = Json::array({"mystery(3)"});
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("channels[0]"), InvalidArgument);
  j = sweep_config();
  j["optimizer"]["restarts"] = -1;
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("optimizer.restarts"), InvalidArgument);
  j = sweep_config();
  j["channels"] = Json::array({Json{{"file", "/nonexistent/x.json"}}});
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("channels[0]"), InvalidArgument);
}

TEST_CASE("fingerprint ignores key order and output paths") {
  const Json a = sweep_config();
  Json b = Json::parse(R"J({"seed": 3, "optimizer": {"max_iters": 100, "restarts": 2},
    "grid": {"lambda": "0.1:0.5:5"}, "channels": ["identity(2)"], "experiment": "erasure-sweep",
    "out": {"csv": "elsewhere.csv"}, "jobs": 4})J");
  CHECK(config_fingerprint(parse_config(a)) == config_fingerprint(parse_config(b)));
  b["seed"] = 4;
  CHECK(config_fingerprint(parse_config(a)) != config_fingerprint(parse_config(b)));
}

TEST_CASE("file references are inlined") {
  const fs::path dir = scratch("inline");
  std::ofstream(dir / "ch.json") << channel_to_json(identity_channel(2)).dump();
  Json j = sweep_config();
  j["channels"] = Json::array({"ch.json"});
  const ExperimentConfig c = parse_config(j, dir.string());
  CHECK(c.body.at("channels")[0].is_object());
  fs::remove_all(dir);
}

TEST_CASE("erasure sweep rows and verdicts") {
  const fs::path dir = scratch("sweep");
  const ExperimentConfig c = parse_config(sweep_config());
  const ResultRecord r = run(c, {(dir / "cache").string(), true, 0});
  CHECK_FALSE(r.cached);
  const std::string csv = render_csv(r.record);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  for (const auto& row : r.record.at("rows")) {
    const Json& rep = row.at("report");
    if (rep.at("verdict") == "PASS") CHECK(number_from_json(rep.at("slack")) >= 0.0);
    else CHECK(rep.at("reason").get<std::string>().rfind("hypothesis", 0) == 0);
  }
  CHECK(verdict_exit_code(r.record) == 4);
  fs::remove_all(dir);
}

TEST_CASE("cache replay is byte identical and corruption forces recompute") {
  const fs::path dir = scratch("cache");
  Json j = sweep_config();
  j["out"] = {{"csv", (dir / "a.csv").string()}, {"json", (dir / "a.json").string()}, {"svg", (dir / "a.svg").string()}};
  const ExperimentConfig c = parse_config(j);
  const RunOptions ro{(dir / "cache").string(), true, 0};
  const ResultRecord first = run(c, ro);
  write_outputs(c, first);
  const std::string csv1 = slurp(dir / "a.csv"), json1 = slurp(dir / "a.json"), svg1 = slurp(dir / "a.svg");
  const ResultRecord second = run(c, ro);
  CHECK(second.cached);
  write_outputs(c, second);
  CHECK(slurp(dir / "a.csv") == csv1);
  CHECK(slurp(dir / "a.json") == json1);
  CHECK(slurp(dir / "a.svg") == svg1);

  const std::string entry = cache_path(ro.cache_dir, first.fingerprint);
  std::string text = slurp(entry);
  text.replace(text.find("\"lhs\":"), 6, "\"lhs\":1");
  std::ofstream(entry) << text;
  const ResultRecord third = run(c, ro);
  CHECK_FALSE(third.cached);
  CHECK(render_csv(third.record).substr(0, 40) == csv1.substr(0, 40));
  fs::remove_all(dir);
}

TEST_CASE("fresh runs are deterministic without wall clock, across job counts") {
  Json j = sweep_config();
  j["wall_clock"] = false;
  const ExperimentConfig c = parse_config(j);
  const ResultRecord a = run(c, {"", false, 1});
  const ResultRecord b = run(c, {"", false, 3});
  CHECK(render_csv(a.record) == render_csv(b.record));
  CHECK(render_record_json(a.record) == render_record_json(b.record));
  CHECK(render_record_svg(a.record) == render_record_svg(b.record));
}

TEST_CASE("blocksize and games experiments") {
  const Json bs = Json::parse(R"J({"experiment":"blocksize","channels":["identity(2)","identity(2)"],
    "f1":[0.5,0.5],"fpot":[1,1],"grid":{"lambda":[0.05,0.1]}})J");
  const ResultRecord r = run(parse_config(bs), {"", false, 0});
  CHECK(verdict_exit_code(r.record) == 0);
  CHECK(r.record.at("rows")[1].at("report").at("rhs").get<double>() == doctest::Approx(0.1 + 0.01));
  const Json gm = Json::parse(R"J({"experiment":"games-monogamy","grid":{"n":[1,2]},"optimizer":{"restarts":2}})J");
  const ResultRecord g = run(parse_config(gm), {"", false, 0});
  for (const auto& row : g.record.at("rows")) CHECK(row.at("report").at("verdict") == "PASS");
}

TEST_CASE("svg rendering") {
  const std::string one = render_svg({Series{"p", {0.5}, {1.0}}});
  CHECK(one.find("<svg") == 0);
  size_t circles = 0;
  for (size_t p = one.find("<circle"); p != std::string::npos; p = one.find("<circle", p + 1)) ++circles;
  CHECK(circles == 1);
  CHECK_THROWS_AS(render_svg({}), InvalidArgument);
  CHECK_THROWS_AS(render_svg({Series{"p", {0.1}, {std::nan("")}}}), InvalidArgument);
  const auto t = nice_ticks(0.02, 0.5);
  for (size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  CHECK(render_svg({Series{"a", {1, 2}, {3, 4}}}) == render_svg({Series{"a", {1, 2}, {3, 4}}}));
}

TEST_CASE("rhs lies above lhs on a passing sweep") {
  const Json j = Json::parse(R"J({"experiment":"erasure-sweep","channels":["depolarizing(2,0.2)"],
    "grid":{"lambda":[0.001,0.004,0.008]},"optimizer":{"restarts":2}})J");
  const ResultRecord r = run(parse_config(j), {"", false, 0});
  for (const auto& row : r.record.at("rows")) {
    CHECK(row.at("report").at("verdict") == "PASS");
    CHECK(number_from_json(row.at("report").at("rhs")) >= number_from_json(row.at("report").at("lhs")));
  }
  const std::string svg = render_csv_svg(render_csv(r.record));
  CHECK(svg.find(">lhs</text>") != std::string::npos);
  CHECK(svg.find(">rhs</text>") != std::string::npos);
}
