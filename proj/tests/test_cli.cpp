#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace {

int sh(const std::string& args) {
  const std::string cmd = std::string(HERALDCTL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "herald_cli_test";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("exit codes") {
  const fs::path dir = scratch();
  CHECK(sh("channel 'identity(2)' --validate") == 0);
  CHECK(sh("channel 'bogus(2)'") == 2);
  CHECK(sh("nosuchcommand") == 2);
  CHECK(sh("bounds thm51 --n 4 --lambda 0.5") == 3);
  CHECK(sh("bounds correction --lambda 0.5 --kind erasure") == 0);

  std::ofstream(dir / "bad.json") << R"J({"experiment":"erasure-sweep","channels":["identity(2)"],"grid":{"lambda":"1:2"}})J";
  CHECK(sh("run " + (dir / "bad.json").string()) == 2);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK(sh("run " + (dir / "broken.json").string()) == 2);

  std::ofstream(dir / "sweep.json")
      << R"J({"experiment":"erasure-sweep","channels":["identity(2)"],"grid":{"lambda":[0.2,0.4]},"optimizer":{"restarts":2}})J";
  CHECK(sh("run " + (dir / "sweep.json").string() + " --cache-dir " + (dir / "c").string()) == 4);
  CHECK(fs::exists(dir / "c"));
  fs::remove_all(dir);
}

TEST_CASE("cache directory from the environment and render") {
  const fs::path dir = scratch();
  std::ofstream(dir / "sweep.json") << R"J({"experiment":"erasure-sweep","channels":["depolarizing(2,0.2)"],
    "grid":{"lambda":[0.001,0.005]},"optimizer":{"restarts":2},"out":{"csv":")J"
                                    << (dir / "o.csv").string() << R"J("}})J";
  const std::string env = "HERALD_CACHE_DIR=" + (dir / "envcache").string() + " ";
  const std::string cmd = env + HERALDCTL + " run " + (dir / "sweep.json").string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(dir / "envcache"));
  CHECK(sh("render " + (dir / "o.csv").string() + " --out " + (dir / "o.svg").string()) == 0);
  CHECK(fs::file_size(dir / "o.svg") > 100);
  fs::remove_all(dir);
}
