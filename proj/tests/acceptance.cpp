// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "herald/bounds.hpp"
#include "herald/channels.hpp"
#include "herald/entropy.hpp"
#include "herald/esq.hpp"
#include "herald/expcli.hpp"
#include "herald/games.hpp"
#include "herald/holevo.hpp"

using namespace herald;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome binomial_identity() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& phi : {identity_channel(2), depolarizing_channel(2, 0.3)}) {
    for (int n : {2, 3}) {
      for (double lambda : {0.1, 0.5, 0.9}) {
        const BoundReport r = binomial_mixture_check(std::vector<KrausChannel>(static_cast<std::size_t>(n), phi), lambda);
        worst = std::max(worst, r.lhs);
      }
    }
  }
  const double t = seconds_since(t0);
  o.require(worst <= 1e-10, "max Choi distance " + fmt("%.3g", worst));
  o.require(t < 10.0, "runtime " + fmt("%.2f", t) + " s");
  if (o.ok) o.detail = "max Choi distance " + fmt("%.2g", worst) + ", " + fmt("%.2f", t) + " s";
  return o;
}

Outcome holevo_regressions() {
  Outcome o;
  double slowest = 0.0;
  auto timed = [&](const KrausChannel& c) {
    const auto t0 = Clock::now();
    const double v = estimate_chi(c).value;
    slowest = std::max(slowest, seconds_since(t0));
    return v;
  };
  const double id = timed(identity_channel(2));
  o.require(std::abs(id - 1.0) <= 1e-4, "chi(id2) = " + fmt("%.8f", id));
  const double th = timed(trivial_channel(2));
  o.require(th <= 1e-6, "chi(Theta) = " + fmt("%.3g", th));
  for (double p : {0.2, 0.4, 0.8}) {
    const double v = timed(depolarizing_channel(2, p));
    const double target = 1.0 - binary_entropy(p / 2);
    o.require(std::abs(v - target) <= 1e-3, "depolarizing p=" + fmt("%.1f", p) + ": " + fmt("%.6f", v));
  }
  for (double l : {0.25, 0.5, 0.75}) {
    const double v = timed(erasure_channel(identity_channel(2), l));
    o.require(std::abs(v - l) <= 1e-3, "erasure lambda=" + fmt("%.2f", l) + ": " + fmt("%.6f", v));
  }
  o.require(slowest < 60.0, "slowest optimization " + fmt("%.1f", slowest) + " s");
  if (o.ok) o.detail = "default budget, slowest single optimization " + fmt("%.2f", slowest) + " s";
  return o;
}

Outcome flag_equivalence() {
  Outcome o;
  HolevoOptions opts;
  opts.restarts = 4;
  opts.max_iters = 200;
  for (const auto& c : {erasure_channel(identity_channel(2), 0.5),
                        heralded_channel({identity_channel(2), identity_channel(2)}, 1)}) {
    const double a = maximize_holevo_flagged(c, opts).value;
    const double b = maximize_holevo(c, opts).value;
    o.require(std::abs(a - b) <= 1e-6, c.name() + ": flagged " + fmt("%.9f", a) + " vs naive " + fmt("%.9f", b));
  }
  const KrausChannel z3 = heralded_channel({identity_channel(2), identity_channel(2), identity_channel(2)}, 1);
  auto t0 = Clock::now();
  maximize_holevo_flagged(z3, opts);
  const double tf = seconds_since(t0);
  t0 = Clock::now();
  maximize_holevo(z3, opts);
  const double tn = seconds_since(t0);
  const double speedup = tn / std::max(tf, 1e-9);
  o.require(speedup >= 5.0, "speedup " + fmt("%.1f", speedup) + "x");
  if (o.ok) o.detail = "agreement within 1e-6, speedup " + fmt("%.1f", speedup) + "x on Z_1(id,id,id)";
  return o;
}

Outcome heralded_averaging() {
  Outcome o;
  EsqOptions opts;
  opts.restarts = 2;
  opts.max_iters = 50;
  std::string detail;
  for (int n : {2, 3}) {
    std::vector<DensityOperator> parts{bell_state()};
    for (int j = 1; j < n; ++j) parts.push_back(basis_state(SpaceShape({2}), 0));
    std::vector<int> a;
    for (int j = 1; j <= n; ++j) a.push_back(j);
    const AveragingInput in{"bell+ancilla", product_state(parts), {0}, a};
    const HeraldFactor f{std::vector<KrausChannel>(static_cast<std::size_t>(n), identity_channel(2)), 1};
    const auto reports = heralded_averaging_check({f}, {in}, opts);
    const BoundReport& r = reports.front();
    o.require(r.lhs <= r.rhs + 1e-4, "(" + std::to_string(n) + ",1): " + fmt("%.6f", r.lhs) + " > " + fmt("%.6f", r.rhs));
    if (n == 2) o.require(std::abs(r.lhs - r.rhs) <= 1e-3, "(2,1) not at equality: " + fmt("%.6f", r.lhs));
    detail += "(" + std::to_string(n) + ",1) " + fmt("%.6f", r.lhs) + " <= " + fmt("%.6f", r.rhs) + " ";
  }
  if (o.ok) o.detail = detail;
  return o;
}

Outcome entropy_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst_ssa = 1e9, worst_af = -1e9, worst_order = -1e9;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto rho = random_density(SpaceShape({2, 2, 2}), 1 + static_cast<int>(s % 8), 10000 + s);
    worst_ssa = std::min(worst_ssa, conditional_mutual_information(rho, {0}, {1}, {2}));
  }
  for (std::uint64_t s = 0; s < 500; ++s) {
    const int dA = 2 + static_cast<int>(s % 2);
    const auto a = random_density(SpaceShape({dA, 2}), 1 + static_cast<int>(s % 4), 20000 + s);
    DensityOperator b = a;
    if (s % 2 == 0) {
      b = random_density(SpaceShape({dA, 2}), 2, 30000 + s);
    } else {
      const auto noise = random_density(SpaceShape({dA, 2}), 4, 40000 + s);
      b = DensityOperator(SpaceShape({dA, 2}), 0.9 * a.matrix() + 0.1 * noise.matrix());
    }
    const double delta = 0.5 * trace_norm(a.matrix() - b.matrix());
    const double diff = std::abs(conditional_entropy(a, {0}, {1}) - conditional_entropy(b, {0}, {1}));
    const double refined = alicki_fannes_bound(delta, dA, AfVariant::refined);
    const double weak = alicki_fannes_bound(delta, dA, AfVariant::weak);
    worst_af = std::max(worst_af, diff - refined);
    worst_order = std::max(worst_order, refined - weak);
  }
  const double t = seconds_since(t0);
  o.require(worst_ssa >= -1e-9, "min I(A;B|C) " + fmt("%.3g", worst_ssa));
  o.require(worst_af <= 1e-9, "continuity bound exceeded by " + fmt("%.3g", worst_af));
  o.require(worst_order <= 1e-12, "refined exceeds weak by " + fmt("%.3g", worst_order));
  o.require(t < 120.0, "runtime " + fmt("%.1f", t) + " s");
  if (o.ok) o.detail = "min I(A;B|C) " + fmt("%.2g", worst_ssa) + ", " + fmt("%.2f", t) + " s";
  return o;
}

Outcome thm51_grid() {
  Outcome o;
  std::string detail;
  for (int n : {2, 3}) {
    for (double lambda : {1.0 / 3.0, 0.5}) {
      BoundsOptions bo;
      bo.holevo.seed = 17;
      const BoundReport r = thm51_compare(identity_channel(2), n, lambda, ChiPotSpec{}, bo);
      o.require(r.passed(), "n=" + std::to_string(n) + " lambda=" + fmt("%.3f", lambda) + ": " + r.reason);
      detail += "n=" + std::to_string(n) + ",l=" + fmt("%.2f", lambda) + " slack " + fmt("%.4f", r.slack) + " ";
    }
  }
  if (o.ok) o.detail = detail;
  return o;
}

Json sweep_config(bool wall_clock) {
  Json j;
  j["experiment"] = "erasure-sweep";
  j["channels"] = Json::array({"identity(2)"});
  j["grid"] = {{"lambda", "0.02:0.5:10"}};
  j["seed"] = 2024;
  j["wall_clock"] = wall_clock;
  return j;
}

Outcome erasure_sweep(const fs::path& dir) {
  Outcome o;
  const ExperimentConfig c = parse_config(sweep_config(false));
  const ResultRecord a = run(c, {"", false, 0});
  const ResultRecord b = run(c, {"", false, 0});
  int pass = 0, hyp = 0;
  for (const auto& row : a.record.at("rows")) {
    const double lambda = row.at("x").get<double>();
    const bool admissible = 3.1 * 2 * std::pow(lambda, 0.25) <= 2.0;
    const Json& rep = row.at("report");
    const bool passed = rep.at("verdict") == "PASS";
    const bool hypothesis = rep.at("reason").get<std::string>().rfind("hypothesis", 0) == 0;
    o.require(passed == admissible && (passed || hypothesis), "verdict mismatch at lambda=" + fmt("%.4f", lambda));
    if (passed) o.require(number_from_json(rep.at("slack")) >= 0.0, "negative slack at lambda=" + fmt("%.4f", lambda));
    pass += passed;
    hyp += hypothesis;
  }
  o.require(render_csv(a.record) == render_csv(b.record), "CSV differs between runs");
  o.require(render_record_svg(a.record) == render_record_svg(b.record), "SVG differs between runs");
  (void)dir;
  if (o.ok) {
    o.detail = std::to_string(pass) + " PASS, " + std::to_string(hyp) +
               " INCONCLUSIVE(hypothesis); CSV and SVG byte-identical across fresh runs";
  }
  return o;
}

Outcome blocksize_grid() {
  Outcome o;
  double worst = 0.0;
  for (int n : {2, 3, 4, 6}) {
    for (double lambda : {0.0, 0.01, 0.05, 0.1, 0.3, 0.7, 1.0}) {
      const std::vector<KrausChannel> phis(static_cast<std::size_t>(n), identity_channel(2));
      const std::vector<double> f1(phis.size(), 0.4), fpot(phis.size(), 1.0);
      const BoundReport r = blocksize_bound(phis, lambda, f1, fpot);
      const double expected = lambda * (1.0 - std::pow(1.0 - lambda, n - 1));
      worst = std::max(worst, std::abs(r.component("exact_coefficient") - expected));
      const BoundReport z = blocksize_bound(phis, lambda, f1, f1);
      o.require(z.component("correction_exact") == 0.0, "nonzero correction with Fpot = F1");
    }
  }
  o.require(worst <= 1e-12, "coefficient error " + fmt("%.3g", worst));
  double worst_rel = 0.0;
  for (double lambda : {0.001, 0.01, 0.03, 0.05}) {
    const std::vector<KrausChannel> phis(2, identity_channel(2));
    const BoundReport r = blocksize_bound(phis, lambda, {0.4, 0.4}, {1.0, 1.0});
    const double rel = std::abs(r.component("o_coefficient") - r.component("exact_coefficient")) /
                       r.component("exact_coefficient");
    worst_rel = std::max(worst_rel, rel);
  }
  o.require(worst_rel <= 0.1, "O(lambda^2) display off by " + fmt("%.3g", worst_rel));
  if (o.ok) o.detail = "coefficient error " + fmt("%.2g", worst) + ", display rel. error " + fmt("%.2g", worst_rel);
  return o;
}

Outcome games_checks() {
  Outcome o;
  const double cl = classical_value(chsh_game());
  o.require(cl == 0.75, "classical CHSH " + fmt("%.17g", cl));
  const auto t0 = Clock::now();
  SeesawOptions so;
  so.seed = 99;
  const GameValueReport s = entangled_value_lower(chsh_game(), 2, 2, so);
  const double t = seconds_since(t0);
  o.require(s.entangled_lower >= 0.8525, "see-saw " + fmt("%.6f", s.entangled_lower));
  o.require(std::abs(s.entangled_lower - 0.853553) <= 1e-3, "see-saw off target");
  o.require(t < 30.0, "see-saw took " + fmt("%.1f", t) + " s");
  o.require(s.entangled_lower >= s.classical - 1e-12, "entangled below classical");
  const GameValueReport m = multi_bob_values({chsh_game(), chsh_game()}, 2, {2, 2}, so);
  const double bound = monogamy_game_bound(2, 2);
  o.require(std::abs(bound - 2.0 * std::pow(2.0, -0.25)) <= 1e-12, "monogamy bound value");
  o.require(m.gap() <= bound, "multi-Bob gap above bound");
  o.require(m.entangled_lower >= m.classical - 1e-12, "multi-Bob entangled below classical");
  if (o.ok) {
    o.detail = "see-saw " + fmt("%.6f", s.entangled_lower) + " in " + fmt("%.2f", t) + " s; multi-Bob gap " +
               fmt("%.4f", m.gap()) + " <= " + fmt("%.4f", bound);
  }
  return o;
}

Outcome squashed_suite() {
  Outcome o;
  EsqOptions opts;
  opts.restarts = 2;
  opts.max_iters = 150;
  double worst = -1e9;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto rho = random_density(SpaceShape({2, 2}), 1 + static_cast<int>(s % 4), 700 + s);
    worst = std::max(worst, esq_upper(rho, {0}, {1}, opts).value - 0.5 * mutual_information(rho, {0}, {1}));
  }
  worst = std::max(worst, esq_upper(werner_state(0.5), {0}, {1}, opts).value -
                              0.5 * mutual_information(werner_state(0.5), {0}, {1}));
  o.require(worst <= 1e-9, "exceeds half mutual information by " + fmt("%.3g", worst));
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 0.7;
  m(3, 3) = 0.3;
  const double cc = esq_upper(DensityOperator(SpaceShape({2, 2}), m), {0}, {1}, opts).value;
  o.require(cc <= 1e-4, "classically correlated " + fmt("%.3g", cc));
  const double bell = esq_upper(bell_state(), {0}, {1}, opts).value;
  o.require(std::abs(bell - 1.0) <= 1e-6, "Bell " + fmt("%.9f", bell));
  SepOptions so;
  so.restarts = 2;
  so.max_iters = 200;
  const double dist = separable_approx(bell_state(), {0}, {1}, so).distance;
  const double ppt = ppt_witness_lower_bound(bell_state(), {0}, {1});
  o.require(dist >= ppt - 1e-9, "separable distance " + fmt("%.6f", dist) + " below PPT " + fmt("%.6f", ppt));
  if (o.ok) {
    o.detail = "Bell " + fmt("%.9f", bell) + ", classical copy " + fmt("%.2g", cc) + ", sep " + fmt("%.6f", dist) +
               " >= PPT " + fmt("%.6f", ppt);
  }
  return o;
}

Outcome determinism(const fs::path& dir) {
  Outcome o;
  Json j = sweep_config(true);
  j["out"] = {{"csv", (dir / "r.csv").string()}, {"json", (dir / "r.json").string()}, {"svg", (dir / "r.svg").string()}};
  const ExperimentConfig c = parse_config(j);
  const RunOptions ro{(dir / "cache").string(), true, 0};
  auto slurp = [](const fs::path& p) {
    std::FILE* f = std::fopen(p.string().c_str(), "rb");
    std::string s;
    if (f == nullptr) return s;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) s.append(buf, n);
    std::fclose(f);
    return s;
  };
  const ResultRecord first = run(c, ro);
  write_outputs(c, first);
  const std::string csv = slurp(dir / "r.csv"), js = slurp(dir / "r.json"), svg = slurp(dir / "r.svg");
  const ResultRecord second = run(c, ro);
  write_outputs(c, second);
  o.require(!first.cached && second.cached, "second run not served from cache");
  o.require(slurp(dir / "r.csv") == csv && slurp(dir / "r.json") == js && slurp(dir / "r.svg") == svg,
            "outputs differ on replay");
  if (o.ok) o.detail = "cache hit on rerun, CSV/JSON/SVG byte-identical (fingerprint " + first.fingerprint + ")";
  return o;
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "herald_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"binomial mixture identity", binomial_identity},
      {"Holevo regressions", holevo_regressions},
      {"flag decomposition equivalence", flag_equivalence},
      {"heralded averaging", heralded_averaging},
      {"entropy property suite", entropy_suite},
      {"erasure product vs heralded power", thm51_grid},
      {"erasure sweep", [&] { return erasure_sweep(dir); }},
      {"blocksize coefficient", blocksize_grid},
      {"nonlocal games", games_checks},
      {"squashed entanglement suite", squashed_suite},
      {"determinism and cache", [&] { return determinism(dir); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.ok ? 0 : 1;
    std::printf("criterion %2zu %-36s %s  %s\n", i + 1, criteria[i].first.c_str(), o.ok ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(dir);
  return failures == 0 ? 0 : 1;
}
