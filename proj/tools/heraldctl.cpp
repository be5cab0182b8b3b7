#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "herald/bounds.hpp"
#include "herald/entropy.hpp"
#include "herald/esq.hpp"
#include "herald/expcli.hpp"
#include "herald/games.hpp"
#include "herald/holevo.hpp"
#include "herald/serialize.hpp"

using namespace herald;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string cache_dir;
  std::string out;
};

void emit(const Globals& g, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(g.out, text);
  }
}

int report_code(const std::vector<BoundReport>& reports) {
  if (reports.empty()) return 0;
  for (const auto& r : reports) {
    if (r.passed()) return 0;
  }
  return 4;
}

Json reports_json(const std::vector<BoundReport>& reports) {
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(report_to_json(r));
  return a;
}

Json strategy_summary(const GameValueReport& r) {
  Json j;
  j["games"] = r.games;
  j["classical"] = r.classical;
  j["entangled_lower"] = r.entangled_lower;
  j["gap"] = r.gap();
  j["best_restart"] = r.best_restart;
  j["restarts_used"] = r.trace.size();
  j["povm_error"] = r.strategy.povm_error();
  if (r.monogamy_bound) j["monogamy_bound"] = *r.monogamy_bound;
  j["seed"] = r.seed;
  return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heraldctl: heralded and erasure channel capacity toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--jobs", g.jobs, "Concurrent grid points for run (0: from config)");
  app.add_option("--cache-dir", g.cache_dir, "Result cache directory (default: $HERALD_CACHE_DIR or .cache)");
  app.add_option("--out", g.out, "Output file (JSON results, SVG for render, directory for run)");

  int rc = 0;

  // channel
  auto* ch = app.add_subcommand("channel", "Inspect or validate a channel");
  std::string ch_spec;
  bool ch_validate = false, ch_dump = false;
  ch->add_option("spec", ch_spec, "Named spec or channel JSON file")->required();
  ch->add_flag("--validate", ch_validate, "Fail unless the channel is trace preserving to 1e-10");
  ch->add_flag("--dump", ch_dump, "Print the channel in the JSON file format");
  ch->callback([&] {
    const KrausChannel c = load_channel(Json(ch_spec));
    const double err = c.completeness_error();
    if (ch_dump) {
      emit(g, channel_to_json(c));
    } else {
      Json j;
      j["name"] = c.name();
      j["in_dims"] = c.in_shape().dims();
      j["out_dims"] = c.out_shape().dims();
      j["kraus_count"] = c.kraus().size();
      j["flagged"] = c.is_flagged();
      if (c.is_flagged()) {
        Json s = Json::array();
        for (const auto& sec : c.sectors()) s.push_back({{"label", sec.label.name}, {"subset", sec.label.subset}});
        j["sectors"] = s;
      }
      j["completeness_error"] = err;
      emit(g, j);
    }
    if (ch_validate && err > 1e-10) {
      throw InvalidArgument("channel is not trace preserving (error " + std::to_string(err) + ")");
    }
  });

  // holevo
  auto* hv = app.add_subcommand("holevo", "Certified lower bound on the Holevo information");
  std::string hv_spec;
  HolevoOptions hopts;
  bool hv_naive = false;
  hv->add_option("spec", hv_spec, "Named spec or channel JSON file")->required();
  hv->add_option("--restarts", hopts.restarts);
  hv->add_option("--max-iters", hopts.max_iters);
  hv->add_option("--tol", hopts.tol);
  hv->add_option("--ensemble-size", hopts.ensemble_size);
  hv->add_flag("--naive", hv_naive, "Ignore the flag structure");
  hv->callback([&] {
    const KrausChannel c = load_channel(Json(hv_spec));
    hopts.seed = g.seed;
    const HolevoEstimate e = hv_naive ? maximize_holevo(c, hopts) : estimate_chi(c, hopts);
    Json j;
    j["channel"] = c.name();
    j["chi_hat"] = e.value;
    j["best_restart"] = e.best_restart;
    j["restarts_used"] = e.restarts_used();
    j["flagged_path"] = e.flagged_path;
    j["seed"] = e.seed;
    Json probs = Json::array();
    for (double p : e.ensemble.probs) probs.push_back(p);
    j["ensemble_probs"] = probs;
    emit(g, j);
  });

  // esq
  auto* eq = app.add_subcommand("esq", "Upper bounds on squashed entanglement");
  std::string eq_state, eq_through, eq_suite;
  std::vector<int> eq_a, eq_b;
  EsqOptions eopts;
  eq->add_option("--state", eq_state, "Named state spec or state JSON file");
  eq->add_option("--a", eq_a, "Factors of A (or the channel input with --through)");
  eq->add_option("--b", eq_b, "Factors of B (B0 with --through)");
  eq->add_option("--through", eq_through, "Channel applied to the A factors");
  eq->add_option("--suite", eq_suite, "Monogamy suite JSON file, or 'default'");
  eq->add_option("--restarts", eopts.restarts);
  eq->add_option("--max-iters", eopts.max_iters);
  eq->add_option("--ext-dim", eopts.ext_dim);
  eq->callback([&] {
    eopts.seed = g.seed;
    if (!eq_suite.empty()) {
      const auto suite = eq_suite == "default" ? default_monogamy_suite() : suite_from_json(read_json_file(eq_suite));
      const auto reports = monogamy_harness(suite, eopts);
      emit(g, reports_json(reports));
      rc = report_code(reports);
      return;
    }
    if (eq_state.empty()) throw InvalidArgument("esq: --state or --suite is required");
    const DensityOperator rho = eq_state.size() > 5 && eq_state.substr(eq_state.size() - 5) == ".json"
                                    ? state_from_json(read_json_file(eq_state))
                                    : parse_state_spec(eq_state);
    if (eq_a.empty() || eq_b.empty()) throw InvalidArgument("esq: --a and --b are required");
    const EsqUpperBound u = eq_through.empty()
                                ? esq_upper(rho, eq_a, eq_b, eopts)
                                : esq_upper_through_channel(rho, eq_b, eq_a, load_channel(Json(eq_through)), eopts);
    Json j;
    j["esq_upper"] = u.value;
    j["baseline"] = u.baseline;
    j["marginal_error"] = u.marginal_error;
    j["at_baseline"] = u.at_baseline();
    j["restarts_used"] = u.trace.size();
    if (!u.sector_names.empty()) {
      j["sectors"] = Json::array();
      for (std::size_t i = 0; i < u.sector_names.size(); ++i) {
        j["sectors"].push_back({{"label", u.sector_names[i]}, {"prob", u.sector_probs[i]}, {"esq", u.sector_values[i]}});
      }
    }
    j["notes"] = u.notes;
    j["seed"] = g.seed;
    emit(g, j);
  });

  // game
  auto* gm = app.add_subcommand("game", "Nonlocal game values");
  gm->require_subcommand(1);
  auto* gv = gm->add_subcommand("value", "Classical value or see-saw entangled lower bound");
  std::string gv_game = "chsh", gv_mode = "classical";
  int gv_dA = 2, gv_dB = 2;
  SeesawOptions sopts;
  gv->add_option("--game", gv_game, "Built-in name or game JSON file");
  gv->add_option("--mode", gv_mode)->check(CLI::IsMember({"classical", "seesaw"}));
  gv->add_option("--dA", gv_dA);
  gv->add_option("--dB", gv_dB);
  gv->add_option("--restarts", sopts.restarts);
  gv->callback([&] {
    const Game game = load_game(Json(gv_game));
    if (gv_mode == "classical") {
      const ClassicalValue cv = classical_value_detail(game);
      emit(g, {{"game", game.name()}, {"classical", cv.value}, {"a", cv.strategy.a}, {"b", cv.strategy.b}});
      return;
    }
    sopts.seed = g.seed;
    emit(g, strategy_summary(entangled_value_lower(game, gv_dA, gv_dB, sopts)));
  });
  auto* gmb = gm->add_subcommand("multibob", "Shared-Alice values with several Bobs");
  std::string gmb_games = "chsh,chsh";
  int gmb_dA = 2, gmb_dB = 2;
  gmb->add_option("--games", gmb_games, "Comma-separated built-in names or files");
  gmb->add_option("--dA", gmb_dA);
  gmb->add_option("--dB", gmb_dB);
  gmb->add_option("--restarts", sopts.restarts);
  gmb->callback([&] {
    std::vector<Game> games;
    for (const auto& s : split(gmb_games, ',')) games.push_back(load_game(Json(s)));
    sopts.seed = g.seed;
    const std::vector<int> dBs(games.size(), gmb_dB);
    emit(g, strategy_summary(multi_bob_values(games, gmb_dA, dBs, sopts)));
  });

  // bounds
  auto* bd = app.add_subcommand("bounds", "Evaluate single bound reports");
  bd->require_subcommand(1);
  double b_lambda = 0.5;
  int b_d = 2, b_sum_k = 1, b_n = 2;
  std::string b_kind = "erasure", b_channel = "identity(2)";
  auto* bc = bd->add_subcommand("correction", "Correction terms and their hypothesis");
  bc->add_option("--lambda", b_lambda)->required();
  bc->add_option("--d", b_d);
  bc->add_option("--sum-k", b_sum_k);
  bc->add_option("--kind", b_kind)->check(CLI::IsMember({"correction", "additivity", "combined", "erasure"}));
  bc->callback([&] {
    CorrectionTerm c;
    if (b_kind == "correction") c = correction_term(b_lambda, b_d);
    if (b_kind == "additivity") c = additivity_correction(b_lambda, b_d, b_sum_k);
    if (b_kind == "combined") c = combined_correction(b_lambda, b_d, b_sum_k);
    if (b_kind == "erasure") c = erasure_correction(b_lambda, b_d);
    emit(g, {{"kind", b_kind},
             {"value", number_to_json(c.value)},
             {"admissible", c.admissible},
             {"hypothesis_value", c.hypothesis_value}});
  });
  HolevoOptions bh;
  auto* b53 = bd->add_subcommand("cor53", "Erasure channel bound at one lambda");
  b53->add_option("--channel", b_channel);
  b53->add_option("--lambda", b_lambda)->required();
  b53->add_option("--restarts", bh.restarts);
  b53->callback([&] {
    bh.seed = g.seed;
    const PostSelected ps = post_selected_capacity(load_channel(Json(b_channel)), b_lambda, {bh});
    Json j = report_to_json(ps.report);
    j["post_selected"] = {{"lower", number_to_json(ps.lower)}, {"upper", number_to_json(ps.upper)}};
    emit(g, j);
    rc = report_code({ps.report});
  });
  double b_chi_pot = -1.0;
  auto* b51 = bd->add_subcommand("thm51", "Erasure product against the heralded power");
  b51->add_option("--channel", b_channel);
  b51->add_option("--n", b_n);
  b51->add_option("--lambda", b_lambda)->required();
  b51->add_option("--chi-pot", b_chi_pot, "Declared chi_pot (default: strongly additive)");
  b51->add_option("--restarts", bh.restarts);
  b51->callback([&] {
    bh.seed = g.seed;
    ChiPotSpec pot;
    if (b_chi_pot >= 0.0) {
      pot.mode = ChiPotMode::declared;
      pot.value = b_chi_pot;
    }
    const BoundReport r = thm51_compare(load_channel(Json(b_channel)), b_n, b_lambda, pot, {bh});
    emit(g, report_to_json(r));
    rc = report_code({r});
  });
  double b_f1 = 1.0, b_fpot = 1.0;
  auto* bbs = bd->add_subcommand("blocksize", "Blocksize bound for n copies of one channel");
  bbs->add_option("--channel", b_channel);
  bbs->add_option("--n", b_n);
  bbs->add_option("--lambda", b_lambda)->required();
  bbs->add_option("--f1", b_f1);
  bbs->add_option("--fpot", b_fpot);
  bbs->callback([&] {
    const std::vector<KrausChannel> phis(static_cast<std::size_t>(b_n), load_channel(Json(b_channel)));
    const std::vector<double> f1(phis.size(), b_f1), fpot(phis.size(), b_fpot);
    const BoundReport r = blocksize_bound(phis, b_lambda, f1, fpot);
    emit(g, report_to_json(r));
    rc = report_code({r});
  });

  // run
  auto* rn = app.add_subcommand("run", "Run an experiment config");
  std::string rn_config;
  bool rn_no_cache = false;
  rn->add_option("config", rn_config, "Experiment config JSON")->required();
  rn->add_flag("--no-cache", rn_no_cache, "Recompute and do not store");
  rn->callback([&] {
    ExperimentConfig c = load_config(rn_config);
    if (!g.out.empty()) {
      c.out_csv = g.out + "/result.csv";
      c.out_json = g.out + "/result.json";
      c.out_svg = g.out + "/result.svg";
    }
    RunOptions ro;
    ro.cache_dir = g.cache_dir;
    ro.use_cache = !rn_no_cache;
    ro.jobs = g.jobs;
    const ResultRecord r = run(c, ro);
    write_outputs(c, r);
    int pass = 0;
    for (const auto& row : r.record.at("rows")) pass += row.at("report").at("verdict") == "PASS" ? 1 : 0;
    std::cout << "experiment=" << c.experiment << " fingerprint=" << r.fingerprint
              << " cached=" << (r.cached ? "true" : "false") << " rows=" << r.record.at("rows").size()
              << " pass=" << pass << "\n";
    if (c.out_csv.empty() && c.out_json.empty() && c.out_svg.empty()) std::cout << render_csv(r.record);
    rc = verdict_exit_code(r.record);
  });

  // render
  auto* rd = app.add_subcommand("render", "Plot lhs and rhs columns of a result CSV");
  std::string rd_csv;
  rd->add_option("csv", rd_csv, "CSV written by run")->required();
  rd->callback([&] {
    std::ifstream in(rd_csv);
    if (!in) throw InvalidArgument("cannot open '" + rd_csv + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string svg = render_csv_svg(ss.str());
    if (g.out.empty()) {
      std::cout << svg;
    } else {
      write_file_atomic(g.out, svg);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const GuardExceeded& e) {
    std::cerr << "guard exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
