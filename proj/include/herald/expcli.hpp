#pragma once

// Experiment configs, the experiment registry, the fingerprint-keyed result
// cache and CSV/JSON/SVG emission.

#include <cstdint>
#include <string>
#include <vector>

#include "herald/serialize.hpp"
#include "herald/svg.hpp"

namespace herald {

/// Config file layout (JSON):
///   experiment: erasure-sweep | heralded-additivity | thm51 | blocksize | games-monogamy
///   channels:   list of named specs, channel objects or {"file": path}
///   grid:       {"lambda": "start:end:points" | [values]} or {"n": [values]}
///   optimizer:  {restarts, max_iters, tol, ensemble_size}
///   seed, jobs, wall_clock (bool, default true), out: {csv, json, svg}
/// plus per-experiment fields (k, n, phi0, chi_pot, f1, fpot, evaluate_lhs,
/// games, dA, dB). File references are inlined at load time so the
/// fingerprint covers their content.
struct ExperimentConfig {
  std::string experiment;
  Json body;  // validated, references inlined
  std::string grid_axis;  // "lambda" or "n"
  std::vector<double> grid;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_csv;
  std::string out_json;
  std::string out_svg;
};

const std::vector<std::string>& experiment_ids();

/// Validates and normalizes; InvalidArgument messages name the offending field.
ExperimentConfig parse_config(const Json& j, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);

/// "start:end:points" (inclusive, evenly spaced) or an explicit list.
std::vector<double> parse_grid_axis(const Json& v, const std::string& field);

/// FNV-1a over the canonical dump of the config without out/jobs, plus the
/// artifact version.
std::string config_fingerprint(const ExperimentConfig& c);

/// HERALD_CACHE_DIR if set, else ".cache".
std::string default_cache_dir();

struct RunOptions {
  std::string cache_dir;  // empty -> default_cache_dir()
  bool use_cache = true;
  int jobs = 0;  // 0 -> config value
};

struct ResultRecord {
  std::string fingerprint;
  Json record;  // {fingerprint, version, experiment, config, rows, timings, environment}
  bool cached = false;
};

ResultRecord run(const ExperimentConfig& c, const RunOptions& opts = {});

/// Columns: <axis>, lhs, rhs, slack, verdict, restarts_used, wall_ms.
std::string render_csv(const Json& record);
std::string render_record_json(const Json& record);
/// lhs and rhs against the grid axis.
std::string render_record_svg(const Json& record);
/// Same plot from a CSV produced by render_csv.
std::string render_csv_svg(const std::string& csv);

/// Writes every configured output atomically.
void write_outputs(const ExperimentConfig& c, const ResultRecord& r);

/// 0 when some row passes or there are no rows, 4 when every row is inconclusive.
int verdict_exit_code(const Json& record);

/// Cache entry file for a fingerprint.
std::string cache_path(const std::string& cache_dir, const std::string& fingerprint);

}  // namespace herald
