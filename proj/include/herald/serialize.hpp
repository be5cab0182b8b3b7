#pragma once

// JSON formats for channels, states, games and reports, and the named
// builtin syntax, e.g. "depolarizing(2,0.3)" or "werner(0.5)".

#include <string>
#include <vector>

#include <json.hpp>

#include "herald/channels.hpp"
#include "herald/esq.hpp"
#include "herald/games.hpp"
#include "herald/report.hpp"

namespace herald {

inline constexpr const char* kVersion = "0.3.0";

using Json = nlohmann::json;

/// Rows of entries; an entry is a real number or a [re, im] pair.
Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);

/// Finite numbers as numbers, otherwise "inf", "-inf" or "nan".
Json number_to_json(double v);
double number_from_json(const Json& j);

/// identity(d), depolarizing(d,p), dephasing(p), trivial(d), erasure(inner,lambda),
/// heralded(k;inner,inner,...).
KrausChannel parse_channel_spec(const std::string& spec);
/// bell, ghz(n), werner(p), mixed(d), basis(d,i), product(s1,s2,...).
DensityOperator parse_state_spec(const std::string& spec);
/// chsh, always-win, never-win.
Game parse_game_spec(const std::string& spec);

/// {name, in_dims, out_dims, kraus: [matrix...]} or, for flagged channels,
/// {name, in_dims, quantum_out_dims, sectors: [{label, subset, positions, kraus}]}.
KrausChannel channel_from_json(const Json& j);
Json channel_to_json(const KrausChannel& c);
/// A JSON object, a file path ending in .json, or a named spec.
KrausChannel load_channel(const Json& ref);

/// {name?, dims, matrix} or {name?, constructor}.
DensityOperator state_from_json(const Json& j);

/// {name, nX, nY, nA, nB, pi: rows of "p/q" strings or numbers, v: [x][y][a][b]}.
Game game_from_json(const Json& j);
Json game_to_json(const Game& g);
Game load_game(const Json& ref);

/// {states: [{name, dims, matrix | constructor, analytic_esq, analytic_note}]};
/// analytic_esq is a number (one B) or a list (one per B_j).
std::vector<MonogamyCase> suite_from_json(const Json& j);

Json report_to_json(const BoundReport& r);

Json read_json_file(const std::string& path);
/// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace herald
