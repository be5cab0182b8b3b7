#pragma once

// Two-player nonlocal games: exact classical values, see-saw lower bounds on
// entangled values, and the multi-Bob setting with a shared Alice.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herald/qcore.hpp"

namespace herald {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// "p/q" or an integer; throws InvalidArgument otherwise.
  static Rational parse(const std::string& s);
  std::string to_string() const;
};

class Game {
 public:
  /// pi indexed x * nY + y; v indexed ((x * nY + y) * nA + a) * nB + b.
  Game(std::string name, int nX, int nY, int nA, int nB, std::vector<double> pi, std::vector<std::uint8_t> v);
  /// Exact question distribution; classical_value is then computed exactly.
  Game(std::string name, int nX, int nY, int nA, int nB, std::vector<Rational> pi, std::vector<std::uint8_t> v);

  const std::string& name() const { return name_; }
  int nX() const { return nX_; }
  int nY() const { return nY_; }
  int nA() const { return nA_; }
  int nB() const { return nB_; }
  double pi(int x, int y) const { return pi_[static_cast<std::size_t>(x * nY_ + y)]; }
  bool win(int x, int y, int a, int b) const {
    return v_[static_cast<std::size_t>(((x * nY_ + y) * nA_ + a) * nB_ + b)] != 0;
  }
  const std::optional<std::vector<Rational>>& pi_exact() const { return pi_exact_; }
  const std::vector<double>& pi_values() const { return pi_; }
  const std::vector<std::uint8_t>& v_values() const { return v_; }

 private:
  void validate() const;

  std::string name_;
  int nX_, nY_, nA_, nB_;
  std::vector<double> pi_;
  std::optional<std::vector<Rational>> pi_exact_;
  std::vector<std::uint8_t> v_;
};

/// Uniform questions, win iff a xor b = x and y.
Game chsh_game();
/// Every answer wins (value 1) or loses (value 0).
Game constant_game(int nX, int nY, int nA, int nB, bool win);

struct ClassicalStrategy {
  std::vector<int> a;  // a(x)
  std::vector<int> b;  // b(y)
};

struct ClassicalValue {
  double value = 0.0;
  ClassicalStrategy strategy;
};

/// Exact optimum over deterministic strategies. Guard nA^nX nB^nY <= 1e7.
ClassicalValue classical_value_detail(const Game& g);
double classical_value(const Game& g);

/// Pure state on [A, B_1, ..., B_n] and POVMs. Alice's families are indexed by
/// the disjoint union of the games' question alphabets.
struct QuantumStrategy {
  SpaceShape shape;
  Vector psi;
  std::vector<std::vector<Matrix>> alice;              // [x][a]
  std::vector<std::vector<std::vector<Matrix>>> bobs;  // [i][y][b]

  /// Largest deviation from PSD / completeness over all POVMs.
  double povm_error() const;
};

/// (1/n) sum_i sum pi_i v_i tr(rho^{A B_i} E (x) F_i).
double strategy_value(const std::vector<Game>& games, const QuantumStrategy& s);
/// Maximally entangled qubits with the standard CHSH observables.
QuantumStrategy chsh_optimal_strategy();

struct SeesawOptions {
  int restarts = 8;  // random restarts after the classical seed
  int max_sweeps = 200;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  int max_dim = 36;        // dA dB for one game
  int max_joint_dim = 64;  // dA prod dB_i for multi-Bob
};

struct GameValueReport {
  std::vector<std::string> games;
  double classical = 0.0;         // val(G), or Aval for several games
  double entangled_lower = 0.0;   // see-saw value, a lower bound on val* / Aval*_d
  QuantumStrategy strategy;
  std::vector<std::vector<double>> trace;  // value after each sweep, per restart
  int best_restart = 0;
  std::optional<double> monogamy_bound;  // multi-Bob only
  std::uint64_t seed = 0;

  double gap() const { return entangled_lower - classical; }
};

GameValueReport entangled_value_lower(const Game& g, int dA, int dB, const SeesawOptions& opts = {});
GameValueReport multi_bob_values(const std::vector<Game>& games, int dA, const std::vector<int>& dBs,
                                 const SeesawOptions& opts = {});

/// n^{-1/4} d (log2 d)^{1/4}.
double monogamy_game_bound(int n, int d);

}  // namespace herald
