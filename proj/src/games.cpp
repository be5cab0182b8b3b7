#include "herald/games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace herald {

// ---- Rational ------------------------------------------------------------------

Rational Rational::parse(const std::string& s) {
  auto to_int = [&](const std::string& t) -> std::int64_t {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("Rational: cannot parse '" + s + "'");
    }
    if (used != t.size()) throw InvalidArgument("Rational: cannot parse '" + s + "'");
    return v;
  };
  Rational r;
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    r.num = to_int(s);
    r.den = 1;
  } else {
    r.num = to_int(s.substr(0, slash));
    r.den = to_int(s.substr(slash + 1));
  }
  if (r.den == 0) throw InvalidArgument("Rational: zero denominator in '" + s + "'");
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  const std::int64_t g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

// ---- Game ----------------------------------------------------------------------

namespace {

std::vector<double> values_of(const std::vector<Rational>& pi) {
  std::vector<double> out;
  out.reserve(pi.size());
  for (const auto& r : pi) out.push_back(r.value());
  return out;
}

/// Common denominator of all entries, or 0 if it overflows.
std::int64_t common_denominator(const std::vector<Rational>& pi) {
  std::int64_t l = 1;
  for (const auto& r : pi) {
    const std::int64_t g = std::gcd(l, r.den);
    const __int128 next = static_cast<__int128>(l / g) * r.den;
    if (next > (static_cast<__int128>(1) << 60)) return 0;
    l = static_cast<std::int64_t>(next);
  }
  return l;
}

}  // namespace

Game::Game(std::string name, int nX, int nY, int nA, int nB, std::vector<double> pi, std::vector<std::uint8_t> v)
    : name_(std::move(name)), nX_(nX), nY_(nY), nA_(nA), nB_(nB), pi_(std::move(pi)), v_(std::move(v)) {
  validate();
}

Game::Game(std::string name, int nX, int nY, int nA, int nB, std::vector<Rational> pi, std::vector<std::uint8_t> v)
    : name_(std::move(name)), nX_(nX), nY_(nY), nA_(nA), nB_(nB), pi_(values_of(pi)), pi_exact_(std::move(pi)),
      v_(std::move(v)) {
  validate();
  const std::int64_t l = common_denominator(*pi_exact_);
  if (l != 0) {
    __int128 total = 0;
    for (const auto& r : *pi_exact_) total += static_cast<__int128>(r.num) * (l / r.den);
    if (total != l) throw InvalidArgument("Game " + name_ + ": question distribution does not sum to 1");
  }
}

void Game::validate() const {
  if (nX_ < 1 || nY_ < 1 || nA_ < 1 || nB_ < 1) throw InvalidArgument("Game " + name_ + ": empty alphabet");
  if (pi_.size() != static_cast<std::size_t>(nX_ * nY_)) {
    throw InvalidArgument("Game " + name_ + ": pi must have nX * nY entries");
  }
  if (v_.size() != static_cast<std::size_t>(nX_ * nY_ * nA_ * nB_)) {
    throw InvalidArgument("Game " + name_ + ": v must have nX * nY * nA * nB entries");
  }
  double sum = 0.0;
  for (double p : pi_) {
    if (!(p >= 0.0)) throw InvalidArgument("Game " + name_ + ": negative question probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("Game " + name_ + ": question distribution does not sum to 1");
  for (auto b : v_) {
    if (b > 1) throw InvalidArgument("Game " + name_ + ": v entries must be 0 or 1");
  }
}

Game chsh_game() {
  std::vector<Rational> pi(4, Rational{1, 4});
  std::vector<std::uint8_t> v(16);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) v[static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b)] = (a ^ b) == (x & y);
      }
    }
  }
  return Game("chsh", 2, 2, 2, 2, std::move(pi), std::move(v));
}

Game constant_game(int nX, int nY, int nA, int nB, bool win) {
  std::vector<Rational> pi(static_cast<std::size_t>(nX * nY), Rational{1, nX * nY});
  std::vector<std::uint8_t> v(static_cast<std::size_t>(nX * nY * nA * nB), win ? 1 : 0);
  return Game(win ? "always-win" : "never-win", nX, nY, nA, nB, std::move(pi), std::move(v));
}

// ---- classical value ----------------------------------------------------------------

ClassicalValue classical_value_detail(const Game& g) {
  const double count = std::pow(g.nA(), g.nX()) * std::pow(g.nB(), g.nY());
  if (count > 1e7) throw GuardExceeded("classical_value: nA^nX nB^nY = " + std::to_string(count) + " exceeds 1e7");

  // Integer weights when pi is exact.
  std::int64_t denom = 0;
  std::vector<std::int64_t> w;
  if (g.pi_exact()) {
    denom = common_denominator(*g.pi_exact());
    if (denom != 0) {
      for (const auto& r : *g.pi_exact()) w.push_back(r.num * (denom / r.den));
    }
  }
  const bool exact = denom != 0;

  std::vector<int> a(static_cast<std::size_t>(g.nX()), 0);
  ClassicalValue best;
  __int128 best_int = -1;
  double best_float = -1.0;
  std::vector<int> b(static_cast<std::size_t>(g.nY()), 0);
  while (true) {
    __int128 total_int = 0;
    double total_float = 0.0;
    for (int y = 0; y < g.nY(); ++y) {
      __int128 top_int = -1;
      double top_float = -1.0;
      int arg = 0;
      for (int bb = 0; bb < g.nB(); ++bb) {
        __int128 si = 0;
        double sf = 0.0;
        for (int x = 0; x < g.nX(); ++x) {
          if (!g.win(x, y, a[static_cast<std::size_t>(x)], bb)) continue;
          if (exact) {
            si += w[static_cast<std::size_t>(x * g.nY() + y)];
          } else {
            sf += g.pi(x, y);
          }
        }
        const bool better = exact ? si > top_int : sf > top_float;
        if (better) {
          top_int = si;
          top_float = sf;
          arg = bb;
        }
      }
      b[static_cast<std::size_t>(y)] = arg;
      total_int += top_int;
      total_float += top_float;
    }
    const bool better = exact ? total_int > best_int : total_float > best_float;
    if (better) {
      best_int = total_int;
      best_float = total_float;
      best.strategy.a = a;
      best.strategy.b = b;
    }
    // Next Alice strategy (odometer).
    int pos = 0;
    while (pos < g.nX()) {
      if (++a[static_cast<std::size_t>(pos)] < g.nA()) break;
      a[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == g.nX()) break;
  }
  best.value = exact ? static_cast<double>(best_int) / static_cast<double>(denom) : best_float;
  return best;
}

double classical_value(const Game& g) { return classical_value_detail(g).value; }

// ---- quantum strategies ------------------------------------------------------------

namespace {

double single_povm_error(const std::vector<Matrix>& povm) {
  if (povm.empty()) return 0.0;
  const long d = povm.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  double err = 0.0;
  for (const auto& e : povm) {
    err = std::max(err, hermiticity_error(e));
    const Matrix h = (e + e.adjoint()) * 0.5;
    const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    err = std::max(err, -ev.minCoeff());
    sum += e;
  }
  return std::max(err, max_abs(sum - Matrix::Identity(d, d)));
}

/// tr_B[(I (x) F) rho] for rho on dA x dB.
Matrix contract_b(const Matrix& rho, const Matrix& f, int dA, int dB) {
  Matrix out = Matrix::Zero(dA, dA);
  for (int a = 0; a < dA; ++a) {
    for (int a2 = 0; a2 < dA; ++a2) {
      Complex s = 0.0;
      for (int b = 0; b < dB; ++b) {
        for (int b2 = 0; b2 < dB; ++b2) s += rho(a * dB + b, a2 * dB + b2) * f(b2, b);
      }
      out(a, a2) = s;
    }
  }
  return out;
}

/// tr_A[(E (x) I) rho].
Matrix contract_a(const Matrix& rho, const Matrix& e, int dA, int dB) {
  Matrix out = Matrix::Zero(dB, dB);
  for (int b = 0; b < dB; ++b) {
    for (int b2 = 0; b2 < dB; ++b2) {
      Complex s = 0.0;
      for (int a = 0; a < dA; ++a) {
        for (int a2 = 0; a2 < dA; ++a2) s += rho(a * dB + b, a2 * dB + b2) * e(a2, a);
      }
      out(b, b2) = s;
    }
  }
  return out;
}

double povm_score(const std::vector<Matrix>& e, const std::vector<Matrix>& m) {
  double s = 0.0;
  for (std::size_t a = 0; a < e.size(); ++a) s += (e[a] * m[a]).trace().real();
  return s;
}

/// E_a = S^{-1/2} G_a^dag G_a S^{-1/2} from a packed real vector.
std::vector<Matrix> povm_from_params(const Eigen::VectorXd& x, int k, int d) {
  std::vector<Matrix> g(static_cast<std::size_t>(k));
  Matrix s = Matrix::Zero(d, d);
  long off = 0;
  for (int a = 0; a < k; ++a) {
    Matrix ga(d, d);
    for (long i = 0; i < static_cast<long>(d) * d; ++i, off += 2) ga(i) = Complex(x(off), x(off + 1));
    g[static_cast<std::size_t>(a)] = ga.adjoint() * ga;
    s += g[static_cast<std::size_t>(a)];
  }
  const Matrix s_inv_half = hermitian_function(s, [](double v) { return v > 1e-14 ? 1.0 / std::sqrt(v) : 0.0; });
  for (auto& e : g) e = s_inv_half * e * s_inv_half;
  return g;
}

/// A POVM at least as good as `current` for maximizing sum tr(E_a M_a).
std::vector<Matrix> improve_povm(const std::vector<Matrix>& current, const std::vector<Matrix>& m) {
  const int k = static_cast<int>(current.size());
  const int d = static_cast<int>(current.front().rows());
  std::vector<Matrix> best = current;
  double best_score = povm_score(current, m);
  if (k == 2) {
    // Helstrom: projector onto the positive part of M_0 - M_1 is optimal.
    const Matrix diff = m[0] - m[1];
    const Matrix p = hermitian_function((diff + diff.adjoint()) * 0.5, [](double v) { return v > 0.0 ? 1.0 : 0.0; });
    std::vector<Matrix> cand = {p, Matrix::Identity(d, d) - p};
    const double sc = povm_score(cand, m);
    if (sc > best_score) {
      best = std::move(cand);
      best_score = sc;
    }
    return best;
  }
  // Numerical ascent on the square-root parametrization.
  Eigen::VectorXd x(2L * k * d * d);
  long off = 0;
  for (int a = 0; a < k; ++a) {
    const Matrix& e = best[static_cast<std::size_t>(a)];
    const Matrix root = hermitian_function((e + e.adjoint()) * 0.5, [](double v) { return std::sqrt(std::max(v, 0.0)); });
    for (long i = 0; i < static_cast<long>(d) * d; ++i, off += 2) {
      x(off) = root(i).real();
      x(off + 1) = root(i).imag();
    }
  }
  auto f = [&](const Eigen::VectorXd& p) { return povm_score(povm_from_params(p, k, d), m); };
  double fx = f(x);
  double step = 0.1;
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd grad(x.size());
    const double h = 1e-6;
    for (long i = 0; i < x.size(); ++i) {
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp(i) += h;
      xm(i) -= h;
      grad(i) = (f(xp) - f(xm)) / (2 * h);
    }
    if (grad.norm() < 1e-10) break;
    bool accepted = false;
    for (int hlv = 0; hlv < 30; ++hlv) {
      const Eigen::VectorXd xn = x + step * grad;
      const double fn = f(xn);
      if (fn > fx) {
        const double gain = fn - fx;
        x = xn;
        fx = fn;
        step *= 2.0;
        accepted = true;
        if (gain < 1e-12) it = 40;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  std::vector<Matrix> cand = povm_from_params(x, k, d);
  if (single_povm_error(cand) <= 1e-8 && povm_score(cand, m) > best_score) best = std::move(cand);
  return best;
}

/// Several games sharing Alice, one Bob each.
struct Multi {
  const std::vector<Game>* games;
  int dA;
  std::vector<int> dBs;
  std::vector<int> dims;     // [dA, dB_1, ...]
  std::vector<int> x_off;    // offset of game i in Alice's alphabet
  int n() const { return static_cast<int>(games->size()); }
  const Game& game(int i) const { return (*games)[static_cast<std::size_t>(i)]; }
};

Multi make_multi(const std::vector<Game>& games, int dA, const std::vector<int>& dBs) {
  Multi mp{&games, dA, dBs, {}, {}};
  mp.dims.push_back(dA);
  mp.dims.insert(mp.dims.end(), dBs.begin(), dBs.end());
  int off = 0;
  for (const auto& g : games) {
    mp.x_off.push_back(off);
    off += g.nX();
  }
  return mp;
}

Matrix pair_marginal(const Multi& mp, const Vector& psi, int i) {
  const Matrix full = psi * psi.adjoint();
  if (mp.n() == 1) return full;
  return partial_trace(full, mp.dims, {0, i + 1});
}

double value_of(const Multi& mp, const QuantumStrategy& s) {
  double total = 0.0;
  for (int i = 0; i < mp.n(); ++i) {
    const Game& g = mp.game(i);
    const Matrix rho = pair_marginal(mp, s.psi, i);
    const int dB = mp.dBs[static_cast<std::size_t>(i)];
    double gi = 0.0;
    for (int y = 0; y < g.nY(); ++y) {
      for (int b = 0; b < g.nB(); ++b) {
        const Matrix r = contract_b(rho, s.bobs[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)][static_cast<std::size_t>(b)], mp.dA, dB);
        for (int x = 0; x < g.nX(); ++x) {
          for (int a = 0; a < g.nA(); ++a) {
            if (!g.win(x, y, a, b) || g.pi(x, y) == 0.0) continue;
            gi += g.pi(x, y) *
                  (r * s.alice[static_cast<std::size_t>(mp.x_off[static_cast<std::size_t>(i)] + x)][static_cast<std::size_t>(a)])
                      .trace()
                      .real();
          }
        }
      }
    }
    total += gi;
  }
  return total / mp.n();
}

/// Game operator on the full space.
Matrix game_operator(const Multi& mp, const QuantumStrategy& s) {
  long D = 1;
  for (int d : mp.dims) D *= d;
  Matrix w = Matrix::Zero(D, D);
  for (int i = 0; i < mp.n(); ++i) {
    const Game& g = mp.game(i);
    const int dB = mp.dBs[static_cast<std::size_t>(i)];
    Matrix wi = Matrix::Zero(mp.dA * dB, mp.dA * dB);
    for (int x = 0; x < g.nX(); ++x) {
      for (int y = 0; y < g.nY(); ++y) {
        if (g.pi(x, y) == 0.0) continue;
        for (int a = 0; a < g.nA(); ++a) {
          for (int b = 0; b < g.nB(); ++b) {
            if (!g.win(x, y, a, b)) continue;
            wi += g.pi(x, y) * kron(s.alice[static_cast<std::size_t>(mp.x_off[static_cast<std::size_t>(i)] + x)][static_cast<std::size_t>(a)],
                                    s.bobs[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)][static_cast<std::size_t>(b)]);
          }
        }
      }
    }
    if (mp.n() == 1) {
      w += wi;
      continue;
    }
    // Order [A, B_i, others...] then permute to [A, B_1, ..., B_n].
    std::vector<int> in_dims = {mp.dA, dB};
    long rest = 1;
    for (int j = 0; j < mp.n(); ++j) {
      if (j == i) continue;
      in_dims.push_back(mp.dBs[static_cast<std::size_t>(j)]);
      rest *= mp.dBs[static_cast<std::size_t>(j)];
    }
    const Matrix embedded = kron(wi, Matrix::Identity(rest, rest));
    std::vector<int> perm = {0};
    int other = 2;
    for (int j = 0; j < mp.n(); ++j) perm.push_back(j == i ? 1 : other++);
    w += permute_factors(embedded, in_dims, perm);
  }
  return w / mp.n();
}

void alice_step(const Multi& mp, QuantumStrategy& s) {
  for (int i = 0; i < mp.n(); ++i) {
    const Game& g = mp.game(i);
    const int dB = mp.dBs[static_cast<std::size_t>(i)];
    const Matrix rho = pair_marginal(mp, s.psi, i);
    for (int x = 0; x < g.nX(); ++x) {
      std::vector<Matrix> m(static_cast<std::size_t>(g.nA()), Matrix::Zero(mp.dA, mp.dA));
      for (int y = 0; y < g.nY(); ++y) {
        if (g.pi(x, y) == 0.0) continue;
        for (int b = 0; b < g.nB(); ++b) {
          const Matrix r = contract_b(rho, s.bobs[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)][static_cast<std::size_t>(b)], mp.dA, dB);
          for (int a = 0; a < g.nA(); ++a) {
            if (g.win(x, y, a, b)) m[static_cast<std::size_t>(a)] += g.pi(x, y) * r;
          }
        }
      }
      auto& e = s.alice[static_cast<std::size_t>(mp.x_off[static_cast<std::size_t>(i)] + x)];
      e = improve_povm(e, m);
    }
  }
}

void bob_step(const Multi& mp, QuantumStrategy& s, int i) {
  const Game& g = mp.game(i);
  const int dB = mp.dBs[static_cast<std::size_t>(i)];
  const Matrix rho = pair_marginal(mp, s.psi, i);
  for (int y = 0; y < g.nY(); ++y) {
    std::vector<Matrix> m(static_cast<std::size_t>(g.nB()), Matrix::Zero(dB, dB));
    for (int x = 0; x < g.nX(); ++x) {
      if (g.pi(x, y) == 0.0) continue;
      for (int a = 0; a < g.nA(); ++a) {
        const Matrix t = contract_a(rho, s.alice[static_cast<std::size_t>(mp.x_off[static_cast<std::size_t>(i)] + x)][static_cast<std::size_t>(a)], mp.dA, dB);
        for (int b = 0; b < g.nB(); ++b) {
          if (g.win(x, y, a, b)) m[static_cast<std::size_t>(b)] += g.pi(x, y) * t;
        }
      }
    }
    auto& f = s.bobs[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)];
    f = improve_povm(f, m);
  }
}

std::vector<Matrix> deterministic_povm(int k, int d, int answer) {
  std::vector<Matrix> e(static_cast<std::size_t>(k), Matrix::Zero(d, d));
  e[static_cast<std::size_t>(answer)] = Matrix::Identity(d, d);
  return e;
}

std::vector<Matrix> random_projective(int k, int d, Rng& rng) {
  const Matrix u = haar_isometry(d, d, rng);
  std::vector<Matrix> e(static_cast<std::size_t>(k), Matrix::Zero(d, d));
  for (int j = 0; j < d; ++j) e[static_cast<std::size_t>(j % k)] += u.col(j) * u.col(j).adjoint();
  return e;
}

QuantumStrategy empty_strategy(const Multi& mp) {
  QuantumStrategy s;
  s.shape = SpaceShape(mp.dims);
  s.bobs.resize(static_cast<std::size_t>(mp.n()));
  return s;
}

GameValueReport seesaw(const std::vector<Game>& games, int dA, const std::vector<int>& dBs, const SeesawOptions& opts) {
  const Multi mp = make_multi(games, dA, dBs);
  GameValueReport rep;
  rep.seed = opts.seed;
  double aval = 0.0;
  std::vector<ClassicalValue> cls;
  for (const auto& g : games) {
    rep.games.push_back(g.name());
    cls.push_back(classical_value_detail(g));
    aval += cls.back().value;
  }
  rep.classical = aval / static_cast<double>(games.size());
  long D = 1;
  for (int d : mp.dims) D *= d;

  double best = -1.0;
  for (int r = 0; r <= opts.restarts; ++r) {
    QuantumStrategy s = empty_strategy(mp);
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(r)));
    if (r == 0) {
      s.psi = Vector::Zero(D);
      s.psi(0) = 1.0;
      for (int i = 0; i < mp.n(); ++i) {
        const Game& g = mp.game(i);
        for (int x = 0; x < g.nX(); ++x) {
          s.alice.push_back(deterministic_povm(g.nA(), dA, cls[static_cast<std::size_t>(i)].strategy.a[static_cast<std::size_t>(x)]));
        }
        for (int y = 0; y < g.nY(); ++y) {
          s.bobs[static_cast<std::size_t>(i)].push_back(deterministic_povm(
              g.nB(), dBs[static_cast<std::size_t>(i)], cls[static_cast<std::size_t>(i)].strategy.b[static_cast<std::size_t>(y)]));
        }
      }
    } else {
      s.psi = random_unit_vector(static_cast<int>(D), rng);
      for (int i = 0; i < mp.n(); ++i) {
        const Game& g = mp.game(i);
        for (int x = 0; x < g.nX(); ++x) s.alice.push_back(random_projective(g.nA(), dA, rng));
        for (int y = 0; y < g.nY(); ++y) {
          s.bobs[static_cast<std::size_t>(i)].push_back(random_projective(g.nB(), dBs[static_cast<std::size_t>(i)], rng));
        }
      }
    }
    std::vector<double> history;
    double value = value_of(mp, s);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      const double start = value;
      // State step.
      const HermitianEigen e = eig_hermitian(game_operator(mp, s));
      QuantumStrategy trial = s;
      trial.psi = e.vectors.col(0);
      if (value_of(mp, trial) >= value) s.psi = trial.psi;
      alice_step(mp, s);
      for (int i = 0; i < mp.n(); ++i) bob_step(mp, s, i);
      if (s.povm_error() > 1e-8) throw Error("seesaw: POVM drift " + std::to_string(s.povm_error()));
      value = value_of(mp, s);
      history.push_back(value);
      if (value - start < opts.tol) break;
    }
    rep.trace.push_back(history);
    if (value > best) {
      best = value;
      rep.best_restart = r;
      rep.strategy = s;
    }
  }
  rep.entangled_lower = best;
  return rep;
}

}  // namespace

double QuantumStrategy::povm_error() const {
  double err = 0.0;
  for (const auto& p : alice) err = std::max(err, single_povm_error(p));
  for (const auto& bob : bobs) {
    for (const auto& p : bob) err = std::max(err, single_povm_error(p));
  }
  return err;
}

double strategy_value(const std::vector<Game>& games, const QuantumStrategy& s) {
  if (s.shape.size() != static_cast<int>(games.size()) + 1) {
    throw InvalidArgument("strategy_value: shape must be [A, B_1, ..., B_n]");
  }
  std::vector<int> dBs(s.shape.dims().begin() + 1, s.shape.dims().end());
  const Multi mp = make_multi(games, s.shape.dim(0), dBs);
  return value_of(mp, s);
}

QuantumStrategy chsh_optimal_strategy() {
  QuantumStrategy s;
  s.shape = SpaceShape({2, 2});
  s.psi = Vector::Zero(4);
  s.psi(0) = s.psi(3) = 1.0 / std::sqrt(2.0);
  Matrix z(2, 2), x(2, 2);
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  const Matrix id = Matrix::Identity(2, 2);
  auto proj = [&](const Matrix& obs) { return std::vector<Matrix>{(id + obs) / 2.0, (id - obs) / 2.0}; };
  s.alice = {proj(z), proj(x)};
  s.bobs = {{proj((z + x) / std::sqrt(2.0)), proj((z - x) / std::sqrt(2.0))}};
  return s;
}

GameValueReport entangled_value_lower(const Game& g, int dA, int dB, const SeesawOptions& opts) {
  if (dA < 1 || dB < 1) throw InvalidArgument("entangled_value_lower: dimensions must be positive");
  if (dA * dB > opts.max_dim) {
    throw GuardExceeded("entangled_value_lower: dA dB = " + std::to_string(dA * dB) + " exceeds " +
                        std::to_string(opts.max_dim));
  }
  return seesaw({g}, dA, {dB}, opts);
}

GameValueReport multi_bob_values(const std::vector<Game>& games, int dA, const std::vector<int>& dBs,
                                 const SeesawOptions& opts) {
  if (games.empty()) throw InvalidArgument("multi_bob_values: no games");
  if (dBs.size() != games.size()) throw InvalidArgument("multi_bob_values: one Bob dimension per game");
  long D = dA;
  for (int d : dBs) D *= d;
  if (D > opts.max_joint_dim) {
    throw GuardExceeded("multi_bob_values: joint dimension " + std::to_string(D) + " exceeds " +
                        std::to_string(opts.max_joint_dim));
  }
  GameValueReport r = seesaw(games, dA, dBs, opts);
  r.monogamy_bound = monogamy_game_bound(static_cast<int>(games.size()), std::max(dA, 2));
  return r;
}

double monogamy_game_bound(int n, int d) {
  if (n < 1 || d < 2) throw InvalidArgument("monogamy_game_bound: need n >= 1 and d >= 2");
  return std::pow(static_cast<double>(n), -0.25) * d * std::pow(std::log2(static_cast<double>(d)), 0.25);
}

}  // namespace herald
