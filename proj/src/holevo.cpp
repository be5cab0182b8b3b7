#include "herald/holevo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "herald/entropy.hpp"

namespace herald {

namespace {

// One block of the output: stacked Kraus operators [K_1; ...; K_r] with
// quantum output dimension dq.
struct Block {
  Matrix w;
  int dq = 0;
  int nk = 0;
};

Block stack_kraus(const std::vector<Matrix>& kraus, int dq, int din) {
  Block b;
  b.dq = dq;
  b.nk = static_cast<int>(kraus.size());
  b.w.resize(static_cast<long>(dq) * b.nk, din);
  for (int j = 0; j < b.nk; ++j) b.w.middleRows(static_cast<long>(j) * dq, dq) = kraus[static_cast<std::size_t>(j)];
  return b;
}

// Conditioned on a flag, output factors that sit in a fixed state
// uncorrelated with everything else add the same entropy to every term of
// the Holevo difference, so they can be dropped. Detects such factors from
// the sector's Choi matrix J on [in, out_1, ..., out_m] and returns the
// reduced sector, or nothing if the sector never fires.
std::optional<Block> reduced_sector(const std::vector<Matrix>& kraus, int din, std::vector<int> out_dims) {
  const int dq = std::accumulate(out_dims.begin(), out_dims.end(), 1, std::multiplies<>());
  const long n = static_cast<long>(din) * dq;
  Matrix j = Matrix::Zero(n, n);
  for (const auto& k : kraus) {
    Eigen::Map<const Vector> v(k.data(), n);
    j.noalias() += v * v.adjoint();
  }
  const double weight = j.trace().real();
  if (weight <= 1e-14) return std::nullopt;
  const double tol = 1e-11 * std::max(1.0, max_abs(j));
  std::size_t f = 0;
  while (f < out_dims.size()) {
    std::vector<int> dims{din};
    dims.insert(dims.end(), out_dims.begin(), out_dims.end());
    const int pos = static_cast<int>(f) + 1;
    std::vector<int> perm;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
      if (i != pos) perm.push_back(i);
    }
    perm.push_back(pos);
    Matrix moved = permute_factors(j, dims, perm);
    std::vector<int> moved_dims;
    for (int i : perm) moved_dims.push_back(dims[static_cast<std::size_t>(i)]);
    std::vector<int> rest(perm.size() - 1);
    std::iota(rest.begin(), rest.end(), 0);
    Matrix reduced = partial_trace(moved, moved_dims, rest);
    Matrix tau = partial_trace(moved, moved_dims, {static_cast<int>(perm.size()) - 1}) / weight;
    if (max_abs(moved - kron(reduced, tau)) <= tol) {
      j = std::move(reduced);
      out_dims.erase(out_dims.begin() + static_cast<long>(f));
    } else {
      ++f;
    }
  }
  const int dq_red = std::accumulate(out_dims.begin(), out_dims.end(), 1, std::multiplies<>());
  // Kraus operators from the spectral decomposition of the reduced Choi matrix.
  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Matrix> red;
  for (long i = es.eigenvalues().size() - 1; i >= 0; --i) {
    double mu = es.eigenvalues()(i);
    if (mu <= top * 1e-13) break;
    Vector w = es.eigenvectors().col(i) * std::sqrt(mu);
    red.push_back(Eigen::Map<Matrix>(w.data(), dq_red, din));
  }
  return stack_kraus(red, dq_red, din);
}

std::vector<Block> make_blocks(const KrausChannel& phi, bool use_sectors) {
  std::vector<Block> blocks;
  if (use_sectors) {
    for (const auto& s : phi.sectors()) {
      auto b = reduced_sector(s.kraus, phi.in_dim(), phi.quantum_out_shape().dims());
      if (b) blocks.push_back(std::move(*b));
    }
  } else {
    blocks.push_back(stack_kraus(phi.kraus(), phi.out_dim(), phi.in_dim()));
  }
  return blocks;
}

// Columns K_j psi.
Matrix kraus_images(const Block& b, const Vector& psi) {
  Vector y = b.w * psi;
  return Eigen::Map<Matrix>(y.data(), b.dq, b.nk);
}

double block_entropy(const Matrix& m) {
  if (m.rows() == 1) {
    double l = m(0, 0).real();
    return l > 0.0 ? -l * std::log2(l) : 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return entropy_of_eigenvalues(es.eigenvalues());
}

Matrix clamped_log2(const Matrix& m) {
  return hermitian_function(m, [](double l) { return std::log2(std::max(l, 1e-15)); });
}

struct Eval {
  double value = 0.0;
  std::vector<std::vector<Matrix>> images;  // [x][b]: K_j psi_x columns
  std::vector<std::vector<Matrix>> outputs; // [x][b]: M_xb
  std::vector<Matrix> mbar;
  std::vector<double> s_x;                  // sum_b S(M_xb)
};

class Objective {
 public:
  Objective(const KrausChannel& phi, bool use_sectors) : blocks_(make_blocks(phi, use_sectors)) {}

  Eval evaluate(const std::vector<double>& p, const std::vector<Vector>& psi) const {
    Eval e;
    const std::size_t m = psi.size();
    e.images.resize(m);
    e.outputs.resize(m);
    e.s_x.assign(m, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
      for (const auto& b : blocks_) {
        Matrix v = kraus_images(b, psi[x]);
        Matrix mx = v * v.adjoint();
        e.s_x[x] += block_entropy(mx);
        e.images[x].push_back(std::move(v));
        e.outputs[x].push_back(std::move(mx));
      }
    }
    reweight(e, p);
    return e;
  }

  // Recomputes the average outputs and the value for new weights; the
  // per-x outputs do not depend on p.
  void reweight(Eval& e, const std::vector<double>& p) const {
    e.mbar.clear();
    for (const auto& b : blocks_) e.mbar.push_back(Matrix::Zero(b.dq, b.dq));
    double avg = 0.0;
    for (std::size_t x = 0; x < e.outputs.size(); ++x) {
      if (p[x] == 0.0) continue;
      for (std::size_t bi = 0; bi < blocks_.size(); ++bi) e.mbar[bi].noalias() += p[x] * e.outputs[x][bi];
      avg += p[x] * e.s_x[x];
    }
    double s_bar = 0.0;
    for (const auto& mb : e.mbar) s_bar += block_entropy(mb);
    e.value = s_bar - avg;
  }

  double value_of(const std::vector<double>& p, const std::vector<Vector>& psi) const {
    return evaluate(p, psi).value;
  }

  // Tangent ascent directions (G_x - <G_x>) psi_x, with
  // G_x = sum_b Phi_b^dag(log M_xb - log Mbar_b).
  std::vector<Vector> directions(const Eval& e, const std::vector<Vector>& psi) const {
    std::vector<Matrix> lbar;
    for (const auto& mb : e.mbar) lbar.push_back(clamped_log2(mb));
    std::vector<Vector> out;
    for (std::size_t x = 0; x < psi.size(); ++x) {
      Vector g = Vector::Zero(psi[x].size());
      for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto& b = blocks_[bi];
        const Matrix& v = e.images[x][bi];
        Matrix lx = clamped_log2(e.outputs[x][bi]);
        Matrix y = (lx - lbar[bi]) * v;
        Eigen::Map<const Vector> ys(y.data(), y.size());
        g.noalias() += b.w.adjoint() * ys;
      }
      Complex c = psi[x].dot(g);
      out.push_back(g - c * psi[x]);
    }
    return out;
  }

  // D(Phi(rho_x) || Phi(rho_bar)) for each x. Also refreshes e.value from
  // the same spectral decomposition of the average outputs.
  std::vector<double> divergences(Eval& e, const std::vector<double>& p) const {
    std::vector<Matrix> lbar;
    double s_bar = 0.0;
    for (const auto& mb : e.mbar) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(mb);
      s_bar += entropy_of_eigenvalues(es.eigenvalues());
      RealVector logs = es.eigenvalues().unaryExpr([](double l) { return std::log2(std::max(l, 1e-15)); });
      lbar.push_back(es.eigenvectors() * logs.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
    }
    std::vector<double> d(e.outputs.size(), 0.0);
    double avg = 0.0;
    for (std::size_t x = 0; x < e.outputs.size(); ++x) {
      double cross = 0.0;
      for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        // tr(M_xb L) as an elementwise sum; both are Hermitian.
        cross += (e.outputs[x][bi].conjugate().cwiseProduct(lbar[bi])).sum().real();
      }
      d[x] = -e.s_x[x] - cross;
      avg += p[x] * e.s_x[x];
    }
    e.value = s_bar - avg;
    return d;
  }

  void average(Eval& e, const std::vector<double>& p) const {
    e.mbar.clear();
    for (const auto& b : blocks_) e.mbar.push_back(Matrix::Zero(b.dq, b.dq));
    for (std::size_t x = 0; x < e.outputs.size(); ++x) {
      if (p[x] == 0.0) continue;
      for (std::size_t bi = 0; bi < blocks_.size(); ++bi) e.mbar[bi].noalias() += p[x] * e.outputs[x][bi];
    }
  }

 private:
  std::vector<Block> blocks_;
};

void normalize_probs(std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += v;
  for (double& v : p) v /= s;
}

struct RunResult {
  RestartTrace trace;
  std::vector<double> p;
  std::vector<Vector> psi;
};

RunResult ascend(const Objective& obj, std::vector<double> p, std::vector<Vector> psi, const HolevoOptions& opts) {
  RunResult r;
  Eval cur = obj.evaluate(p, psi);
  r.trace.initial = cur.value;
  double step = 0.5;
  int stalls = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const double start = cur.value;

    // State step.
    auto dirs = obj.directions(cur, psi);
    double t = step;
    for (int h = 0; h < 40; ++h) {
      std::vector<Vector> cand = psi;
      for (std::size_t x = 0; x < cand.size(); ++x) {
        cand[x] += t * dirs[x];
        cand[x].normalize();
      }
      Eval ev = obj.evaluate(p, cand);
      if (ev.value > cur.value) {
        psi = std::move(cand);
        cur = std::move(ev);
        step = std::min(2.0 * t, 8.0);
        break;
      }
      t *= 0.5;
      if (h == 39) step = std::max(t, 1e-6);
    }

    // Probability step: Blahut-Arimoto with psi fixed, warm-started from the
    // previous weights.
    {
      std::vector<double> q = p;
      Eval ev = cur;
      auto d = obj.divergences(ev, q);
      for (int b = 0; b < 50; ++b) {
        double dmax = *std::max_element(d.begin(), d.end());
        std::vector<double> next(q.size());
        for (std::size_t x = 0; x < q.size(); ++x) next[x] = q[x] * std::exp2(d[x] - dmax);
        normalize_probs(next);
        double change = 0.0;
        for (std::size_t x = 0; x < q.size(); ++x) change = std::max(change, std::abs(next[x] - q[x]));
        q = std::move(next);
        obj.average(ev, q);
        d = obj.divergences(ev, q);
        if (change < 1e-8) break;
      }
      if (ev.value > cur.value) {
        p = std::move(q);
        cur = std::move(ev);
      }
    }

    r.trace.history.push_back(cur.value);
    r.trace.iterations = it + 1;
    if (cur.value - start < opts.tol) {
      if (++stalls >= 3) {
        r.trace.converged = true;
        break;
      }
    } else {
      stalls = 0;
    }
  }
  r.trace.value = cur.value;
  r.p = std::move(p);
  r.psi = std::move(psi);
  return r;
}

HolevoEstimate optimize(const KrausChannel& phi, const HolevoOptions& opts, bool use_sectors) {
  const int din = phi.in_dim();
  if (din > opts.max_input_dim) {
    throw GuardExceeded("holevo: input dimension " + std::to_string(din) + " exceeds " +
                        std::to_string(opts.max_input_dim));
  }
  if (opts.restarts < 0 || opts.max_iters < 0) throw InvalidArgument("holevo: negative restarts or iterations");
  const int m = opts.ensemble_size > 0 ? opts.ensemble_size : din * din;
  Objective obj(phi, use_sectors);

  HolevoEstimate est;
  est.seed = opts.seed;
  est.flagged_path = use_sectors;
  est.value = -1.0;
  int index = 0;
  auto consider = [&](RunResult&& rr, bool seeded) {
    rr.trace.index = index;
    rr.trace.seeded = seeded;
    if (rr.trace.value > est.value) {
      est.value = rr.trace.value;
      est.best_restart = index;
      est.ensemble.probs = rr.p;
      est.ensemble.vectors = rr.psi;
    }
    est.trace.push_back(std::move(rr.trace));
    ++index;
  };
  for (const auto& s : opts.seed_ensembles) {
    if (s.size() == 0) continue;
    for (const auto& v : s.vectors) {
      if (v.size() != din) throw InvalidArgument("holevo: seed ensemble has wrong dimension");
    }
    std::vector<double> p = s.probs;
    normalize_probs(p);
    std::vector<Vector> psi = s.vectors;
    for (auto& v : psi) v.normalize();
    consider(ascend(obj, std::move(p), std::move(psi), opts), true);
  }
  for (int r = 0; r < opts.restarts; ++r) {
    PureEnsemble init = random_pure_ensemble(din, m, derive_seed(opts.seed, static_cast<std::uint64_t>(r)));
    consider(ascend(obj, std::move(init.probs), std::move(init.vectors), opts), false);
  }
  if (est.trace.empty()) throw InvalidArgument("holevo: no restarts and no seed ensembles");
  est.value = std::max(est.value, 0.0);
  return est;
}

}  // namespace

void CQEnsemble::validate() const {
  if (probs.empty() || probs.size() != states.size()) throw InvalidArgument("CQEnsemble: size mismatch or empty");
  double s = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw InvalidArgument("CQEnsemble: negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument("CQEnsemble: probabilities do not sum to 1");
  for (const auto& st : states) {
    if (!(st.shape().dims() == states.front().shape().dims())) throw InvalidArgument("CQEnsemble: shape mismatch");
  }
}

CQEnsemble PureEnsemble::to_cq(const SpaceShape& shape) const {
  CQEnsemble e;
  e.probs = probs;
  for (const auto& v : vectors) e.states.push_back(pure_density(shape, v));
  return e;
}

PureEnsemble product_ensemble(const PureEnsemble& a, const PureEnsemble& b) {
  PureEnsemble out;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      out.probs.push_back(a.probs[static_cast<std::size_t>(i)] * b.probs[static_cast<std::size_t>(j)]);
      out.vectors.push_back(kron(a.vectors[static_cast<std::size_t>(i)], b.vectors[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

PureEnsemble random_pure_ensemble(int dim, int m, std::uint64_t seed) {
  Rng rng(seed);
  PureEnsemble e;
  for (int x = 0; x < m; ++x) {
    e.vectors.push_back(random_unit_vector(dim, rng));
    e.probs.push_back(1.0 / m);
  }
  return e;
}

double holevo_of_ensemble(const KrausChannel& phi, const CQEnsemble& e) {
  e.validate();
  if (e.states.front().dim() != phi.in_dim()) throw InvalidArgument("holevo_of_ensemble: state shape mismatch");
  const std::size_t nb = phi.is_flagged() ? phi.sectors().size() : 1;
  std::vector<Matrix> bar;
  double avg = 0.0;
  for (std::size_t x = 0; x < e.states.size(); ++x) {
    auto blocks = phi.apply_sectors(e.states[x].matrix());
    if (bar.empty()) {
      for (const auto& b : blocks) bar.push_back(Matrix::Zero(b.rows(), b.cols()));
    }
    for (std::size_t b = 0; b < nb; ++b) {
      avg += e.probs[x] * entropy_of_matrix(blocks[b]);
      bar[b] += e.probs[x] * blocks[b];
    }
  }
  double s_bar = 0.0;
  for (const auto& b : bar) s_bar += entropy_of_matrix(b);
  return s_bar - avg;
}

double holevo_of_pure_ensemble(const KrausChannel& phi, const PureEnsemble& e, bool use_sectors) {
  if (use_sectors && !phi.is_flagged()) throw InvalidArgument("holevo: channel has no flag sectors");
  for (const auto& v : e.vectors) {
    if (v.size() != phi.in_dim()) throw InvalidArgument("holevo: ensemble dimension mismatch");
  }
  Objective obj(phi, use_sectors);
  return obj.value_of(e.probs, e.vectors);
}

HolevoEstimate maximize_holevo(const KrausChannel& phi, const HolevoOptions& opts) {
  return optimize(phi, opts, false);
}

HolevoEstimate maximize_holevo_flagged(const KrausChannel& phi, const HolevoOptions& opts) {
  if (!phi.is_flagged()) throw InvalidArgument("maximize_holevo_flagged: channel " + phi.name() + " has no flags");
  return optimize(phi, opts, true);
}

HolevoEstimate estimate_chi(const KrausChannel& phi, const HolevoOptions& opts) {
  return optimize(phi, opts, phi.is_flagged());
}

const char* to_string(ChiPotMode m) {
  switch (m) {
    case ChiPotMode::declared:
      return "declared";
    case ChiPotMode::strongly_additive:
      return "strongly_additive";
    case ChiPotMode::assisted_search:
      return "assisted_search";
  }
  return "?";
}

const char* to_string(ChiPotTag t) {
  switch (t) {
    case ChiPotTag::exact:
      return "exact";
    case ChiPotTag::exact_by_declaration:
      return "exact_by_declaration";
    case ChiPotTag::lower_bound:
      return "lower_bound";
  }
  return "?";
}

ChiPotValue chi_pot(const KrausChannel& phi, const ChiPotSpec& spec, const HolevoOptions& opts) {
  ChiPotValue out;
  switch (spec.mode) {
    case ChiPotMode::declared:
      if (!(spec.value >= 0.0) || !std::isfinite(spec.value)) throw InvalidArgument("chi_pot: invalid declared value");
      out.value = spec.value;
      out.tag = ChiPotTag::exact;
      out.detail = "declared";
      return out;
    case ChiPotMode::strongly_additive: {
      auto est = estimate_chi(phi, opts);
      out.value = est.value;
      out.tag = ChiPotTag::exact_by_declaration;
      out.detail = "strongly additive; chi-hat";
      return out;
    }
    case ChiPotMode::assisted_search: {
      if (spec.assistants.empty()) throw InvalidArgument("chi_pot: assisted search needs a nonempty family");
      auto own = estimate_chi(phi, opts);
      out.tag = ChiPotTag::lower_bound;
      out.value = -std::numeric_limits<double>::infinity();
      for (const auto& psi : spec.assistants) {
        auto helper = estimate_chi(psi, opts);
        HolevoOptions joint = opts;
        joint.seed_ensembles.push_back(product_ensemble(own.ensemble, helper.ensemble));
        auto both = estimate_chi(tensor(phi, psi), joint);
        double gain = both.value - helper.value;
        if (gain > out.value) {
          out.value = gain;
          out.detail = "best assistant " + psi.name();
        }
      }
      return out;
    }
  }
  throw InvalidArgument("chi_pot: unknown mode");
}

RegularizationProbe regularization_probe(const KrausChannel& phi, int m, const HolevoOptions& opts) {
  if (m != 1 && m != 2) throw InvalidArgument("regularization_probe: m must be 1 or 2");
  long din_m = 1;
  for (int i = 0; i < m; ++i) din_m *= phi.in_dim();
  if (din_m > opts.max_input_dim) throw GuardExceeded("regularization_probe: input dimension of the tensor power too large");
  RegularizationProbe r;
  r.m = m;
  auto one = estimate_chi(phi, opts);
  r.single = one.value;
  if (m == 1) {
    r.per_use = one.value;
    return r;
  }
  HolevoOptions two = opts;
  two.seed_ensembles.push_back(product_ensemble(one.ensemble, one.ensemble));
  auto est = estimate_chi(tensor_power(phi, 2), two);
  r.per_use = est.value / 2.0;
  r.gap = r.per_use - r.single;
  return r;
}

std::vector<BoundReport> lemma52_check(const KrausChannel& phi, int n, const PureEnsemble& ensemble,
                                       double chi_pot_value, const std::optional<DensityOperator>& sigma) {
  if (n < 1) throw InvalidArgument("lemma52_check: n must be >= 1");
  std::vector<double> info;
  for (int k = 0; k <= n; ++k) {
    auto z = heralded_power(phi, n, k, sigma);
    info.push_back(holevo_of_pure_ensemble(z, ensemble, true));
  }
  std::vector<BoundReport> out;
  for (int k1 = 0; k1 <= n; ++k1) {
    for (int k2 = k1 + 1; k2 <= n; ++k2) {
      BoundReport r;
      r.id = "lemma52";
      r.lhs = info[static_cast<std::size_t>(k2)] - info[static_cast<std::size_t>(k1)];
      r.lhs_provenance = Provenance::analytic;
      r.rhs = (k2 - k1) * chi_pot_value;
      r.rhs_components = {{"k2-k1", k2 - k1}, {"chi_pot", chi_pot_value}};
      r.diagnostics = {{"k1", k1},
                       {"k2", k2},
                       {"I_k1", info[static_cast<std::size_t>(k1)]},
                       {"I_k2", info[static_cast<std::size_t>(k2)]},
                       {"monotone", r.lhs >= -1e-9 ? 1.0 : 0.0}};
      settle(r, "chi_pot", 1e-9);
      if (r.lhs < -1e-9) {
        r.verdict = Verdict::inconclusive;
        r.reason = "I(k2) < I(k1): monotonicity direction did not hold";
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace herald
