#include "herald/esq.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "herald/entropy.hpp"
#include "lbfgs.hpp"

namespace herald {

namespace {

constexpr double kLogFloor = 1e-15;
constexpr double kMarginalTol = 1e-8;

void check_parts(const SpaceShape& shape, const std::vector<int>& a, const std::vector<int>& b, const char* who) {
  if (a.empty() || b.empty()) throw InvalidArgument(std::string(who) + ": empty subsystem list");
  std::vector<int> all = a;
  all.insert(all.end(), b.begin(), b.end());
  for (int i : all) {
    if (i < 0 || i >= shape.size()) throw InvalidArgument(std::string(who) + ": subsystem index out of range");
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw InvalidArgument(std::string(who) + ": subsystem lists overlap");
  }
}

/// rho_AB on [A..., B...] flattened to (dA, dB).
Matrix reduce_ab(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> keep = a;
  keep.insert(keep.end(), b.begin(), b.end());
  return reduce_ordered(rho, keep).matrix();
}

/// log2 on the support, with eigenvalues floored for the gradient.
Matrix log2_floored(const Matrix& m) {
  return hermitian_function(m, [](double x) { return std::log2(std::max(x, kLogFloor)); });
}

double entropy_psd(const Matrix& m) { return entropy_of_eigenvalues(eigvals_hermitian(m)); }

/// Regroups Y (dABC x r) into the column stacks used for the marginals.
struct Stacks {
  Matrix c;   // dC x (dAB r)
  Matrix bc;  // dBC x (dA r)
  Matrix ac;  // dAC x (dB r)
};

Stacks stacks(const Matrix& y, int dA, int dB, int dC) {
  const int r = static_cast<int>(y.cols());
  const int dAB = dA * dB;
  Stacks s;
  s.c.resize(dC, static_cast<long>(dAB) * r);
  s.bc.resize(static_cast<long>(dB) * dC, static_cast<long>(dA) * r);
  s.ac.resize(static_cast<long>(dA) * dC, static_cast<long>(dB) * r);
  for (int k = 0; k < r; ++k) {
    for (int a = 0; a < dA; ++a) {
      for (int b = 0; b < dB; ++b) {
        for (int c = 0; c < dC; ++c) {
          const Complex v = y((static_cast<long>(a) * dB + b) * dC + c, k);
          s.c(c, static_cast<long>(k) * dAB + a * dB + b) = v;
          s.bc(static_cast<long>(b) * dC + c, static_cast<long>(k) * dA + a) = v;
          s.ac(static_cast<long>(a) * dC + c, static_cast<long>(k) * dB + b) = v;
        }
      }
    }
  }
  return s;
}

/// I(A;B|C) of sum_k y_k y_k^dag, optionally with dI/dY* (times 1/2, i.e.
/// the matrix Gamma Y).
double cmi_of_columns(const Matrix& y, int dA, int dB, int dC, Matrix* gamma_y) {
  const Stacks s = stacks(y, dA, dB, dC);
  const Matrix rho_c = s.c * s.c.adjoint();
  const Matrix rho_bc = s.bc * s.bc.adjoint();
  const Matrix rho_ac = s.ac * s.ac.adjoint();
  const Matrix gram = y.adjoint() * y;
  const double value = entropy_psd(rho_ac) + entropy_psd(rho_bc) - entropy_psd(gram) - entropy_psd(rho_c);
  if (gamma_y == nullptr) return value;

  const int r = static_cast<int>(y.cols());
  const int dAB = dA * dB;
  const Matrix lc = log2_floored(rho_c) * s.c;
  const Matrix lbc = log2_floored(rho_bc) * s.bc;
  const Matrix lac = log2_floored(rho_ac) * s.ac;
  Matrix g = y * log2_floored(gram);
  for (int k = 0; k < r; ++k) {
    for (int a = 0; a < dA; ++a) {
      for (int b = 0; b < dB; ++b) {
        for (int c = 0; c < dC; ++c) {
          g((static_cast<long>(a) * dB + b) * dC + c, k) +=
              lc(c, static_cast<long>(k) * dAB + a * dB + b) - lbc(static_cast<long>(b) * dC + c, static_cast<long>(k) * dA + a) -
              lac(static_cast<long>(a) * dC + c, static_cast<long>(k) * dB + b);
        }
      }
    }
  }
  *gamma_y = std::move(g);
  return value;
}

/// Columns y_k = vec(V_k psi^T) with V_k the rows c * r + k of V.
Matrix columns_from_isometry(const Matrix& psi, const Matrix& v, int dC, int r) {
  const long dAB = psi.rows();
  Matrix y(dAB * dC, r);
  for (int k = 0; k < r; ++k) {
    Matrix vk(dC, v.cols());
    for (int c = 0; c < dC; ++c) vk.row(c) = v.row(static_cast<long>(c) * r + k);
    const Matrix yk = vk * psi.transpose();  // dC x dAB
    for (long ab = 0; ab < dAB; ++ab) {
      for (int c = 0; c < dC; ++c) y(ab * dC + c, k) = yk(c, ab);
    }
  }
  return y;
}

Matrix polar_factor(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Eigenbasis of rho with each degenerate cluster resolved by the
/// computational-basis index operator, so classical states get product vectors.
HermitianEigen resolved_eigen(const Matrix& rho) {
  HermitianEigen e = eig_hermitian(rho);
  const long d = rho.rows();
  Matrix index = Matrix::Zero(d, d);
  for (long i = 0; i < d; ++i) index(i, i) = static_cast<double>(i);
  long start = 0;
  while (start < d) {
    long end = start + 1;
    while (end < d && std::abs(e.values(end) - e.values(start)) < 1e-10) ++end;
    if (end - start > 1) {
      Matrix block = e.vectors.middleCols(start, end - start);
      Matrix proj = block.adjoint() * index * block;
      proj = (proj + proj.adjoint()).eval() * 0.5;
      Eigen::SelfAdjointEigenSolver<Matrix> es(proj);
      e.vectors.middleCols(start, end - start) = block * es.eigenvectors();
    }
    start = end;
  }
  return e;
}

struct Candidate {
  double cmi = std::numeric_limits<double>::infinity();
  std::function<Matrix()> build;  // extension matrix on [A, B, C]
  int dC = 1;
};

/// Result of one extension search on a flattened (dA, dB) state.
struct SearchResult {
  double cmi = 0.0;
  double baseline_cmi = 0.0;
  Matrix extension;
  int dC = 1;
  double marginal_error = 0.0;
  std::vector<EsqRestart> trace;
  std::vector<std::string> notes;
};

double marginal_error_of(const Matrix& ext, const Matrix& rho_ab, int dAB, int dC) {
  const std::vector<int> dims = {dAB, dC};
  return max_abs(partial_trace(ext, dims, {0}) - rho_ab);
}

SearchResult search(const Matrix& rho_ab, int dA, int dB, const EsqOptions& opts, bool assemble) {
  const int dAB = dA * dB;
  SearchResult out;
  std::vector<Candidate> candidates;

  // Baseline: trivial extension.
  {
    const std::vector<int> dims = {dA, dB};
    const double ia = entropy_psd(partial_trace(rho_ab, dims, {0}));
    const double ib = entropy_psd(partial_trace(rho_ab, dims, {1}));
    out.baseline_cmi = std::max(0.0, ia + ib - entropy_psd(rho_ab));
    Candidate c;
    c.cmi = out.baseline_cmi;
    c.build = [rho_ab]() { return rho_ab; };
    c.dC = 1;
    candidates.push_back(std::move(c));
    out.trace.push_back({0, "baseline", 0, out.baseline_cmi / 2, out.baseline_cmi / 2});
  }

  // Purification.
  const HermitianEigen eig = resolved_eigen(rho_ab);
  const double top = std::max(eig.values(0), 0.0);
  int dE = 0;
  while (dE < eig.values.size() && eig.values(dE) > 1e-13 * std::max(1.0, top)) ++dE;
  Matrix psi(dAB, dE);
  for (int e = 0; e < dE; ++e) psi.col(e) = eig.vectors.col(e) * std::sqrt(eig.values(e));

  // Eigen-copy: C records which eigenvector, dephased.
  {
    double v = 0.0;
    for (int e = 0; e < dE; ++e) {
      const Matrix ve = eig.vectors.col(e) * eig.vectors.col(e).adjoint();
      const std::vector<int> dims = {dA, dB};
      v += eig.values(e) * 2.0 * entropy_psd(partial_trace(ve, dims, {0}));
    }
    Candidate c;
    c.cmi = std::max(0.0, v);
    c.dC = dE;
    c.build = [eig, dE, dAB]() {
      Matrix m = Matrix::Zero(static_cast<long>(dAB) * dE, static_cast<long>(dAB) * dE);
      for (int e = 0; e < dE; ++e) {
        Vector col = Vector::Zero(static_cast<long>(dAB) * dE);
        for (int ab = 0; ab < dAB; ++ab) col(static_cast<long>(ab) * dE + e) = eig.vectors(ab, e);
        m += std::max(eig.values(e), 0.0) * col * col.adjoint();
      }
      return m;
    };
    out.trace.push_back({1, "eigencopy", 0, c.cmi / 2, c.cmi / 2});
    candidates.push_back(std::move(c));
  }

  // Explicit seed extensions.
  int idx = 2;
  for (const auto& s : opts.seed_extensions) {
    if (s.dim() % dAB != 0) throw InvalidArgument("esq_upper: seed extension dimension not a multiple of dA dB");
    const int dC = s.dim() / dAB;
    const double err = marginal_error_of(s.matrix(), rho_ab, dAB, dC);
    if (err > kMarginalTol) {
      out.notes.push_back("seed extension " + std::to_string(idx - 2) + " rejected: marginal error " +
                          std::to_string(err));
      ++idx;
      continue;
    }
    const std::vector<int> dims = {dA, dB, dC};
    const Matrix m = s.matrix();
    const double v = std::max(
        0.0, entropy_psd(partial_trace(m, dims, {0, 2})) + entropy_psd(partial_trace(m, dims, {1, 2})) -
                 entropy_psd(m) - entropy_psd(partial_trace(m, dims, {2})));
    Candidate c;
    c.cmi = v;
    c.dC = dC;
    c.build = [m]() { return m; };
    candidates.push_back(std::move(c));
    out.trace.push_back({idx++, "seed", 0, v / 2, v / 2});
  }

  // Isometry search.
  const int dC = opts.ext_dim > 0 ? opts.ext_dim : dAB;
  int r = std::max(1, opts.kraus_rank);
  while (dC * r < dE) ++r;
  for (int rs = 0; rs < opts.restarts && dE > 0; ++rs) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(rs)));
    Matrix v;
    if (rs == 0 && dC >= dE) {
      // Start from partial dephasing of the eigen index.
      v = Matrix::Zero(static_cast<long>(dC) * r, dE);
      for (int e = 0; e < dE; ++e) v(static_cast<long>(e) * r + (e % r), e) = 1.0;
    } else {
      v = haar_isometry(dC * r, dE, rng);
    }
    Matrix grad;
    double f = detail::esq_objective(psi, v, dA, dB, dC, r, &grad);
    EsqRestart t{idx++, "random", 0, f / 2, f / 2};
    double step = 0.1;
    int stall = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
      t.iterations = it + 1;
      const Matrix vg = v.adjoint() * grad;
      const Matrix p = grad - v * (vg + vg.adjoint()) * 0.5;
      const double pn2 = p.squaredNorm();
      if (pn2 < 1e-20) break;
      double s = step;
      bool accepted = false;
      Matrix v_new;
      Matrix g_new;
      double f_new = f;
      for (int h = 0; h < 40; ++h) {
        v_new = polar_factor(v - s * p);
        f_new = detail::esq_objective(psi, v_new, dA, dB, dC, r, &g_new);
        if (f_new <= f - 1e-4 * s * pn2) {
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) break;
      const double improvement = f - f_new;
      v = std::move(v_new);
      grad = std::move(g_new);
      f = f_new;
      step = std::min(2.0 * s, 10.0);
      stall = improvement < opts.tol ? stall + 1 : 0;
      if (stall >= 3) break;
    }
    t.value = std::max(0.0, f) / 2;
    out.trace.push_back(t);
    Candidate c;
    c.cmi = std::max(0.0, f);
    c.dC = dC;
    c.build = [psi, v, dC, r]() {
      const Matrix y = columns_from_isometry(psi, v, dC, r);
      return Matrix(y * y.adjoint());
    };
    candidates.push_back(std::move(c));
  }

  // Best candidate whose marginal checks out.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return candidates[x].cmi < candidates[y].cmi; });
  for (std::size_t i : order) {
    const Candidate& c = candidates[i];
    const bool need_matrix = assemble || c.dC > 1;
    if (!need_matrix) {
      out.cmi = c.cmi;
      out.dC = 1;
      out.extension = c.build();
      out.marginal_error = 0.0;
      return out;
    }
    Matrix ext = c.build();
    const double err = marginal_error_of(ext, rho_ab, dAB, c.dC);
    if (err > kMarginalTol) {
      out.notes.push_back("candidate discarded: marginal error " + std::to_string(err));
      continue;
    }
    out.cmi = c.cmi;
    out.dC = c.dC;
    out.extension = std::move(ext);
    out.marginal_error = err;
    return out;
  }
  out.cmi = out.baseline_cmi;
  out.extension = rho_ab;
  out.dC = 1;
  return out;
}

EsqUpperBound to_bound(SearchResult&& s, int dA, int dB, std::uint64_t seed) {
  EsqUpperBound r;
  r.value = s.cmi / 2;
  r.baseline = s.baseline_cmi / 2;
  r.extension = DensityOperator::trusted(SpaceShape({dA, dB, s.dC}), std::move(s.extension));
  r.marginal_error = s.marginal_error;
  r.trace = std::move(s.trace);
  r.notes = std::move(s.notes);
  r.seed = seed;
  return r;
}

}  // namespace

namespace detail {

double esq_objective(const Matrix& psi, const Matrix& v, int dA, int dB, int dC, int r, Matrix* grad) {
  const Matrix y = columns_from_isometry(psi, v, dC, r);
  if (grad == nullptr) return cmi_of_columns(y, dA, dB, dC, nullptr);
  Matrix gy;
  const double value = cmi_of_columns(y, dA, dB, dC, &gy);
  const long dAB = psi.rows();
  Matrix g(v.rows(), v.cols());
  const Matrix psi_conj = psi.conjugate();
  for (int k = 0; k < r; ++k) {
    Matrix gk(dC, dAB);
    for (long ab = 0; ab < dAB; ++ab) {
      for (int c = 0; c < dC; ++c) gk(c, ab) = gy(ab * dC + c, k);
    }
    const Matrix ek = 2.0 * gk * psi_conj;
    for (int c = 0; c < dC; ++c) g.row(static_cast<long>(c) * r + k) = ek.row(c);
  }
  *grad = std::move(g);
  return value;
}

double esq_gradient_check(int dA, int dB, int dC, int r, std::uint64_t seed) {
  Rng rng(seed);
  const int dAB = dA * dB;
  const Matrix rho = random_density(SpaceShape({dA, dB}), dAB, derive_seed(seed, 1)).matrix();
  const HermitianEigen e = eig_hermitian(rho);
  Matrix psi(dAB, dAB);
  for (int i = 0; i < dAB; ++i) psi.col(i) = e.vectors.col(i) * std::sqrt(std::max(e.values(i), 0.0));
  const Matrix v = haar_isometry(dC * r, dAB, rng);
  Matrix grad;
  esq_objective(psi, v, dA, dB, dC, r, &grad);
  double worst = 0.0;
  const double h = 1e-6;
  for (int t = 0; t < 4; ++t) {
    const Matrix dir = ginibre(static_cast<int>(v.rows()), static_cast<int>(v.cols()), rng);
    const double fp = esq_objective(psi, v + h * dir, dA, dB, dC, r, nullptr);
    const double fm = esq_objective(psi, v - h * dir, dA, dB, dC, r, nullptr);
    const double fd = (fp - fm) / (2 * h);
    const double an = (grad.adjoint() * dir).trace().real();
    worst = std::max(worst, std::abs(fd - an));
  }
  return worst;
}

}  // namespace detail

EsqUpperBound esq_upper(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b,
                        const EsqOptions& opts) {
  check_parts(rho.shape(), a, b, "esq_upper");
  const int dA = rho.shape().total_of(a);
  const int dB = rho.shape().total_of(b);
  if (dA * dB > opts.max_ab_dim) {
    throw GuardExceeded("esq_upper: dA dB = " + std::to_string(dA * dB) + " exceeds " +
                        std::to_string(opts.max_ab_dim));
  }
  if (opts.ext_dim < 0) throw InvalidArgument("esq_upper: ext_dim must be >= 1");
  const Matrix rho_ab = reduce_ab(rho, a, b);
  return to_bound(search(rho_ab, dA, dB, opts, true), dA, dB, opts.seed);
}

EsqUpperBound esq_upper_through_channel(const DensityOperator& rho, const std::vector<int>& b0,
                                        const std::vector<int>& a, const KrausChannel& phi,
                                        const EsqOptions& opts) {
  check_parts(rho.shape(), b0, a, "esq_upper_through_channel");
  const int n = rho.shape().size();
  // Drop factors outside b0 and a, keeping the original relative order.
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (std::find(b0.begin(), b0.end(), i) != b0.end() || std::find(a.begin(), a.end(), i) != a.end()) {
      keep.push_back(i);
    }
  }
  const DensityOperator reduced = reduce_ordered(rho, keep);
  auto pos = [&](int i) { return static_cast<int>(std::find(keep.begin(), keep.end(), i) - keep.begin()); };
  std::vector<int> a_r;
  std::vector<int> b0_r;
  for (int i : a) a_r.push_back(pos(i));
  for (int i : b0) b0_r.push_back(pos(i));

  const DensityOperator omega = apply(phi, reduced, a_r);
  // Factor positions after apply: rest keeps order, outputs sit at min(a_r).
  std::vector<int> rest;
  for (int i = 0; i < reduced.shape().size(); ++i) {
    if (std::find(a_r.begin(), a_r.end(), i) == a_r.end()) rest.push_back(i);
  }
  const int first = *std::min_element(a_r.begin(), a_r.end());
  const int before = static_cast<int>(std::count_if(rest.begin(), rest.end(), [&](int r) { return r < first; }));
  const int no = phi.out_shape().size();
  std::vector<int> out_pos(static_cast<std::size_t>(no));
  std::iota(out_pos.begin(), out_pos.end(), before);
  std::vector<int> b0_pos;
  for (int i : b0_r) {
    const int ri = static_cast<int>(std::find(rest.begin(), rest.end(), i) - rest.begin());
    b0_pos.push_back(ri < before ? ri : ri + no);
  }

  if (!phi.is_flagged()) return esq_upper(omega, b0_pos, out_pos, opts);

  // Baseline over the whole output, flag included.
  const double baseline = mutual_information(omega, b0_pos, out_pos) / 2;

  // Order [B0..., quantum outputs..., flag].
  std::vector<int> order = b0_pos;
  order.insert(order.end(), out_pos.begin(), out_pos.end());
  const DensityOperator moved = reduce_ordered(omega, order);
  const int F = phi.flag_dim();
  const long dq = moved.dim() / F;
  const int nb = static_cast<int>(b0_pos.size());
  std::vector<int> qdims;
  for (int i : b0_pos) qdims.push_back(omega.shape().dim(i));
  for (int i = 0; i + 1 < no; ++i) qdims.push_back(omega.shape().dim(out_pos[static_cast<std::size_t>(i)]));
  std::vector<int> ab(static_cast<std::size_t>(nb));
  std::iota(ab.begin(), ab.end(), 0);
  std::vector<int> bq(qdims.size() - static_cast<std::size_t>(nb));
  std::iota(bq.begin(), bq.end(), nb);
  const int dA = moved.shape().total_of(ab);
  const int dBq = static_cast<int>(dq / dA);

  EsqUpperBound r;
  r.seed = opts.seed;
  r.baseline = baseline;
  std::vector<Matrix> sector_ext;
  std::vector<int> sector_dc;
  double total = 0.0;
  for (int s = 0; s < F; ++s) {
    Matrix block(dq, dq);
    for (long i = 0; i < dq; ++i) {
      for (long j = 0; j < dq; ++j) block(i, j) = moved.matrix()(i * F + s, j * F + s);
    }
    const double p = block.trace().real();
    r.sector_names.push_back(phi.sectors()[static_cast<std::size_t>(s)].label.name);
    r.sector_probs.push_back(p);
    if (p <= 1e-14) {
      r.sector_values.push_back(0.0);
      sector_ext.emplace_back();
      sector_dc.push_back(0);
      continue;
    }
    const DensityOperator cond = DensityOperator::trusted(SpaceShape(qdims), block / p);
    EsqOptions so = opts;
    so.seed = derive_seed(opts.seed, 1000 + static_cast<std::uint64_t>(s));
    so.seed_extensions.clear();
    if (dA * dBq > opts.max_ab_dim) {
      throw GuardExceeded("esq_upper_through_channel: sector dimension " + std::to_string(dA * dBq) +
                          " exceeds " + std::to_string(opts.max_ab_dim));
    }
    SearchResult sr = search(reduce_ab(cond, ab, bq), dA, dBq, so, true);
    r.sector_values.push_back(sr.cmi / 2);
    total += p * sr.cmi / 2;
    for (auto& t : sr.trace) t.kind = r.sector_names.back() + ":" + t.kind;
    r.trace.insert(r.trace.end(), sr.trace.begin(), sr.trace.end());
    sector_ext.push_back(p * sr.extension);
    sector_dc.push_back(sr.dC);
  }

  if (total >= baseline) {
    r.value = baseline;
    r.notes.push_back("flag-conditioned bound does not improve on the baseline; trivial extension used");
    r.extension = DensityOperator::trusted(SpaceShape({dA, dBq * F, 1}), moved.matrix());
    return r;
  }
  r.value = total;

  // Extension with a copied flag: [A, (Bq, Y), (C, Y')], sector C padded.
  const int dc = *std::max_element(sector_dc.begin(), sector_dc.end());
  const long dim = static_cast<long>(dA) * dBq * F * dc * F;
  if (dim > 1024) {
    r.notes.push_back("extension not assembled: dimension " + std::to_string(dim));
    return r;
  }
  Matrix ext = Matrix::Zero(dim, dim);
  const long stride_c = static_cast<long>(dc) * F;
  for (int s = 0; s < F; ++s) {
    const int dcs = sector_dc[static_cast<std::size_t>(s)];
    if (dcs == 0) continue;
    const Matrix& m = sector_ext[static_cast<std::size_t>(s)];
    const long n_ab = static_cast<long>(dA) * dBq;
    for (long i = 0; i < n_ab * dcs; ++i) {
      const long ai = i / dcs;
      const long ci = i % dcs;
      const long row = (ai * F + s) * stride_c + ci * F + s;
      for (long j = 0; j < n_ab * dcs; ++j) {
        const long aj = j / dcs;
        const long cj = j % dcs;
        ext(row, (aj * F + s) * stride_c + cj * F + s) = m(i, j);
      }
    }
  }
  const std::vector<int> dims = {dA * dBq * F, dc * F};
  r.marginal_error = max_abs(partial_trace(ext, dims, {0}) - moved.matrix());
  r.extension = DensityOperator::trusted(SpaceShape({dA, dBq * F, dc * F}), std::move(ext));
  return r;
}

DensityOperator transfer_extension(const DensityOperator& extension, const KrausChannel& lambda_b) {
  if (extension.shape().size() != 3) throw InvalidArgument("transfer_extension: expected shape [dA, dB, dC]");
  return apply(lambda_b, extension, {1});
}

std::vector<BoundReport> heralded_averaging_check(const std::vector<HeraldFactor>& factors,
                                                  const std::vector<AveragingInput>& inputs, const EsqOptions& opts,
                                                  double allowance) {
  if (factors.empty()) throw InvalidArgument("heralded_averaging_check: no factors");
  std::vector<KrausChannel> parts;
  int L = std::numeric_limits<int>::max();
  std::ostringstream label;
  for (const auto& f : factors) {
    const int n = static_cast<int>(f.phis.size());
    if (f.k < 1 || f.k > n) throw InvalidArgument("heralded_averaging_check: need 1 <= k <= n");
    L = std::min(L, n / f.k);
    parts.push_back(heralded_channel(f.phis, f.k));
  }
  const KrausChannel z = tensor_all(parts);
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = inputs[i];
    EsqOptions o = opts;
    o.seed = derive_seed(opts.seed, i);
    const EsqUpperBound e = esq_upper_through_channel(in.rho, in.b0, in.a, z, o);
    BoundReport r;
    r.id = "heralded-averaging";
    r.lhs = e.value;
    r.lhs_provenance = Provenance::estimate;
    const double sb = subsystem_entropy(in.rho, in.b0);
    r.rhs = sb / L;
    r.rhs_components = {{"S(B0)", sb}, {"L", static_cast<double>(L)}};
    r.inputs_fingerprint = fingerprint(in.rho);
    r.seed = o.seed;
    r.diagnostics = {{"baseline", e.baseline}, {"marginal_error", e.marginal_error}};
    r.notes.push_back("input " + in.name + " through " + z.name());
    settle(r, "esq_upper", allowance);
    out.push_back(std::move(r));
  }
  return out;
}

// ---- separable approximation -------------------------------------------------

namespace {

struct SepLayout {
  int dA, dB, r;
  long per_term() const { return 1 + 2L * dA * dA + 2L * dB * dB; }
  long size() const { return per_term() * r; }
};

Matrix unpack(const Eigen::VectorXd& x, long off, int d) {
  Matrix g(d, d);
  for (long i = 0; i < static_cast<long>(d) * d; ++i) g(i) = Complex(x(off + 2 * i), x(off + 2 * i + 1));
  return g;
}

void pack(Eigen::VectorXd& x, long off, const Matrix& g) {
  for (long i = 0; i < g.size(); ++i) {
    x(off + 2 * i) = g(i).real();
    x(off + 2 * i + 1) = g(i).imag();
  }
}

struct SepState {
  std::vector<double> q;
  std::vector<Matrix> ga, gb;  // raw factors
  std::vector<Matrix> alpha, beta;
  std::vector<double> ta, tb;
  double wsum = 0.0;
  Matrix sigma;
};

SepState decode(const Eigen::VectorXd& x, const SepLayout& L) {
  SepState s;
  const long pt = L.per_term();
  s.sigma = Matrix::Zero(L.dA * L.dB, L.dA * L.dB);
  for (int i = 0; i < L.r; ++i) s.wsum += x(i * pt) * x(i * pt);
  s.wsum = std::max(s.wsum, 1e-300);
  for (int i = 0; i < L.r; ++i) {
    const long off = i * pt;
    const Matrix ga = unpack(x, off + 1, L.dA);
    const Matrix gb = unpack(x, off + 1 + 2L * L.dA * L.dA, L.dB);
    const double ta = std::max(ga.squaredNorm(), 1e-300);
    const double tb = std::max(gb.squaredNorm(), 1e-300);
    s.q.push_back(x(off) * x(off) / s.wsum);
    s.alpha.push_back(ga * ga.adjoint() / ta);
    s.beta.push_back(gb * gb.adjoint() / tb);
    s.ga.push_back(ga);
    s.gb.push_back(gb);
    s.ta.push_back(ta);
    s.tb.push_back(tb);
    s.sigma += s.q.back() * kron(s.alpha.back(), s.beta.back());
  }
  return s;
}

/// Gradient of f given D = df/dsigma.
void chain(const Eigen::VectorXd& x, const SepLayout& L, const SepState& s, const Matrix& d, Eigen::VectorXd& g) {
  const long pt = L.per_term();
  g.resize(x.size());
  std::vector<double> c(static_cast<std::size_t>(L.r));
  double mean = 0.0;
  for (int i = 0; i < L.r; ++i) {
    c[static_cast<std::size_t>(i)] = (d * kron(s.alpha[static_cast<std::size_t>(i)], s.beta[static_cast<std::size_t>(i)])).trace().real();
    mean += s.q[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < L.r; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const long off = i * pt;
    g(off) = 2 * x(off) / s.wsum * (c[u] - mean);
    // D_alpha = q tr_B(D (I (x) beta)), D_beta = q tr_A(D (alpha (x) I)).
    Matrix da = Matrix::Zero(L.dA, L.dA);
    Matrix db = Matrix::Zero(L.dB, L.dB);
    for (int a = 0; a < L.dA; ++a) {
      for (int a2 = 0; a2 < L.dA; ++a2) {
        for (int b = 0; b < L.dB; ++b) {
          for (int b2 = 0; b2 < L.dB; ++b2) {
            const Complex dv = d(a * L.dB + b, a2 * L.dB + b2);
            da(a, a2) += dv * s.beta[u](b2, b);
            db(b, b2) += dv * s.alpha[u](a2, a);
          }
        }
      }
    }
    da *= s.q[u];
    db *= s.q[u];
    const double tra = (da * s.alpha[u]).trace().real();
    const double trb = (db * s.beta[u]).trace().real();
    const Matrix gga = (2.0 / s.ta[u]) * (da * s.ga[u] - tra * s.ga[u]);
    const Matrix ggb = (2.0 / s.tb[u]) * (db * s.gb[u] - trb * s.gb[u]);
    pack(g, off + 1, gga);
    pack(g, off + 1 + 2L * L.dA * L.dA, ggb);
  }
}

}  // namespace

DensityOperator assemble(const SeparableApprox& s) {
  if (s.alphas.empty()) throw InvalidArgument("assemble: empty decomposition");
  const int dA = s.alphas.front().dim();
  const int dB = s.betas.front().dim();
  Matrix m = Matrix::Zero(dA * dB, dA * dB);
  for (std::size_t i = 0; i < s.q.size(); ++i) m += s.q[i] * kron(s.alphas[i].matrix(), s.betas[i].matrix());
  return DensityOperator::trusted(SpaceShape({dA, dB}), m);
}

SeparableApprox separable_approx(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b,
                                 const SepOptions& opts) {
  check_parts(rho.shape(), a, b, "separable_approx");
  const int dA = rho.shape().total_of(a);
  const int dB = rho.shape().total_of(b);
  if (dA * dB > opts.max_ab_dim) {
    throw GuardExceeded("separable_approx: dA dB = " + std::to_string(dA * dB) + " exceeds " +
                        std::to_string(opts.max_ab_dim));
  }
  if (opts.terms < 0) throw InvalidArgument("separable_approx: cardinality must be >= 1");
  const Matrix target = reduce_ab(rho, a, b);
  const std::vector<int> dims = {dA, dB};
  SeparableApprox best;
  best.seed = opts.seed;
  {
    // Product of marginals.
    const Matrix ra = partial_trace(target, dims, {0});
    const Matrix rb = partial_trace(target, dims, {1});
    best.q = {1.0};
    best.alphas = {DensityOperator::trusted(SpaceShape({dA}), ra)};
    best.betas = {DensityOperator::trusted(SpaceShape({dB}), rb)};
    best.distance = trace_norm(kron(ra, rb) - target);
    best.restart_values.push_back(best.distance);
  }
  const int terms = opts.terms > 0 ? opts.terms : std::min(dA * dA * dB * dB, 64);
  const SepLayout L{dA, dB, terms};

  for (int rs = 0; rs < opts.restarts; ++rs) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(rs)));
    Eigen::VectorXd x(L.size());
    for (int i = 0; i < terms; ++i) {
      const long off = i * L.per_term();
      x(off) = 1.0;
      pack(x, off + 1, ginibre(dA, dA, rng));
      pack(x, off + 1 + 2L * dA * dA, ginibre(dB, dB, rng));
    }
    auto hs = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
      const SepState s = decode(v, L);
      const Matrix diff = s.sigma - target;
      chain(v, L, s, 2.0 * diff, g);
      return diff.squaredNorm();
    };
    x = detail::lbfgs_minimize(hs, x, opts.max_iters).x;
    double best_here = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x;
    auto record = [&](const Eigen::VectorXd& v) {
      const double t = trace_norm(decode(v, L).sigma - target);
      if (t < best_here) {
        best_here = t;
        best_x = v;
      }
    };
    record(x);
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      auto smooth = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        const SepState s = decode(v, L);
        const Matrix diff = s.sigma - target;
        Eigen::SelfAdjointEigenSolver<Matrix> es(diff);
        const RealVector ev = es.eigenvalues();
        RealVector dv(ev.size());
        double f = 0.0;
        for (long i = 0; i < ev.size(); ++i) {
          const double root = std::sqrt(ev(i) * ev(i) + eps * eps);
          f += root;
          dv(i) = ev(i) / root;
        }
        const Matrix d = es.eigenvectors() * dv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
        chain(v, L, s, d, g);
        return f;
      };
      x = detail::lbfgs_minimize(smooth, x, opts.max_iters / 2).x;
      record(x);
    }
    best.restart_values.push_back(best_here);
    if (best_here < best.distance) {
      const SepState s = decode(best_x, L);
      best.q = s.q;
      best.alphas.clear();
      best.betas.clear();
      for (int i = 0; i < terms; ++i) {
        best.alphas.push_back(DensityOperator::trusted(SpaceShape({dA}), s.alpha[static_cast<std::size_t>(i)]));
        best.betas.push_back(DensityOperator::trusted(SpaceShape({dB}), s.beta[static_cast<std::size_t>(i)]));
      }
      best.distance = trace_norm(assemble(best).matrix() - target);
    }
  }
  return best;
}

double ppt_witness_lower_bound(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b) {
  check_parts(rho.shape(), a, b, "ppt_witness_lower_bound");
  const int dA = rho.shape().total_of(a);
  const int dB = rho.shape().total_of(b);
  const Matrix m = reduce_ab(rho, a, b);
  const std::vector<int> dims = {dA, dB};
  const std::vector<int> which = {1};
  const HermitianEigen e = eig_hermitian(partial_transpose(m, dims, which));
  const long last = e.values.size() - 1;
  const double lmin = e.values(last);
  if (lmin >= 0.0) return 0.0;
  const Vector v = e.vectors.col(last);
  const Matrix w = partial_transpose(Matrix(v * v.adjoint()), dims, which);
  const RealVector wv = eigvals_hermitian(w);
  const double wnorm = std::max(std::abs(wv(0)), std::abs(wv(wv.size() - 1)));
  return -lmin / wnorm;
}

BoundReport faithfulness_consistency(const DensityOperator& rho, const std::vector<int>& a,
                                     const std::vector<int>& b, const EsqOptions& esq_opts,
                                     const SepOptions& sep_opts) {
  const EsqUpperBound e = esq_upper(rho, a, b, esq_opts);
  const SeparableApprox s = separable_approx(rho, a, b, sep_opts);
  const double lower = ppt_witness_lower_bound(rho, a, b);
  const int dA = rho.shape().total_of(a);
  BoundReport r;
  r.id = "faithfulness";
  r.lhs = s.distance;
  r.lhs_provenance = Provenance::estimate;
  r.rhs = 3.1 * dA * std::pow(std::max(e.value, 0.0), 0.25);
  r.rhs_components = {{"esq_upper", e.value}, {"dA", static_cast<double>(dA)}};
  r.diagnostics = {{"ppt_lower", lower}, {"esq_baseline", e.baseline}};
  r.inputs_fingerprint = fingerprint(rho);
  r.seed = esq_opts.seed;
  settle(r, "separable distance (optimization budget)");
  return r;
}

std::vector<MonogamyCase> default_monogamy_suite() {
  std::vector<MonogamyCase> suite;
  suite.push_back({"ghz3", ghz_state(3), {0.0, 0.0}, "pair marginals are classically correlated"});
  {
    const DensityOperator parts[] = {bell_state(), maximally_mixed(SpaceShape({2}))};
    suite.push_back({"bell+mixed", product_state(parts), {1.0, 0.0}, "Bell pair with an uncorrelated qubit"});
  }
  {
    const DensityOperator parts[] = {random_density(SpaceShape({2}), 2, 11), random_density(SpaceShape({2}), 2, 12),
                                     random_density(SpaceShape({2}), 2, 13)};
    suite.push_back({"product3", product_state(parts), {0.0, 0.0}, "product state"});
  }
  {
    Matrix m = Matrix::Zero(8, 8);
    m(0, 0) = 0.7;
    m(7, 7) = 0.3;
    suite.push_back({"classical-copy", DensityOperator(SpaceShape({2, 2, 2}), m), {0.0, 0.0},
                     "separable, diagonal in the product basis"});
  }
  return suite;
}

std::vector<BoundReport> monogamy_harness(const std::vector<MonogamyCase>& suite, const EsqOptions& opts,
                                          double reproduce_tol) {
  std::vector<BoundReport> out;
  for (const auto& c : suite) {
    const int k = c.rho.shape().size() - 1;
    if (k < 1 || static_cast<int>(c.analytic.size()) != k) {
      throw InvalidArgument("monogamy_harness: case " + c.name + " needs one analytic value per B_j");
    }
    BoundReport r;
    r.id = "monogamy";
    r.lhs = std::accumulate(c.analytic.begin(), c.analytic.end(), 0.0);
    r.lhs_provenance = Provenance::analytic;
    r.rhs = subsystem_entropy(c.rho, {0});
    r.inputs_fingerprint = fingerprint(c.rho);
    r.seed = opts.seed;
    double worst = 0.0;
    for (int j = 1; j <= k; ++j) {
      EsqOptions o = opts;
      o.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(j));
      const double v = esq_upper(c.rho, {0}, {j}, o).value;
      r.diagnostics.emplace_back("esq_upper_" + std::to_string(j), v);
      worst = std::max(worst, std::abs(v - c.analytic[static_cast<std::size_t>(j - 1)]));
    }
    r.diagnostics.emplace_back("max_deviation", worst);
    r.notes.push_back(c.name);
    settle(r, "analytic values");
    if (r.passed() && worst > reproduce_tol) {
      r.verdict = Verdict::inconclusive;
      std::ostringstream os;
      os << "esq_upper deviates from the analytic value by " << worst;
      r.reason = os.str();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace herald
