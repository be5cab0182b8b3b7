#include "herald/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace herald {

namespace {

std::vector<long> strides_of(std::span<const int> dims) {
  std::vector<long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i) + 1] * dims[static_cast<std::size_t>(i) + 1];
  }
  return s;
}

long product(std::span<const int> dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

// Flat offsets, in the full space, of every multi-index over `factors`.
std::vector<long> offsets_over(std::span<const int> dims, std::span<const long> strides,
                               std::span<const int> factors) {
  long count = 1;
  for (int f : factors) count *= dims[static_cast<std::size_t>(f)];
  std::vector<long> out(static_cast<std::size_t>(count), 0);
  for (long idx = 0; idx < count; ++idx) {
    long rem = idx;
    long off = 0;
    for (int k = static_cast<int>(factors.size()) - 1; k >= 0; --k) {
      int f = factors[static_cast<std::size_t>(k)];
      int d = dims[static_cast<std::size_t>(f)];
      off += (rem % d) * strides[static_cast<std::size_t>(f)];
      rem /= d;
    }
    out[static_cast<std::size_t>(idx)] = off;
  }
  return out;
}

void check_factor_indices(int nfactors, std::span<const int> idx, const char* what) {
  std::set<int> seen;
  for (int i : idx) {
    if (i < 0 || i >= nfactors) {
      throw InvalidArgument(std::string(what) + ": subsystem index " + std::to_string(i) +
                            " out of range");
    }
    if (!seen.insert(i).second) {
      throw InvalidArgument(std::string(what) + ": repeated subsystem index " + std::to_string(i));
    }
  }
}

}  // namespace

// ---- SpaceShape -------------------------------------------------------------

SpaceShape::SpaceShape(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  for (int d : dims_) {
    if (d < 1) throw InvalidArgument("SpaceShape: factor dimension must be >= 1");
  }
  if (!labels_.empty()) {
    if (labels_.size() != dims_.size()) {
      throw InvalidArgument("SpaceShape: labels must match factors one-to-one");
    }
    std::set<std::string> uniq(labels_.begin(), labels_.end());
    if (uniq.size() != labels_.size()) throw InvalidArgument("SpaceShape: duplicate label");
  }
}

int SpaceShape::total() const { return static_cast<int>(product(dims_)); }

int SpaceShape::total_of(std::span<const int> indices) const {
  long p = 1;
  for (int i : indices) p *= dim(i);
  return static_cast<int>(p);
}

SpaceShape SpaceShape::concat(const SpaceShape& other) const {
  std::vector<int> dims = dims_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  if (!labeled() && !other.labeled()) return SpaceShape(std::move(dims));
  if (labeled() != other.labeled()) {
    // Mixed labeling: fall back to positional labels for the unlabeled side.
    std::vector<std::string> labels;
    for (int i = 0; i < size(); ++i) labels.push_back(labeled() ? labels_[static_cast<std::size_t>(i)] : "s" + std::to_string(i));
    for (int i = 0; i < other.size(); ++i) {
      labels.push_back(other.labeled() ? other.labels_[static_cast<std::size_t>(i)]
                                       : "s" + std::to_string(size() + i));
    }
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (uniq.size() != labels.size()) throw InvalidArgument("tensor: label collision");
    return SpaceShape(std::move(dims), std::move(labels));
  }
  std::vector<std::string> labels = labels_;
  for (const auto& l : other.labels_) {
    if (std::find(labels_.begin(), labels_.end(), l) != labels_.end()) {
      throw InvalidArgument("tensor: label collision on '" + l + "'");
    }
    labels.push_back(l);
  }
  return SpaceShape(std::move(dims), std::move(labels));
}

SpaceShape SpaceShape::select(std::span<const int> indices) const {
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int i : indices) {
    dims.push_back(dim(i));
    if (labeled()) labels.push_back(labels_.at(static_cast<std::size_t>(i)));
  }
  return SpaceShape(std::move(dims), std::move(labels));
}

std::string SpaceShape::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << ',';
    if (labeled()) os << labels_[i] << ':';
    os << dims_[i];
  }
  os << ']';
  return os.str();
}

// ---- DensityOperator --------------------------------------------------------

DensityOperator::DensityOperator(SpaceShape shape, Matrix matrix, TrustedTag)
    : shape_(std::move(shape)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != shape_.total()) {
    throw InvalidArgument("DensityOperator: matrix side " + std::to_string(matrix_.rows()) +
                          " does not match shape " + shape_.to_string());
  }
  Matrix sym = (matrix_ + matrix_.adjoint()) * 0.5;
  matrix_ = std::move(sym);
}

DensityOperator::DensityOperator(SpaceShape shape, Matrix matrix)
    : shape_(std::move(shape)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != shape_.total()) {
    throw InvalidArgument("DensityOperator: matrix side " + std::to_string(matrix_.rows()) +
                          " does not match shape " + shape_.to_string());
  }
  if (hermiticity_error(matrix_) > kHermitianTol) {
    throw InvalidArgument("DensityOperator: matrix is not Hermitian");
  }
  Matrix sym = (matrix_ + matrix_.adjoint()) * 0.5;
  matrix_ = std::move(sym);
  if (std::abs(matrix_.trace() - Complex(1.0)) > kTraceTol) {
    throw InvalidArgument("DensityOperator: trace is not 1");
  }
  RealVector ev = eigvals_hermitian(matrix_);
  if (ev.size() > 0 && ev(ev.size() - 1) < -kPositivityTol) {
    throw InvalidArgument("DensityOperator: matrix is not positive semidefinite");
  }
}

DensityOperator DensityOperator::trusted(SpaceShape shape, Matrix matrix) {
  return DensityOperator(std::move(shape), std::move(matrix), TrustedTag{});
}

PureState::PureState(SpaceShape shape, Vector vector) : shape_(std::move(shape)), vector_(std::move(vector)) {
  if (vector_.size() != shape_.total()) throw InvalidArgument("PureState: vector length mismatch");
  if (std::abs(vector_.norm() - 1.0) > 1e-12) throw InvalidArgument("PureState: vector is not unit norm");
}

DensityOperator PureState::density() const {
  return DensityOperator::trusted(shape_, vector_ * vector_.adjoint());
}

// ---- matrix kernels ---------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Matrix kron_all(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_error(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

Matrix partial_trace(const Matrix& m, std::span<const int> dims, std::vector<int> keep) {
  const int n = static_cast<int>(dims.size());
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  check_factor_indices(n, keep, "partial_trace");
  if (m.rows() != product(dims) || m.cols() != m.rows()) {
    throw InvalidArgument("partial_trace: matrix does not match dims");
  }
  std::sort(keep.begin(), keep.end());
  std::vector<int> traced;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);
  }
  auto strides = strides_of(dims);
  auto kept_off = offsets_over(dims, strides, keep);
  auto traced_off = offsets_over(dims, strides, traced);
  const long dk = static_cast<long>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (long r = 0; r < dk; ++r) {
    for (long c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (long t : traced_off) acc += m(kept_off[static_cast<std::size_t>(r)] + t, kept_off[static_cast<std::size_t>(c)] + t);
      out(r, c) = acc;
    }
  }
  return out;
}

namespace {
std::vector<long> permutation_map(std::span<const int> dims, std::span<const int> perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n) throw InvalidArgument("permute_factors: bad permutation length");
  check_factor_indices(n, perm, "permute_factors");
  auto strides = strides_of(dims);
  std::vector<long> old_strides_in_new_order;
  for (int p : perm) old_strides_in_new_order.push_back(strides[static_cast<std::size_t>(p)]);
  std::vector<int> new_dims;
  for (int p : perm) new_dims.push_back(dims[static_cast<std::size_t>(p)]);
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return offsets_over(new_dims, old_strides_in_new_order, all);
}
}  // namespace

Matrix permute_factors(const Matrix& m, std::span<const int> dims, std::span<const int> perm) {
  auto map = permutation_map(dims, perm);
  const long d = static_cast<long>(map.size());
  if (m.rows() != d || m.cols() != d) throw InvalidArgument("permute_factors: matrix does not match dims");
  Matrix out(d, d);
  for (long c = 0; c < d; ++c) {
    for (long r = 0; r < d; ++r) out(r, c) = m(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]);
  }
  return out;
}

Vector permute_factors(const Vector& v, std::span<const int> dims, std::span<const int> perm) {
  auto map = permutation_map(dims, perm);
  const long d = static_cast<long>(map.size());
  if (v.size() != d) throw InvalidArgument("permute_factors: vector does not match dims");
  Vector out(d);
  for (long r = 0; r < d; ++r) out(r) = v(map[static_cast<std::size_t>(r)]);
  return out;
}

Matrix partial_transpose(const Matrix& m, std::span<const int> dims, std::span<const int> which) {
  const int n = static_cast<int>(dims.size());
  check_factor_indices(n, which, "partial_transpose");
  auto strides = strides_of(dims);
  const long d = product(dims);
  if (m.rows() != d || m.cols() != d) throw InvalidArgument("partial_transpose: matrix does not match dims");
  Matrix out(d, d);
  for (long r = 0; r < d; ++r) {
    for (long c = 0; c < d; ++c) {
      long r2 = r;
      long c2 = c;
      for (int f : which) {
        long s = strides[static_cast<std::size_t>(f)];
        long dr = (r / s) % dims[static_cast<std::size_t>(f)];
        long dc = (c / s) % dims[static_cast<std::size_t>(f)];
        r2 += (dc - dr) * s;
        c2 += (dr - dc) * s;
      }
      out(r2, c2) = m(r, c);
    }
  }
  return out;
}

HermitianEigen eig_hermitian(const Matrix& m) {
  if (hermiticity_error(m) > kHermitianTol) throw InvalidArgument("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const long n = m.rows();
  HermitianEigen out{RealVector(n), Matrix(n, n)};
  for (long i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

RealVector eigvals_hermitian(const Matrix& m) {
  if (m.rows() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("trace_norm: matrix is not square");
  if (m.rows() == 0) return 0.0;
  if (hermiticity_error(m) <= kHermitianTol) {
    Matrix sym = (m + m.adjoint()) * 0.5;
    return eigvals_hermitian(sym).cwiseAbs().sum();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

// ---- states -----------------------------------------------------------------

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  SpaceShape shape = a.shape().concat(b.shape());
  return DensityOperator::trusted(std::move(shape), kron(a.matrix(), b.matrix()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  check_factor_indices(rho.shape().size(), keep, "partial_trace");
  std::sort(keep.begin(), keep.end());
  Matrix reduced = partial_trace(rho.matrix(), rho.shape().dims(), keep);
  return DensityOperator::trusted(rho.shape().select(keep), std::move(reduced));
}

DensityOperator reduce_ordered(const DensityOperator& rho, std::span<const int> keep) {
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  DensityOperator reduced = partial_trace(rho, sorted);
  std::vector<int> perm;
  for (int k : keep) {
    perm.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), k) - sorted.begin()));
  }
  bool identity = std::is_sorted(keep.begin(), keep.end());
  if (identity) return reduced;
  Matrix m = permute_factors(reduced.matrix(), reduced.shape().dims(), perm);
  return DensityOperator::trusted(reduced.shape().select(perm), std::move(m));
}

DensityOperator maximally_mixed(const SpaceShape& shape) {
  const int d = shape.total();
  return DensityOperator::trusted(shape, Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityOperator basis_state(const SpaceShape& shape, int index) {
  const int d = shape.total();
  if (index < 0 || index >= d) throw InvalidArgument("basis_state: index out of range");
  Matrix m = Matrix::Zero(d, d);
  m(index, index) = 1.0;
  return DensityOperator::trusted(shape, std::move(m));
}

DensityOperator pure_density(const SpaceShape& shape, const Vector& v) {
  if (v.size() != shape.total()) throw InvalidArgument("pure_density: vector length mismatch");
  const double n = v.norm();
  if (n == 0.0) throw InvalidArgument("pure_density: zero vector");
  Vector u = v / n;
  return DensityOperator::trusted(shape, u * u.adjoint());
}

DensityOperator bell_state() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return pure_density(SpaceShape({2, 2}), v);
}

DensityOperator ghz_state(int parties) {
  if (parties < 2) throw InvalidArgument("ghz_state: need at least two parties");
  const int d = 1 << parties;
  Vector v = Vector::Zero(d);
  v(0) = v(d - 1) = 1.0 / std::sqrt(2.0);
  return pure_density(SpaceShape(std::vector<int>(static_cast<std::size_t>(parties), 2)), v);
}

DensityOperator werner_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("werner_state: p outside [0,1]");
  Vector singlet = Vector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  Matrix m = p * singlet * singlet.adjoint() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
  return DensityOperator::trusted(SpaceShape({2, 2}), std::move(m));
}

DensityOperator product_state(std::span<const DensityOperator> parts) {
  if (parts.empty()) throw InvalidArgument("product_state: no parts");
  DensityOperator out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = tensor(out, parts[i]);
  return out;
}

// ---- sampling ----------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      double re = normal(rng);
      double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

Vector random_unit_vector(int dim, Rng& rng) {
  Vector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

Matrix haar_isometry(int rows, int cols, Rng& rng) {
  if (rows < cols) throw InvalidArgument("haar_isometry: rows < cols");
  Matrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  for (int i = 0; i < cols; ++i) {
    Complex d = qr.matrixQR()(i, i);
    double a = std::abs(d);
    if (a > 0) q.col(i) *= d / a;
  }
  return q;
}

Matrix random_hermitian(int dim, Rng& rng) {
  Matrix g = ginibre(dim, dim, rng);
  return (g + g.adjoint()) * 0.5;
}

DensityOperator random_density(const SpaceShape& shape, int rank, std::uint64_t seed) {
  const int d = shape.total();
  if (rank < 1 || rank > d) throw InvalidArgument("random_density: rank out of range");
  Rng rng(seed);
  Matrix g = ginibre(d, rank, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator::trusted(shape, std::move(m));
}

// ---- fingerprints ------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string fingerprint(const DensityOperator& rho) {
  std::uint64_t h = fnv1a64(rho.shape().to_string());
  const auto* data = reinterpret_cast<const char*>(rho.matrix().data());
  h = fnv1a64(std::string_view(data, static_cast<std::size_t>(rho.matrix().size()) * sizeof(Complex)), h);
  return hex64(h);
}

}  // namespace herald
