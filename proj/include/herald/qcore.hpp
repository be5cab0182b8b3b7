#pragma once

// Dense complex linear algebra over tensor-factored spaces: shapes, states,
// partial traces, Hermitian spectra, norms and seeded sampling.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace herald {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input to an operation: malformed shapes, out-of-range parameters,
/// invalid states.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A desk-scale dimension guard was exceeded.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// Ordered list of subsystem dimensions with optional unique labels.
class SpaceShape {
 public:
  SpaceShape() = default;
  explicit SpaceShape(std::vector<int> dims, std::vector<std::string> labels = {});

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int size() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  int total() const;
  bool labeled() const { return !labels_.empty(); }

  /// Factor lists concatenated; throws on label collision.
  SpaceShape concat(const SpaceShape& other) const;
  /// Sub-shape of the given factor indices, in the given order.
  SpaceShape select(std::span<const int> indices) const;
  /// Same dimensions with labels dropped.
  SpaceShape unlabeled() const { return SpaceShape(dims_); }
  /// Product of dims over the given factors.
  int total_of(std::span<const int> indices) const;

  bool operator==(const SpaceShape& other) const = default;
  std::string to_string() const;

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
};

/// Positive unit-trace operator on a SpaceShape. Construction symmetrizes the
/// matrix and validates Hermiticity, trace and positivity.
class DensityOperator {
 public:
  DensityOperator(SpaceShape shape, Matrix matrix);

  /// Skips the spectral positivity check; the caller guarantees validity
  /// (outputs of CPTP maps, reduced states). Still symmetrizes.
  static DensityOperator trusted(SpaceShape shape, Matrix matrix);

  const SpaceShape& shape() const { return shape_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  struct TrustedTag {};
  DensityOperator(SpaceShape shape, Matrix matrix, TrustedTag);

  SpaceShape shape_;
  Matrix matrix_;
};

class PureState {
 public:
  PureState(SpaceShape shape, Vector vector);
  const SpaceShape& shape() const { return shape_; }
  const Vector& vector() const { return vector_; }
  DensityOperator density() const;

 private:
  SpaceShape shape_;
  Vector vector_;
};

struct HermitianEigen {
  RealVector values;  // descending
  Matrix vectors;     // columns match values
};

// ---- matrix-level kernels -------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);
double max_abs(const Matrix& m);
double hermiticity_error(const Matrix& m);

/// Reduced matrix on the factors in `keep` (sorted ascending, order preserved).
Matrix partial_trace(const Matrix& m, std::span<const int> dims, std::vector<int> keep);

/// Reorders tensor factors: output factor i is input factor perm[i].
Matrix permute_factors(const Matrix& m, std::span<const int> dims, std::span<const int> perm);
Vector permute_factors(const Vector& v, std::span<const int> dims, std::span<const int> perm);

/// Partial transpose of the factors listed in `which`.
Matrix partial_transpose(const Matrix& m, std::span<const int> dims, std::span<const int> which);

HermitianEigen eig_hermitian(const Matrix& m);
/// Eigenvalues only, descending. Input must be Hermitian within kHermitianTol.
RealVector eigvals_hermitian(const Matrix& m);
double trace_norm(const Matrix& m);

/// Functional calculus on a Hermitian matrix.
template <class F>
Matrix hermitian_function(const Matrix& m, F&& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector mapped = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * mapped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// ---- state-level operations ------------------------------------------------

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep);
/// Reduced state on `keep`, with factors arranged in the order given.
DensityOperator reduce_ordered(const DensityOperator& rho, std::span<const int> keep);

DensityOperator maximally_mixed(const SpaceShape& shape);
DensityOperator basis_state(const SpaceShape& shape, int index);
DensityOperator pure_density(const SpaceShape& shape, const Vector& v);
DensityOperator bell_state();
DensityOperator ghz_state(int parties);
/// p |psi-><psi-| + (1 - p) I/4 on two qubits.
DensityOperator werner_state(double p);
DensityOperator product_state(std::span<const DensityOperator> parts);

// ---- sampling ----------------------------------------------------------------

using Rng = std::mt19937_64;

/// Decorrelated stream seed derived from (seed, stream) via splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
Matrix ginibre(int rows, int cols, Rng& rng);
Vector random_unit_vector(int dim, Rng& rng);
/// Haar-distributed isometry (rows >= cols).
Matrix haar_isometry(int rows, int cols, Rng& rng);
Matrix random_hermitian(int dim, Rng& rng);

/// G G^dag / tr(G G^dag) with G a dim x rank Ginibre factor.
DensityOperator random_density(const SpaceShape& shape, int rank, std::uint64_t seed);

// ---- fingerprints ------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL);
std::string hex64(std::uint64_t v);
std::string fingerprint(const DensityOperator& rho);

}  // namespace herald
