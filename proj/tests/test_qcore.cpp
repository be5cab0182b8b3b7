#include <doctest.h>

#include <vector>

#include "herald/qcore.hpp"

using namespace herald;

TEST_CASE("shape totals and selection") {
  const SpaceShape s({2, 3, 4}, {"A", "B", "C"});
  CHECK(s.total() == 24);
  const std::vector<int> idx{2, 0};
  CHECK(s.select(idx).dims() == std::vector<int>{4, 2});
  CHECK_THROWS_AS(s.concat(SpaceShape({2}, {"A"})), InvalidArgument);
}

TEST_CASE("density operator validation") {
  Matrix m = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator(SpaceShape({2}), m), InvalidArgument);  // trace 2
  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityOperator(SpaceShape({2}), neg), InvalidArgument);
  CHECK_THROWS_AS(DensityOperator(SpaceShape({3}), Matrix::Identity(2, 2) / 2.0), InvalidArgument);
  CHECK_NOTHROW(DensityOperator(SpaceShape({2}), Matrix::Identity(2, 2) / 2.0));
}

TEST_CASE("partial trace of a product recovers the factors") {
  const DensityOperator a = random_density(SpaceShape({2}), 2, 1);
  const DensityOperator b = random_density(SpaceShape({3}), 2, 2);
  const DensityOperator ab = tensor(a, b);
  CHECK(max_abs(partial_trace(ab, {0}).matrix() - a.matrix()) < 1e-12);
  CHECK(max_abs(partial_trace(ab, {1}).matrix() - b.matrix()) < 1e-12);
}

TEST_CASE("permute_factors swaps a product") {
  const DensityOperator a = random_density(SpaceShape({2}), 1, 3);
  const DensityOperator b = random_density(SpaceShape({3}), 1, 4);
  const std::vector<int> dims{2, 3};
  const std::vector<int> perm{1, 0};
  const Matrix swapped = permute_factors(tensor(a, b).matrix(), dims, perm);
  CHECK(max_abs(swapped - tensor(b, a).matrix()) < 1e-12);
}

TEST_CASE("partial transpose of the Bell state has a negative eigenvalue") {
  const std::vector<int> dims{2, 2};
  const std::vector<int> which{1};
  const RealVector ev = eigvals_hermitian(partial_transpose(bell_state().matrix(), dims, which));
  CHECK(ev.minCoeff() == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("named states") {
  CHECK(ghz_state(3).dim() == 8);
  CHECK(werner_state(1.0).matrix().trace().real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(werner_state(1.5), InvalidArgument);
  CHECK(trace_norm(bell_state().matrix() - maximally_mixed(SpaceShape({2, 2})).matrix()) ==
        doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("seeds and fingerprints are deterministic") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  const auto r1 = random_density(SpaceShape({2, 2}), 4, 9);
  const auto r2 = random_density(SpaceShape({2, 2}), 4, 9);
  CHECK(fingerprint(r1) == fingerprint(r2));
  CHECK(fingerprint(r1) != fingerprint(random_density(SpaceShape({2, 2}), 4, 10)));
}

TEST_CASE("haar isometry is an isometry") {
  Rng rng(5);
  const Matrix v = haar_isometry(6, 3, rng);
  CHECK(max_abs(v.adjoint() * v - Matrix::Identity(3, 3)) < 1e-12);
}
