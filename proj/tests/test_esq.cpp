#include <doctest.h>

#include "herald/entropy.hpp"
#include "herald/esq.hpp"

using namespace herald;

namespace {
EsqOptions quick() {
  EsqOptions o;
  o.restarts = 2;
  o.max_iters = 100;
  return o;
}
}  // namespace

TEST_CASE("analytic gradient matches finite differences") {
  CHECK(detail::esq_gradient_check(2, 2, 4, 1, 3) < 1e-6);
  CHECK(detail::esq_gradient_check(2, 3, 3, 2, 4) < 1e-6);
}

TEST_CASE("Bell state sits at the baseline") {
  const auto u = esq_upper(bell_state(), {0}, {1}, quick());
  CHECK(u.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(u.at_baseline());
}

TEST_CASE("upper bound never exceeds half the mutual information") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto rho = random_density(SpaceShape({2, 2}), 2, 50 + s);
    const auto u = esq_upper(rho, {0}, {1}, quick());
    CHECK(u.value <= 0.5 * mutual_information(rho, {0}, {1}) + 1e-9);
    CHECK(u.marginal_error <= 1e-8);
  }
}

TEST_CASE("Werner states improve on the baseline") {
  const auto u = esq_upper(werner_state(0.5), {0}, {1}, quick());
  CHECK(u.baseline == doctest::Approx(0.22560252965230065).epsilon(1e-9));
  CHECK(u.value < u.baseline);
}

TEST_CASE("classically correlated states reach zero") {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 0.6;
  m(3, 3) = 0.4;
  const DensityOperator rho(SpaceShape({2, 2}), m);
  CHECK(esq_upper(rho, {0}, {1}, quick()).value <= 1e-4);
}

TEST_CASE("options are validated") {
  EsqOptions o = quick();
  o.ext_dim = -1;
  CHECK_THROWS_AS(esq_upper(bell_state(), {0}, {1}, o), InvalidArgument);
  CHECK_THROWS_AS(esq_upper(random_density(SpaceShape({7, 7}), 1, 1), {0}, {1}, quick()), GuardExceeded);
}

TEST_CASE("through a heralded channel the bound averages over sectors") {
  const DensityOperator rho = tensor(bell_state(), basis_state(SpaceShape({2}), 0));
  const KrausChannel z = heralded_channel({identity_channel(2), identity_channel(2)}, 1);
  const auto u = esq_upper_through_channel(rho, {0}, {1, 2}, z, quick());
  CHECK(u.value <= 0.5 + 1e-4);
  CHECK(u.value == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(u.sector_names.size() == 2);
}

TEST_CASE("separable approximation is sandwiched by the PPT witness") {
  SepOptions so;
  so.restarts = 2;
  so.max_iters = 200;
  const auto s = separable_approx(bell_state(), {0}, {1}, so);
  const double ppt = ppt_witness_lower_bound(bell_state(), {0}, {1});
  CHECK(ppt == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.distance >= ppt - 1e-9);
  CHECK(s.distance <= 1.0 + 1e-3);
  const auto sigma = assemble(s);
  CHECK(max_abs(sigma.matrix() - sigma.matrix().adjoint()) < 1e-12);
}

TEST_CASE("monogamy suite reproduces analytic values") {
  for (const auto& r : monogamy_harness(default_monogamy_suite(), quick())) CHECK(r.passed());
}
