#include <doctest.h>

#include <vector>

#include "herald/channels.hpp"

using namespace herald;

TEST_CASE("constructors are trace preserving") {
  for (const auto& c : {identity_channel(3), depolarizing_channel(2, 0.3), depolarizing_channel(3, 0.7),
                        dephasing_channel(0.2), trivial_channel(2), erasure_channel(identity_channel(2), 0.4),
                        heralded_channel({identity_channel(2), depolarizing_channel(2, 0.1)}, 1)}) {
    CHECK(c.completeness_error() < 1e-10);
  }
}

TEST_CASE("depolarizing channel action") {
  const auto out = apply(depolarizing_channel(2, 0.4), basis_state(SpaceShape({2}), 0));
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.8));
  CHECK(out.matrix()(1, 1).real() == doctest::Approx(0.2));
}

TEST_CASE("erasure channel sectors carry lambda and 1 - lambda") {
  const KrausChannel z = erasure_channel(identity_channel(2), 0.3);
  REQUIRE(z.is_flagged());
  CHECK(z.flag_dim() == 2);
  const auto blocks = z.apply_sectors(basis_state(SpaceShape({2}), 1).matrix());
  CHECK(blocks[0].trace().real() == doctest::Approx(0.3));
  CHECK(blocks[1].trace().real() == doctest::Approx(0.7));
  CHECK_THROWS_AS(erasure_channel(identity_channel(2), 1.2), InvalidArgument);
}

TEST_CASE("heralded channel has one sector per k-subset") {
  const KrausChannel z = heralded_channel({identity_channel(2), identity_channel(2), identity_channel(2)}, 2);
  CHECK(z.flag_dim() == 3);
  CHECK(z.positions() == 3);
  CHECK(k_subsets(4, 2).size() == 6);
  CHECK(binomial(5, 2) == 10.0);
  CHECK_THROWS_AS(heralded_channel({identity_channel(2)}, 2), InvalidArgument);
}

TEST_CASE("tensor merges flag registers") {
  const KrausChannel a = erasure_channel(identity_channel(2), 0.5);
  const KrausChannel ab = tensor(a, a);
  CHECK(ab.flag_dim() == 4);
  CHECK(ab.quantum_out_dim() == 4);
  CHECK(ab.completeness_error() < 1e-10);
}

TEST_CASE("channel equality through Choi states") {
  CHECK(channels_equal(depolarizing_channel(2, 0.0), identity_channel(2)));
  CHECK(choi_distance(identity_channel(2), trivial_channel(2)) > 1.0);
  const auto mk = minimal_kraus(tensor(dephasing_channel(0.5), dephasing_channel(0.5)).kraus(), 4, 4);
  CHECK(mk.size() <= 16);
}

TEST_CASE("binomial weights") {
  const auto w = binomial_weights(3, 0.3);
  CHECK(w[0] == doctest::Approx(0.343));
  CHECK(w[1] == doctest::Approx(0.441));
  CHECK(w[2] == doctest::Approx(0.189));
  CHECK(w[3] == doctest::Approx(0.027));
}

TEST_CASE("erasure products equal the binomial mixture of heralded channels") {
  for (double lambda : {0.2, 0.7}) {
    const BoundReport r = binomial_mixture_check({identity_channel(2), depolarizing_channel(2, 0.3)}, lambda);
    CHECK(r.passed());
    CHECK(r.lhs <= 1e-10);
  }
}

TEST_CASE("output dimension guard") {
  CHECK_THROWS_AS(tensor_power(identity_channel(4), 7), GuardExceeded);
  CHECK_THROWS_AS(tensor(identity_channel(64), identity_channel(128)), GuardExceeded);
}
