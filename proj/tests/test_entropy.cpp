#include <doctest.h>

#include <cmath>

#include "herald/entropy.hpp"

using namespace herald;

TEST_CASE("entropies of named states") {
  const auto bell = bell_state();
  CHECK(von_neumann_entropy(bell) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(subsystem_entropy(bell, {0}) == doctest::Approx(1.0));
  CHECK(conditional_entropy(bell, {0}, {1}) == doctest::Approx(-1.0));
  CHECK(mutual_information(bell, {0}, {1}) == doctest::Approx(2.0));
  CHECK(von_neumann_entropy(maximally_mixed(SpaceShape({3}))) == doctest::Approx(std::log2(3.0)));
  CHECK(conditional_mutual_information(ghz_state(3), {0}, {1}, {2}) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.11) == doctest::Approx(binary_entropy(0.89)));
}

TEST_CASE("Werner mutual information matches the reference") {
  CHECK(mutual_information(werner_state(0.5), {0}, {1}) / 2 == doctest::Approx(0.22560252965230065).epsilon(1e-10));
}

TEST_CASE("strong subadditivity on random tripartite states") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto rho = random_density(SpaceShape({2, 2, 2}), 1 + static_cast<int>(s % 8), s);
    CHECK(conditional_mutual_information(rho, {0}, {1}, {2}) >= -1e-9);
  }
}

TEST_CASE("continuity bounds hold and refined is tighter") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = random_density(SpaceShape({2, 2}), 2, 1000 + s);
    const auto b = random_density(SpaceShape({2, 2}), 2, 2000 + s);
    const double delta = 0.5 * trace_norm(a.matrix() - b.matrix());
    const double diff = std::abs(conditional_entropy(a, {0}, {1}) - conditional_entropy(b, {0}, {1}));
    const double refined = alicki_fannes_bound(delta, 2, AfVariant::refined);
    CHECK(diff <= refined + 1e-9);
    CHECK(refined <= alicki_fannes_bound(delta, 2, AfVariant::weak) + 1e-12);
  }
}

TEST_CASE("entropy reports") {
  const auto r = evaluate_entropy(bell_state(), EntropyQuantity::mutual, {0}, {1});
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.state_fingerprint == fingerprint(bell_state()));
  CHECK_THROWS_AS(evaluate_entropy(bell_state(), EntropyQuantity::mutual, {0}, {0}), InvalidArgument);
}
