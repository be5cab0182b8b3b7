#include <doctest.h>

#include "herald/entropy.hpp"
#include "herald/holevo.hpp"

using namespace herald;

namespace {
HolevoOptions quick() {
  HolevoOptions o;
  o.restarts = 4;
  o.max_iters = 200;
  return o;
}
}  // namespace

TEST_CASE("identity and constant channels") {
  CHECK(estimate_chi(identity_channel(2), quick()).value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(estimate_chi(trivial_channel(2), quick()).value <= 1e-6);
}

TEST_CASE("depolarizing regression") {
  CHECK(estimate_chi(depolarizing_channel(2, 0.4), quick()).value == doctest::Approx(0.2780719051126377).epsilon(1e-3));
}

TEST_CASE("erasure of the identity gives lambda") {
  const auto e = estimate_chi(erasure_channel(identity_channel(2), 0.25), quick());
  CHECK(e.flagged_path);
  CHECK(e.value == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("flagged and naive paths agree") {
  const KrausChannel z = heralded_channel({identity_channel(2), identity_channel(2)}, 1);
  const double a = maximize_holevo_flagged(z, quick()).value;
  const double b = maximize_holevo(z, quick()).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
  CHECK_THROWS_AS(maximize_holevo_flagged(identity_channel(2), quick()), InvalidArgument);
}

TEST_CASE("estimates are certified by their ensembles") {
  const KrausChannel c = depolarizing_channel(2, 0.2);
  const HolevoEstimate e = estimate_chi(c, quick());
  CHECK(holevo_of_pure_ensemble(c, e.ensemble) == doctest::Approx(e.value).epsilon(1e-12));
  CHECK(e.restarts_used() >= 4);
}

TEST_CASE("fixed seeds reproduce") {
  HolevoOptions o = quick();
  o.seed = 42;
  CHECK(estimate_chi(depolarizing_channel(2, 0.3), o).value == estimate_chi(depolarizing_channel(2, 0.3), o).value);
}

TEST_CASE("chi_pot modes") {
  ChiPotSpec declared{ChiPotMode::declared, 0.7, {}};
  const auto d = chi_pot(identity_channel(2), declared, quick());
  CHECK(d.value == 0.7);
  CHECK(d.tag == ChiPotTag::exact);
  const auto s = chi_pot(identity_channel(2), ChiPotSpec{}, quick());
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(s.tag == ChiPotTag::exact_by_declaration);
}

TEST_CASE("heralded interpolation steps are bounded by chi_pot") {
  const PureEnsemble ens = random_pure_ensemble(4, 4, 3);
  for (const auto& r : lemma52_check(identity_channel(2), 2, ens, 1.0)) CHECK(r.passed());
}

TEST_CASE("regularization probe for the identity is additive") {
  const auto p = regularization_probe(identity_channel(2), 2, quick());
  CHECK(p.gap == doctest::Approx(0.0).epsilon(1e-4));
}
