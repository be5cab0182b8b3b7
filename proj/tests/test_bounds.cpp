#include <doctest.h>

#include <cmath>

#include "herald/bounds.hpp"

using namespace herald;

namespace {
BoundsOptions quick() {
  BoundsOptions o;
  o.holevo.restarts = 2;
  o.holevo.max_iters = 100;
  return o;
}
}  // namespace

TEST_CASE("correction terms match reference values") {
  const auto c = correction_term(1e-6, 2);
  CHECK(c.admissible);
  CHECK(c.value == doctest::Approx(2.09809965546094).epsilon(1e-12));
  CHECK(c.hypothesis_value == doctest::Approx(0.196061214930440).epsilon(1e-12));
  CHECK(additivity_correction(1e-6, 2, 3).value == doctest::Approx(6.29429896638281).epsilon(1e-12));
  CHECK(combined_correction(1e-6, 2, 2).value == doctest::Approx(5.11793167680018).epsilon(1e-12));
  CHECK(erasure_correction(0.01, 2).value == doctest::Approx(4.03374709209706).epsilon(1e-12));
  CHECK(erasure_correction(0.001, 3).value == doctest::Approx(8.45428305411377).epsilon(1e-12));
  CHECK(entropy_correction(1e-4, 1.0, 2) == doctest::Approx(2.28758912522047).epsilon(1e-12));
  CHECK(entropy_correction(0.5, 0.0, 2) == 0.0);
}

TEST_CASE("failed hypothesis gives an infinite correction") {
  const auto c = correction_term(0.5, 2);
  CHECK_FALSE(c.admissible);
  CHECK(std::isinf(c.value));
  CHECK(c.hypothesis_value == doctest::Approx(5.21355777457303).epsilon(1e-12));
  CHECK_THROWS_AS(correction_term(0.0, 2), InvalidArgument);
  CHECK_THROWS_AS(correction_term(0.1, 1), InvalidArgument);
}

TEST_CASE("erasure bound verdict follows the hypothesis") {
  for (double lambda : {0.005, 0.02, 0.3}) {
    const BoundReport r = cor53_bound(identity_channel(2), lambda, quick());
    const bool ok = erasure_correction(lambda, 2).admissible;
    CHECK(r.passed() == ok);
    if (ok) CHECK(r.slack >= 0.0);
    if (!ok) CHECK(r.reason.rfind("hypothesis", 0) == 0);
    CHECK(r.diagnostic("restarts_used") >= 2);
  }
}

TEST_CASE("post-selected interval") {
  const auto ps = post_selected_capacity(identity_channel(2), 0.005, quick());
  CHECK(ps.lower == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ps.upper >= ps.lower);
}

TEST_CASE("erasure product against the heralded power") {
  const BoundReport r = thm51_compare(identity_channel(2), 2, 0.5, ChiPotSpec{}, quick());
  CHECK(r.passed());
  CHECK(r.rhs == doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-4));
  CHECK_THROWS_AS(thm51_compare(identity_channel(2), 4, 0.5, ChiPotSpec{}, quick()), GuardExceeded);
}

TEST_CASE("heralded additivity reports") {
  HeraldBlock b;
  b.phis = {identity_channel(2), identity_channel(2), identity_channel(2), identity_channel(2)};
  b.k = 1;
  const HeraldSpec spec{{b}};
  CHECK(spec.lambda_bar() == doctest::Approx(0.25));
  CHECK(spec.sum_k() == 1);
  const BoundReport r = cor42_bound(spec, quick());
  CHECK_FALSE(r.passed());
  CHECK(r.component("hypothesis") == doctest::Approx(3.1 * 2 * std::pow(0.25, 0.25)).epsilon(1e-12));
  HeraldBlock bad = b;
  bad.k = 5;
  CHECK_THROWS_AS(HeraldSpec{{bad}}.validate(), InvalidArgument);
}

TEST_CASE("blocksize coefficient") {
  const std::vector<KrausChannel> two{identity_channel(2), identity_channel(2)};
  const BoundReport r = blocksize_bound(two, 0.1, {0.5, 0.5}, {1.0, 1.0});
  CHECK(r.component("exact_coefficient") == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(r.passed());
  const BoundReport z = blocksize_bound(two, 0.1, {1.0, 1.0}, {1.0, 1.0});
  CHECK(z.component("correction_exact") == 0.0);
  const std::vector<KrausChannel> four(4, identity_channel(2));
  const BoundReport q = blocksize_bound(four, 0.5, {1, 1, 1, 1}, {1, 1, 1, 1});
  CHECK(q.component("exact_coefficient") == doctest::Approx(0.4375).epsilon(1e-12));
  CHECK_THROWS_AS(blocksize_bound(two, 0.1, {1.0, 1.0}, {0.5, 0.5}), InvalidArgument);
}
