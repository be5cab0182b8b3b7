#include <doctest.h>

#include <cmath>

#include "herald/games.hpp"

using namespace herald;

TEST_CASE("rationals") {
  const Rational r = Rational::parse("3/12");
  CHECK(r.value() == doctest::Approx(0.25));
  CHECK(Rational::parse("2").value() == 2.0);
  CHECK_THROWS_AS(Rational::parse("1/0"), InvalidArgument);
  CHECK_THROWS_AS(Rational::parse("x"), InvalidArgument);
}

TEST_CASE("game validation") {
  CHECK_THROWS_AS(Game("bad", 1, 1, 2, 2, std::vector<double>{0.5}, std::vector<std::uint8_t>(4, 1)),
                  InvalidArgument);
  CHECK_THROWS_AS(Game("bad", 1, 1, 2, 2, std::vector<double>{1.0}, std::vector<std::uint8_t>(3, 1)),
                  InvalidArgument);
}

TEST_CASE("classical values") {
  CHECK(classical_value(chsh_game()) == 0.75);
  CHECK(classical_value(constant_game(2, 2, 2, 2, true)) == 1.0);
  CHECK(classical_value(constant_game(2, 2, 2, 2, false)) == 0.0);
  const int v[3][2][2][3] = {{{{1, 1, 0}, {1, 0, 1}}, {{1, 0, 1}, {0, 0, 0}}},
                             {{{1, 0, 0}, {0, 0, 0}}, {{0, 1, 0}, {1, 1, 0}}},
                             {{{0, 0, 0}, {1, 0, 1}}, {{1, 1, 0}, {0, 1, 0}}}};
  std::vector<std::uint8_t> vv;
  for (const auto& x : v)
    for (const auto& y : x)
      for (const auto& a : y)
        for (int b : a) vv.push_back(static_cast<std::uint8_t>(b));
  const Game g("random", 3, 2, 2, 3, std::vector<Rational>(6, Rational{1, 6}), vv);
  CHECK(classical_value(g) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("optimal CHSH strategy") {
  const QuantumStrategy s = chsh_optimal_strategy();
  CHECK(s.povm_error() < 1e-12);
  CHECK(strategy_value({chsh_game()}, s) == doctest::Approx(0.853553390593274).epsilon(1e-12));
}

TEST_CASE("see-saw reaches the CHSH optimum") {
  SeesawOptions o;
  o.seed = 1;
  const GameValueReport r = entangled_value_lower(chsh_game(), 2, 2, o);
  CHECK(r.entangled_lower >= 0.8525);
  CHECK(r.entangled_lower >= r.classical - 1e-12);
  CHECK(r.strategy.povm_error() < 1e-8);
}

TEST_CASE("multi-Bob gap stays below the monogamy bound") {
  SeesawOptions o;
  o.restarts = 3;
  const GameValueReport r = multi_bob_values({chsh_game(), chsh_game()}, 2, {2, 2}, o);
  CHECK(r.classical == doctest::Approx(0.75));
  REQUIRE(r.monogamy_bound);
  CHECK(*r.monogamy_bound == doctest::Approx(2.0 * std::pow(2.0, -0.25)).epsilon(1e-12));
  CHECK(r.gap() <= *r.monogamy_bound);
  CHECK(r.entangled_lower >= r.classical - 1e-12);
  CHECK(monogamy_game_bound(3, 3) == doctest::Approx(2.55767694600913).epsilon(1e-12));
  CHECK_THROWS_AS(multi_bob_values({chsh_game(), chsh_game(), chsh_game(), chsh_game(), chsh_game(), chsh_game()},
                                   2, {2, 2, 2, 2, 2, 2}, o),
                  GuardExceeded);
}
