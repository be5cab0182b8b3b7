#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "herald/serialize.hpp"

using namespace herald;

TEST_CASE("named channel specs") {
  CHECK(channels_equal(parse_channel_spec("identity(2)"), identity_channel(2)));
  CHECK(channels_equal(parse_channel_spec(" depolarizing(2, 0.3) "), depolarizing_channel(2, 0.3)));
  CHECK(channels_equal(parse_channel_spec("erasure(depolarizing(2,0.1),0.4)"),
                       erasure_channel(depolarizing_channel(2, 0.1), 0.4)));
  CHECK(parse_channel_spec("heralded(1;identity(2),identity(2))").flag_dim() == 2);
  CHECK_THROWS_AS(parse_channel_spec("nosuch(2)"), InvalidArgument);
  CHECK_THROWS_AS(parse_channel_spec("identity(2,3)"), InvalidArgument);
  CHECK_THROWS_AS(parse_channel_spec("depolarizing(2,x)"), InvalidArgument);
}

TEST_CASE("named state specs") {
  CHECK(parse_state_spec("product(bell,basis(2,1))").dim() == 8);
  CHECK(parse_state_spec("ghz(3)").dim() == 8);
  CHECK_THROWS_AS(parse_state_spec("werner()"), InvalidArgument);
}

TEST_CASE("channel JSON round trip") {
  for (const auto& c : {depolarizing_channel(2, 0.3), heralded_channel({identity_channel(2), dephasing_channel(0.2)}, 1)}) {
    const KrausChannel back = channel_from_json(Json::parse(channel_to_json(c).dump()));
    CHECK(channels_equal(back, c));
    CHECK(back.flag_dim() == c.flag_dim());
  }
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"J({"in_dims":[2],"out_dims":[2],"kraus":[[[1,0],[0,0]]]})J")),
                  InvalidArgument);
}

TEST_CASE("complex matrix entries") {
  const Matrix m = matrix_from_json(Json::parse("[[1, [0, 2]], [[3, -1], 0]]"));
  CHECK(m(0, 1) == Complex(0, 2));
  CHECK(m(1, 0) == Complex(3, -1));
  CHECK(max_abs(matrix_from_json(matrix_to_json(m)) - m) == 0.0);
}

TEST_CASE("non-finite numbers") {
  CHECK(number_to_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(number_from_json(Json("inf"))));
  CHECK(number_from_json(Json(1.5)) == 1.5);
  CHECK_THROWS_AS(number_from_json(Json("x")), InvalidArgument);
}

TEST_CASE("game JSON round trip keeps exact weights") {
  const Game g = game_from_json(game_to_json(chsh_game()));
  CHECK(g.pi_exact().has_value());
  CHECK(classical_value(g) == 0.75);
  CHECK_THROWS_AS(game_from_json(Json::parse(R"J({"name":"g","nX":1,"nY":1,"nA":1,"nB":1,"pi":[[1]]})J")),
                  InvalidArgument);
}

TEST_CASE("suite files") {
  const auto suite = suite_from_json(Json::parse(
      R"J({"states":[{"name":"bell","constructor":"bell","analytic_esq":1.0},
                    {"name":"ghz","constructor":"ghz(3)","analytic_esq":[0.5,0.5]}]})J"));
  REQUIRE(suite.size() == 2);
  CHECK(suite[1].analytic.size() == 2);
}

TEST_CASE("atomic writes leave no temporaries") {
  const auto dir = std::filesystem::temp_directory_path() / "herald_serialize_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "sub" / "x.txt").string();
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}
