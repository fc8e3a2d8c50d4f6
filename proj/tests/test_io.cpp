#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"

using namespace symba;
using fixtures::word;
using fixtures::z;
using nlohmann::json;

namespace {

template <class Fn>
Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::internal;
}

}  // namespace

TEST_CASE("groups round-trip") {
  for (const auto& G : {Group::free_abelian(2), Group::free(3), Group::cyclic(6), Group::symmetric(4),
                        Group::product({Group::free_abelian(1), Group::cyclic(2)})}) {
    auto back = io::group_from_json(io::to_json(G));
    CHECK(back == G);
    for (const auto& g : ball(G, 2)) CHECK(io::elem_from_json(G, io::to_json(G, g)) == g);
  }
  CHECK(io::group_from_json(json::parse(R"({"kind":"cyclic","order":5})")).order() == 5);
  CHECK(io::elem_from_json(Group::free_abelian(1), json(3)) == z(3));
}

TEST_CASE("cellular automata round-trip") {
  std::mt19937_64 rng(3);
  auto pool = ball(Group::free(2), 1).elements();
  for (int i = 0; i < 20; ++i) {
    auto tau = fixtures::random_table_ca(rng, Group::free(2), Alphabet::plain(2 + i % 2), pool, 3);
    auto back = io::ca_from_json(json::parse(io::to_json(tau).dump()));
    CHECK(back.universe() == tau.universe());
    CHECK(back.memory() == tau.memory());
    CHECK(back.map() == tau.map());
  }
  auto p = io::ca_from_json(io::to_json(fixtures::pair_tau()));
  CHECK(p.map() == fixtures::pair_tau().map());
  auto j = io::to_json(fixtures::pair_tau());
  CHECK(j["flags"]["structured"] == true);
  CHECK(j["flags"]["pointed"] == true);
}

TEST_CASE("memory listed out of canonical order") {
  // Table coordinates follow the listed order: value = x(1) with memory written [1, 0].
  auto j = json::parse(R"({
    "universe": {"kind": "free_abelian", "rank": 1},
    "alphabet": {"flavor": "plain", "size": 2},
    "memory": [1, 0],
    "map": {"arity": 2, "table": [0, 0, 1, 1]}
  })");
  auto tau = io::ca_from_json(j);
  auto Z = Group::free_abelian(1);
  CHECK(fixtures::same_ca_action(tau, fixtures::shift_ca(Z, Alphabet::plain(2), z(1)), ball(Z, 1)));
}

TEST_CASE("patterns and matrices round-trip") {
  auto Z = Group::free_abelian(1);
  auto A = Alphabet::module(3, 2);
  Pattern p{fixtures::zrange(-1, 2), {0, 5, 8, 3}};
  auto j = io::to_json(Z, A, p);
  CHECK(j["values"][1] == json::array({1, 2}));
  CHECK(io::pattern_from_json(j, Z, A) == p);

  auto C = fixtures::pair_C();
  CHECK(io::matrix_from_json(json::parse(io::to_json(C).dump())) == C);
  auto s = random_invertible_matrix(5, Group::free(2), 2, 1, 3);
  CHECK(io::matrix_from_json(io::to_json(s.matrix)) == s.matrix);
}

TEST_CASE("embedding parameters") {
  auto p = io::embedding_params_from_json(json::parse(R"({"kind":"modular","N":5})"));
  CHECK(p.kind == EmbeddingParams::Kind::modular);
  CHECK(*p.modulus == 5);
  auto q = io::embedding_params_from_json(json::parse(R"({"kind":"product","factors":[{"kind":"modular"},{"kind":"identity"}]})"));
  CHECK(q.factors.size() == 2);
  CHECK(io::embedding_params_from_json(json::object()).kind == EmbeddingParams::Kind::automatic);
  CHECK(code_of([] { io::embedding_params_from_json(json::parse(R"({"kind":"spiral"})")); }) == Errc::invalid_input);
}

TEST_CASE("malformed documents are invalid input") {
  const char* bad[] = {
      R"({"universe": {"kind": "torus"}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0], "map": {"arity": 1, "table": [0, 1]}})",
      R"({"universe": {"kind": "free_abelian", "rank": 1}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0, 0], "map": {"arity": 2, "table": [0, 1, 1, 0]}})",
      R"({"universe": {"kind": "free_abelian", "rank": 1}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0], "map": {"arity": 1, "table": [0, 2]}})",
      R"({"universe": {"kind": "free_abelian", "rank": 1}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0], "map": {"arity": 1, "table": [0]}})",
      R"({"universe": {"kind": "free", "rank": 2}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [[1, -1]], "map": {"arity": 1, "table": [0, 1]}})",
      R"({"universe": {"kind": "free_abelian", "rank": 1}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0]})",
      R"({"universe": {"kind": "free_abelian", "rank": 1}, "alphabet": {"flavor": "plain", "size": 2}, "memory": "zero", "map": {"arity": 1, "table": [0, 1]}})",
      R"({"universe": {"kind": "free_abelian", "rank": 1}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0], "map": {"arity": 1, "matrices": [[[1]]]}})",
      R"({"universe": {"kind": "finite", "table": [[0, 1], [1, 1]]}, "alphabet": {"flavor": "plain", "size": 2}, "memory": [0], "map": {"arity": 1, "table": [0, 1]}})",
  };
  for (const char* doc : bad) {
    INFO(doc);
    CHECK(code_of([&] { io::ca_from_json(json::parse(doc)); }) == Errc::invalid_input);
  }
  CHECK(code_of([] { io::read_json_file("/nonexistent/file.json"); }) == Errc::invalid_input);
  auto Z = Group::free_abelian(1);
  CHECK(code_of([&] { io::pattern_from_json(json::parse(R"({"domain":[0,1],"values":[1]})"), Z, Alphabet::plain(2)); }) ==
        Errc::invalid_input);
}

TEST_CASE("files are written and parsed back") {
  auto path = (std::filesystem::temp_directory_path() / "symba_io_test.json").string();
  auto j = io::to_json(fixtures::xor_ca());
  io::write_json_file(path, j);
  CHECK(io::read_json_file(path) == j);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK(code_of([&] { io::read_json_file(path); }) == Errc::invalid_input);
  std::remove(path.c_str());
}

TEST_CASE("serialization is byte-stable") {
  auto a = io::to_json(fixtures::pair_sigma()).dump(2);
  auto b = io::to_json(io::ca_from_json(json::parse(a))).dump(2);
  CHECK(a == b);
}
