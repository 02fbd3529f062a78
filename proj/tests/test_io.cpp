#include "doctest.h"
#include "qst/evaluator.hpp"
#include "qst/io.hpp"
#include "support/random_exact.hpp"

#include <random>

using namespace qst;
using namespace qst::testing;
using nlohmann::json;

TEST_CASE("lattice documents") {
  const auto b = lattice_from_json(json::parse(R"({"kind":"boolean","atoms":3})"));
  CHECK(b.kind == LatticeKind::boolean);
  CHECK(b.boolean().size() == 8);
  const auto p = lattice_from_json(json::parse(R"({"kind":"projection","dim":2})"));
  CHECK(p.projection().dim() == 2);
  CHECK(to_json(p) == json::parse(R"({"kind":"projection","dim":2})"));
  CHECK_THROWS_AS(lattice_from_json(json::parse(R"({"kind":"boolean","atoms":9})")), DataError);
  CHECK_THROWS_AS(lattice_from_json(json::parse(R"({"kind":"heyting","atoms":2})")), DataError);
  CHECK_THROWS_AS(lattice_from_json(json::parse(R"({"kind":"projection"})")), DataError);
}

TEST_CASE("matrices and projections") {
  const json half = json::parse(R"([["1/2","1/2"],["1/2","1/2"]])");
  CHECK(projection_from_json(half, 2) == span_of({vec({1, 1})}, 2));
  const json cplx = json::parse(R"([["1/2",["0","-1/2"]],[["0","1/2"],"1/2"]])");
  const Projection pc = projection_from_json(cplx, 2);
  CHECK(pc.rank() == 1);
  CHECK(matrix_to_json(pc.matrix()) == cplx);
  CHECK_THROWS_AS(projection_from_json(json::parse(R"([["1","1"],["0","0"]])"), 2), DataError);
  CHECK_THROWS_AS(projection_from_json(half, 3), DataError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"([["1","x"],["0","0"]])")), DataError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"([["1"],["0","0"]])")), DataError);

  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    const Projection p = random_projection(rng, 2 + trial % 3);
    CHECK(projection_from_json(json::parse(matrix_to_json(p.matrix()).dump()), p.dim()) == p);
  }
}

TEST_CASE("spectral data and states") {
  const json a = json::parse(R"({"dim":2,"eigen":[
      {"value":"1","proj":[["1","0"],["0","0"]]},
      {"value":"2","proj":[["0","0"],["0","1"]]}]})");
  const SpectralData sd = spectral_from_json(a);
  CHECK(sd.spaces.size() == 2);
  CHECK(sd.spaces[1].value == 2);
  CHECK(spectral_from_json(to_json(sd)).operator_matrix() == sd.operator_matrix());
  // Eigenprojections must resolve the identity.
  CHECK_THROWS_AS(spectral_from_json(json::parse(R"({"dim":2,"eigen":[{"value":"1","proj":[["1","0"],["0","0"]]}]})")),
                  DataError);

  const StateVector e = state_from_json(json::parse(R"({"dim":2,"exact":["3/5","4/5"]})"));
  CHECK(e.is_exact());
  CHECK(e.norm_squared_exact() == 1);
  CHECK(to_json(e) == json::parse(R"({"dim":2,"exact":["3/5","4/5"]})"));
  const StateVector r = state_from_json(json::parse(R"({"ray":["1","1"]})"));
  CHECK(r.is_ray());
  CHECK(*born_probability(sd.spaces[0].proj, r).exact == mpq_class(1, 2));
  const StateVector d = state_from_json(json::parse(R"({"decimal":[0.6,[0,0.8]]})"));
  CHECK_FALSE(d.is_exact());
  CHECK(std::abs(d.norm_squared() - 1) < 1e-15);
  CHECK_THROWS_AS(state_from_json(json::parse(R"({"dim":3,"exact":["1","0"]})")), DataError);
  CHECK_THROWS_AS(state_from_json(json::parse(R"({"ray":["0","0"]})")), DataError);
  CHECK_THROWS_AS(state_from_json(json::parse(R"({"amplitudes":["1"]})")), DataError);
}

TEST_CASE("truth values") {
  const BooleanAlgebra b(2);
  CHECK(value_from_json(b, json(2)) == b.element(2));
  CHECK(value_to_json(b, b.element(3)) == json(3));
  CHECK_THROWS_AS(value_from_json(b, json(4)), DataError);
  CHECK_THROWS_AS(value_from_json(b, json("1")), DataError);
  const ProjectionLattice l(2);
  CHECK(value_from_json(l, json("1")).is_identity());
  CHECK(value_from_json(l, json(0)).is_zero());
  CHECK_THROWS_AS(value_from_json(l, json("P")), DataError);
}

TEST_CASE("fragment round trip") {
  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto frag = enumerate_fragment(l, {l.top(), p, q}, 2);
  const json j = fragment_to_json(frag);
  const auto back = fragment_from_json(l, json::parse(j.dump()));
  REQUIRE(back.size() == frag.size());
  Session<ProjectionLattice> s1(l, frag), s2(l, back);
  for (std::uint32_t u = 0; u < frag.size(); ++u) {
    CHECK(structurally_equal(l, *frag[u], *back[u]));
    for (std::uint32_t v = 0; v < frag.size(); ++v) CHECK(s1.equality_at(u, v) == s2.equality_at(u, v));
  }
  CHECK_THROWS_AS(fragment_from_json(ProjectionLattice(3), j), DataError);
  CHECK_THROWS_AS(fragment_from_json(l, json::parse(R"({"members":[{"entries":[[1,"1"]]},{"entries":[]}]})")),
                  DataError);
}

TEST_CASE("set literals") {
  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  LiteralScope<ProjectionLattice> scope;
  scope.value = [&](const std::string& n) {
    if (n == "P") return p;
    throw std::out_of_range(n);
  };
  std::map<std::string, QSetPtr<ProjectionLattice>> named;
  scope.set = [&](const std::string& n) { return named.at(n); };

  const auto empty = parse_qset_literal(l, "{}", scope);
  CHECK(empty->empty());
  named["e"] = empty;
  const auto u = parse_qset_literal(l, "{ e: P, {e}: P' }", scope);
  REQUIRE(u->size() == 2);
  CHECK(u->entries()[0].key == empty);
  CHECK(u->entries()[0].value == p);
  CHECK(u->entries()[1].value == p.complement());
  CHECK(u->entries()[1].key->entries()[0].value.is_identity());
  CHECK(parse_qset_literal(l, "{{}: 0}", scope)->entries()[0].value.is_zero());

  const auto c = parse_qset_literal(l, "check({ {}, {{}} })", scope);
  CHECK(c->rank() == 2);
  CHECK(truth_equality(l, c, check_embed(l, PureSet::numeral(2))).is_identity());

  auto column_of = [&](const char* text) {
    try {
      parse_qset_literal(l, text, scope);
    } catch (const LiteralError& e) {
      return e.column;
    }
    return 0;
  };
  CHECK(column_of("{ e: Q }") == 6);
  CHECK(column_of("{ f }") == 3);
  CHECK(column_of("{ e: P") == 7);
  CHECK(column_of("{} {}") == 4);
  CHECK(column_of("check({x})") > 0);

  const BooleanAlgebra b(2);
  const auto bs = parse_qset_literal(b, "{{}: 1, {{}}: 2'}");
  CHECK(bs->entries()[1].value == b.element(1));
  CHECK(qset_to_literal<BooleanAlgebra>(b, *bs, [&](const auto& v) { return std::to_string(v.bits); }) ==
        "{{}: 1, {{}}: 1}");
  try {
    parse_qset_literal(b, "{{}: 4}");
    FAIL("expected a literal error");
  } catch (const LiteralError& e) {
    CHECK(e.column == 6);
  }
}
