#include "doctest.h"
#include "qst/lattice.hpp"

#include <vector>

using namespace qst;

TEST_CASE("boolean meet, join and complement") {
  const BooleanAlgebra b(2);
  const auto p = b.atom(0);
  const auto q = b.atom(1);
  CHECK(b.equal(b.meet(p, q), b.bottom()));
  for (const auto& x : b.elements()) CHECK(b.equal(b.meet(x, b.top()), x));
  CHECK(b.equal(b.join(p, b.ortho(p)), b.top()));
  CHECK(b.equal(b.ortho(b.bottom()), b.top()));
  CHECK(b.equal(b.ortho(b.ortho(p)), p));
}

TEST_CASE("empty meets and joins") {
  const BooleanAlgebra b(3);
  const std::vector<BooleanAlgebra::Element> none;
  CHECK(b.equal(big_meet(b, none), b.top()));
  CHECK(b.equal(big_join(b, none), b.bottom()));
  const std::vector<BooleanAlgebra::Element> atoms{b.atom(0), b.atom(1), b.atom(2)};
  CHECK(b.equal(big_join(b, atoms), b.top()));
}

TEST_CASE("sasaki arrow on a four-element algebra") {
  const BooleanAlgebra b(2);
  const auto p = b.atom(0);
  const auto q = b.atom(1);
  // p' v (p ^ q) = q v 0 = q, which is also the classical not-p or q.
  CHECK(b.equal(sasaki_arrow(b, p, q), q));
  CHECK(b.equal(sasaki_arrow(b, p, q), b.join(b.ortho(p), q)));
  for (const auto& x : b.elements()) {
    for (const auto& y : b.elements()) {
      if (leq(b, x, y)) CHECK(b.equal(sasaki_arrow(b, x, y), b.top()));
    }
  }
}

TEST_CASE("every boolean pair commutes") {
  const BooleanAlgebra b(3);
  for (const auto& x : b.elements()) {
    for (const auto& y : b.elements()) {
      CHECK(commutes(b, x, y));
    }
  }
}

TEST_CASE("mixed algebras are rejected") {
  const BooleanAlgebra b2(2);
  const BooleanAlgebra b3(3);
  CHECK_THROWS_AS(b2.meet(b2.top(), b3.top()), LatticeMismatch);
  CHECK_THROWS_AS(b3.ortho(b2.bottom()), LatticeMismatch);
  CHECK_FALSE(b2.contains(b3.top()));
  CHECK_THROWS(BooleanAlgebra(9));
}

TEST_CASE("law suite on the four-element algebra") {
  const BooleanAlgebra b(2);
  const LawReport rep = verify_laws(b, b.elements());
  CHECK(rep.ortholattice_ok);
  CHECK(rep.orthomodular_ok);
  CHECK(rep.distributive);
  CHECK_FALSE(rep.distributivity_witness.has_value());
  REQUIRE(rep.find("de-morgan") != nullptr);
  CHECK(rep.find("de-morgan")->checked == 16);
}

TEST_CASE("law suite with distributivity switched off") {
  const BooleanAlgebra b(3);
  const LawReport rep = verify_laws(b, b.elements(), {.distributivity = false});
  CHECK(rep.find("distributive-meet") == nullptr);
  CHECK(rep.ortholattice_ok);
}

TEST_CASE("describe renders masks") {
  const BooleanAlgebra b(3);
  CHECK(b.describe(b.top()) == "1");
  CHECK(b.describe(b.bottom()) == "0");
  CHECK(b.describe(b.element(0b101)) == "0b101");
}
