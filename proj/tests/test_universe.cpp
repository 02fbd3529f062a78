#include "doctest.h"
#include "qst/projection.hpp"
#include "qst/universe.hpp"
#include "support/classical.hpp"
#include "support/random_exact.hpp"

#include <gmpxx.h>

#include <functional>
#include <random>
#include <set>

using namespace qst;
using namespace qst::testing;

namespace {

using BSet = QSetPtr<BooleanAlgebra>;
using PSet = QSetPtr<ProjectionLattice>;

// Count of maps from subsets of an n-set into a v-element value set, summed
// term by term: sum_j C(n, j) v^j.
mpz_class maps_from_subsets(unsigned long n, unsigned long v) {
  mpz_class total = 0;
  for (unsigned long j = 0; j <= n; ++j) {
    mpz_class c, p;
    mpz_bin_uiui(c.get_mpz_t(), n, j);
    mpz_ui_pow_ui(p.get_mpz_t(), v, j);
    total += c * p;
  }
  return total;
}

std::vector<BooleanAlgebra::Element> all_values(const BooleanAlgebra& b) {
  std::vector<BooleanAlgebra::Element> out;
  for (unsigned m = 0; m < b.size(); ++m) out.push_back(b.element(m));
  return out;
}

}  // namespace

TEST_CASE("make_qset and ranks") {
  const BooleanAlgebra b(2);
  const BSet empty = make_qset(b, {});
  CHECK(empty->rank() == 0);
  CHECK(empty->empty());
  const BSet one = make_qset(b, {{empty, b.top()}});
  CHECK(one->rank() == 1);
  const BSet two = make_qset(b, {{empty, b.top()}, {one, b.top()}});
  CHECK(two->rank() == 2);
  CHECK(empty->id() != make_qset(b, {})->id());

  const BooleanAlgebra other(1);
  CHECK_THROWS_AS(make_qset(b, {{make_qset(other, {}), b.top()}}), LatticeMismatch);
  CHECK_THROWS_AS(make_qset(b, {{empty, other.top()}}), LatticeMismatch);
  CHECK_THROWS_AS(make_qset(b, {{nullptr, b.top()}}), std::invalid_argument);
}

TEST_CASE("check_embed") {
  const BooleanAlgebra b(2);
  CHECK(check_embed(b, PureSet{})->empty());
  const BSet one = check_embed(b, PureSet::parse("{{}}"));
  REQUIRE(one->size() == 1);
  CHECK(one->entries()[0].value == b.top());
  const BSet two = check_embed(b, PureSet::numeral(2));
  CHECK(two->size() == 2);
  CHECK(two->rank() == 2);
  // Duplicates are ignored.
  CHECK(check_embed(b, PureSet::parse("{ {}, {}, {{}} }"))->size() == 2);
  CHECK(structurally_equal(b, *two, *check_embed(b, PureSet::parse("{{{}},{}}"))));
  CHECK(PureSet::parse("{ {}, {{}} }") == PureSet::numeral(2));
  CHECK(PureSet::numeral(3).canonical() == "{{{{}},{}},{{}},{}}");
  CHECK_THROWS_AS(check_embed(b, PureSet::numeral(5), 3), std::invalid_argument);
  CHECK_THROWS_AS(PureSet::parse("{{}"), std::invalid_argument);
  CHECK_THROWS_AS(PureSet::parse("{a}"), std::invalid_argument);
}

TEST_CASE("membership and equality of a fuzzy singleton") {
  const BooleanAlgebra b(2);
  const auto p = b.atom(0);
  const BSet empty = check_embed(b, PureSet{});
  const BSet u = make_qset(b, {{empty, p}});
  CHECK(truth_membership(b, empty, check_embed(b, PureSet::numeral(1))) == b.top());
  CHECK(truth_membership(b, empty, u) == p);
  CHECK(truth_membership(b, u, empty) == b.bottom());
  CHECK(truth_equality(b, u, empty) == b.ortho(p));
  CHECK(truth_equality(b, empty, u) == b.ortho(p));
}

TEST_CASE("check-sets compare classically") {
  const BooleanAlgebra b(2);
  const auto sets = pure_stage(3);
  for (const auto& x : sets) {
    for (const auto& y : sets) {
      const auto expected = x == y ? b.top() : b.bottom();
      CHECK(truth_equality(b, check_embed(b, x), check_embed(b, y)) == expected);
    }
  }
}

TEST_CASE("enumeration counts match the closed form") {
  for (unsigned values = 1; values <= 4; ++values) {
    const BooleanAlgebra b(2);
    std::vector<BooleanAlgebra::Element> vs;
    for (unsigned m = 0; m < values; ++m) vs.push_back(b.element(m));
    mpz_class stage = 0;  // |V_0|
    for (int rank = 0; rank <= 3; ++rank) {
      const auto frag = enumerate_fragment(b, vs, rank);
      CHECK(mpz_class(static_cast<unsigned long>(frag.size())) == stage);
      CHECK(stage_cardinality(values, rank) == stage.get_str());
      stage = maps_from_subsets(stage.get_ui(), values);
    }
  }
  const BooleanAlgebra b(2);
  CHECK(enumerate_fragment(b, all_values(b), 1).size() == 1);
  CHECK(enumerate_fragment(b, all_values(b), 2).size() == 5);
  CHECK(enumerate_fragment(b, all_values(b), 3).size() == 3125);
  const BooleanAlgebra two(1);
  CHECK(enumerate_fragment(two, all_values(two), 3).size() == 27);
}

TEST_CASE("enumeration is structurally deduplicated and dom-closed") {
  const BooleanAlgebra b(2);
  const auto frag = enumerate_fragment(b, all_values(b), 3);
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < frag.size(); ++i) {
    std::string key;
    for (const auto& e : frag.dom(i)) {
      CHECK(e.key < i);
      key += std::to_string(e.key) + ":" + std::to_string(e.value.bits) + ",";
    }
    CHECK(seen.insert(key).second);
    CHECK(frag[i]->rank() < 3);
  }
}

TEST_CASE("size guard refuses with the cardinality bound") {
  const BooleanAlgebra b(3);
  try {
    enumerate_fragment(b, all_values(b), 3);
    FAIL("expected refusal");
  } catch (const SizeGuardExceeded& e) {
    CHECK(e.cardinality_bound == "387420489");  // 9^9
  }
  const BooleanAlgebra small(2);
  CHECK_THROWS_AS(enumerate_fragment(small, all_values(small), 4), SizeGuardExceeded);
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 5, 3125);
  CHECK(stage_cardinality(4, 4) == big.get_str());
}

TEST_CASE("reflexivity and symmetry on the boolean rank-3 fragment") {
  const BooleanAlgebra b(2);
  const auto frag = enumerate_fragment(b, all_values(b), 3);
  Session<BooleanAlgebra> s(b, frag);
  const auto n = static_cast<std::uint32_t>(frag.size());
  std::size_t reflexive = 0;
  std::size_t symmetric = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    reflexive += s.equality_at(i, i) == b.top();
    const auto row = s.equality_row(i);
    for (std::uint32_t j = 0; j < i; ++j) symmetric += row[j] == s.equality_at(j, i);
  }
  CHECK(reflexive == n);
  CHECK(symmetric == std::size_t{n} * (n - 1) / 2);
  // The dense path and the hash path agree.
  Session<BooleanAlgebra> loose(b);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const auto i = static_cast<std::uint32_t>(rng() % n);
    const auto j = static_cast<std::uint32_t>(rng() % n);
    CHECK(loose.equality(frag[i], frag[j]) == s.equality_at(i, j));
    CHECK(loose.membership(frag[i], frag[j]) == s.membership_at(i, j));
  }
}

TEST_CASE("reflexivity and symmetry on a projection fragment") {
  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto frag = enumerate_fragment(l, {l.bottom(), p, q}, 3);
  REQUIRE(frag.size() == 256);
  Session<ProjectionLattice> s(l, frag);
  const auto n = static_cast<std::uint32_t>(frag.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    REQUIRE(s.equality_at(i, i).is_identity());
    for (std::uint32_t j = 0; j < i; ++j) REQUIRE(s.equality_at(i, j) == s.equality_at(j, i));
  }
}

TEST_CASE("two-valued degeneration on check-sets") {
  const BooleanAlgebra two(1);
  const auto pure = pure_stage(4);
  REQUIRE(pure.size() == 16);
  std::vector<BSet> sets;
  for (const auto& a : pure) sets.push_back(check_embed(two, a));
  Session<BooleanAlgebra> s(two);
  for (std::size_t i = 0; i < pure.size(); ++i) {
    for (std::size_t j = 0; j < pure.size(); ++j) {
      CHECK((s.equality(sets[i], sets[j]) == two.top()) == (pure[i] == pure[j]));
      CHECK((s.membership(sets[i], sets[j]) == two.top()) == classical_member(pure[i], pure[j]));
    }
  }
}

TEST_CASE("zero-valued entries change nothing") {
  const BooleanAlgebra b(2);
  const auto frag = enumerate_fragment(b, all_values(b), 3);
  Session<BooleanAlgebra> s(b, frag);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto& v = frag[rng() % frag.size()];
    const auto& key = frag[rng() % frag.size()];
    auto entries = v->entries();
    entries.push_back({key, b.bottom()});
    const BSet extended = make_qset(b, entries);
    for (const auto& u : frag.members()) {
      REQUIRE(s.equality(u, extended) == s.equality(u, v));
      REQUIRE(s.membership(u, extended) == s.membership(u, v));
    }
    s.clear_scratch();
  }

  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto pfrag = enumerate_fragment(l, {l.top(), p, q}, 2);
  Session<ProjectionLattice> ps(l, pfrag);
  for (const auto& v : pfrag.members()) {
    for (const auto& key : pfrag.members()) {
      auto entries = v->entries();
      entries.push_back({key, l.bottom()});
      const PSet extended = make_qset(l, entries);
      for (const auto& u : pfrag.members()) {
        CHECK(ps.equality(u, extended) == ps.equality(u, v));
        CHECK(ps.membership(u, extended) == ps.membership(u, v));
      }
    }
  }
}

TEST_CASE("duplicate keys: merging would not change truth values") {
  // Same value on structurally equal keys with distinct handles.
  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto frag = enumerate_fragment(l, {l.top(), p, q}, 2);
  Session<ProjectionLattice> s(l, frag);
  const PSet empty_copy = make_qset(l, {});
  for (const auto& value : {p, q, l.top()}) {
    const PSet merged = make_qset(l, {{frag[0], value}});
    const PSet doubled = make_qset(l, {{frag[0], value}, {empty_copy, value}});
    for (const auto& u : frag.members()) {
      CHECK(s.equality(u, merged) == s.equality(u, doubled));
      CHECK(s.membership(u, merged) == s.membership(u, doubled));
      CHECK(s.membership(merged, u) == s.membership(doubled, u));
    }
  }

  // Boolean kind: differing values on duplicate keys merge by join.
  const BooleanAlgebra b(2);
  const auto bfrag = enumerate_fragment(b, all_values(b), 3);
  Session<BooleanAlgebra> bs(b, bfrag);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto& key = bfrag[rng() % bfrag.size()];
    auto key_entries = key->entries();
    const BSet key_copy = make_qset(b, key_entries);
    const auto x = b.element(static_cast<unsigned>(rng() % 4));
    const auto y = b.element(static_cast<unsigned>(rng() % 4));
    const BSet doubled = make_qset(b, {{key, x}, {key_copy, y}});
    const BSet merged = make_qset(b, {{key, b.join(x, y)}});
    for (const auto& u : bfrag.members()) {
      REQUIRE(bs.equality(u, merged) == bs.equality(u, doubled));
      REQUIRE(bs.membership(u, merged) == bs.membership(u, doubled));
    }
    bs.clear_scratch();
  }
}

TEST_CASE("hereditary values") {
  const BooleanAlgebra b(2);
  const BSet empty = make_qset(b, {});
  const BSet inner = make_qset(b, {{empty, b.atom(0)}});
  const BSet outer = make_qset(b, {{inner, b.atom(1)}, {empty, b.atom(0)}});
  std::vector<BooleanAlgebra::Element> values;
  collect_hereditary_values(b, *outer, values);
  CHECK(values.size() == 2);
}

TEST_CASE("lattice mismatch") {
  const BooleanAlgebra b(2);
  const BooleanAlgebra c(1);
  CHECK_THROWS_AS(truth_equality(b, make_qset(b, {}), make_qset(c, {})), LatticeMismatch);
  const auto frag = enumerate_fragment(c, all_values(c), 2);
  Session<BooleanAlgebra> s(b);
  CHECK_THROWS_AS(s.attach(frag), LatticeMismatch);
}
