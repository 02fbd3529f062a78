#include "doctest.h"
#include "qst/evaluator.hpp"
#include "qst/projection.hpp"
#include "support/classical.hpp"
#include "support/random_exact.hpp"
#include "support/random_formula.hpp"

#include <functional>
#include <map>
#include <random>

using namespace qst;
using namespace qst::testing;

namespace {

std::vector<BooleanAlgebra::Element> all_values(const BooleanAlgebra& b) {
  std::vector<BooleanAlgebra::Element> out;
  for (unsigned m = 0; m < b.size(); ++m) out.push_back(b.element(m));
  return out;
}

}  // namespace

TEST_CASE("evaluation examples") {
  const BooleanAlgebra b(2);
  const auto p = b.atom(0);
  const auto c0 = check_embed(b, PureSet{});
  const auto u = make_qset(b, {{c0, p}});
  Environment<BooleanAlgebra> env;
  env.bind("u", u).bind("c0", c0).bind("e", make_qset(b, {}));
  Session<BooleanAlgebra> s(b);
  Evaluator<BooleanAlgebra> ev(s);
  CHECK(ev.eval(parse("u = u"), env) == b.top());
  CHECK(ev.eval(parse("c0 = c0"), env) == b.top());
  CHECK(ev.eval(parse("forall x in e . x in x"), env) == b.top());
  CHECK(ev.eval(parse("forall x in e . ~x = x"), env) == b.top());
  CHECK(ev.eval(parse("forall x in u . x in c0"), env) == b.ortho(p));
  CHECK(ev.eval(parse("c0 in u"), env) == p);
  CHECK(ev.eval(parse("exists x in u . x = c0"), env) == p);
  CHECK_FALSE(ev.notes().truncated_universal);
}

TEST_CASE("implication lifts to the sasaki arrow") {
  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto c0 = check_embed(l, PureSet{});
  Environment<ProjectionLattice> env;
  env.bind("c0", c0).bind("u", make_qset(l, {{c0, p}})).bind("v", make_qset(l, {{c0, q}}));
  Session<ProjectionLattice> s(l);
  Evaluator<ProjectionLattice> ev(s);
  const Formula a = parse("c0 in u");
  const Formula bq = parse("c0 in v");
  CHECK(ev.eval_implies(a, a, env).is_identity());
  CHECK(ev.eval_implies(parse("c0 in c0"), bq, env).is_identity());
  CHECK(ev.eval_implies(a, bq, env) == sasaki_arrow(l, p, q));
  CHECK(ev.eval_implies(a, bq, env) == p.complement());
  // The connective desugars to the same value.
  CHECK(ev.eval(f_implies(a, bq), env) == ev.eval_implies(a, bq, env));
}

TEST_CASE("boolean implication is the material conditional") {
  const BooleanAlgebra b(2);
  const auto frag = enumerate_fragment(b, all_values(b), 2);
  Session<BooleanAlgebra> s(b, frag);
  Evaluator<BooleanAlgebra> ev(s);
  for (const auto& x : frag.members()) {
    for (const auto& y : frag.members()) {
      Environment<BooleanAlgebra> env;
      env.bind("x", x).bind("y", y).bind("z", frag[0]);
      for (const char* phi : {"x = y", "z in x", "z in y & x = x"}) {
        for (const char* psi : {"y = x", "z in y", "~z in x"}) {
          CHECK(ev.eval_implies(parse(phi), parse(psi), env) ==
                ev.eval(parse(std::string("~(") + phi + ") | (" + psi + ")"), env));
        }
      }
    }
  }
}

TEST_CASE("errors") {
  const BooleanAlgebra b(1);
  Environment<BooleanAlgebra> env;
  env.bind("u", make_qset(b, {}));
  Session<BooleanAlgebra> s(b);
  Evaluator<BooleanAlgebra> ev(s);
  try {
    ev.eval(parse("u = v"), env);
    FAIL("expected unbound variable");
  } catch (const UnboundVariable& e) {
    CHECK(e.name == "v");
  }
  CHECK_THROWS_AS(ev.eval(parse("forall x in w . x = x"), env), UnboundVariable);
  CHECK_THROWS_AS(ev.eval(parse("forall x . x = u"), env), MissingFragment);
  CHECK_THROWS_AS(ev.eval(parse("(forall x in u . x = x) & x = u"), env), UnboundVariable);
}

TEST_CASE("unbounded quantifiers range over the fragment and say so") {
  const BooleanAlgebra b(1);
  const auto frag = enumerate_fragment(b, all_values(b), 2);
  Environment<BooleanAlgebra> env;
  env.universe = &frag;
  env.bind("u", frag[1]);
  Session<BooleanAlgebra> s(b, frag);
  Evaluator<BooleanAlgebra> ev(s);
  CHECK(ev.eval(parse("exists x . x = u"), env) == b.top());
  CHECK(ev.notes().truncated_universal);
  CHECK(evaluate(b, parse("forall x . x = x"), env) == b.top());
}

TEST_CASE("trace records clause numbers") {
  const BooleanAlgebra b(2);
  const auto c0 = check_embed(b, PureSet{});
  Environment<BooleanAlgebra> env;
  env.bind("u", make_qset(b, {{c0, b.atom(1)}})).bind("c0", c0);
  Session<BooleanAlgebra> s(b);
  Evaluator<BooleanAlgebra> ev(s);
  ev.set_trace(true);
  ev.eval(parse("~(forall x in u . x = c0) & c0 in u"), env);
  std::string all;
  for (const auto& line : ev.notes().trace) all += line + "\n";
  for (const char* clause : {"(1) ", "(2) ", "(3) ", "(8) ", "(9) "}) CHECK(all.find(clause) != std::string::npos);
}

TEST_CASE("formula-level lattice properties") {
  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto frag = enumerate_fragment(l, {l.top(), p, q}, 2);
  Session<ProjectionLattice> s(l, frag);
  Evaluator<ProjectionLattice> ev(s);
  std::mt19937_64 rng(23);
  const std::vector<std::string> names = {"u", "v", "w"};
  for (int trial = 0; trial < 150; ++trial) {
    Environment<ProjectionLattice> env;
    env.universe = &frag;
    for (const auto& n : names) env.bind(n, frag[rng() % frag.size()]);
    const Formula phi = random_closed(rng, names, 3, trial % 3 == 0);
    const Formula psi = random_closed(rng, names, 3, false);
    const Projection a = ev.eval(phi, env);
    const Projection c = ev.eval(psi, env);
    const Projection both = ev.eval(f_and(phi, psi), env);
    CHECK(leq(l, both, a));
    CHECK(leq(l, both, c));
    CHECK(ev.eval(f_not(f_not(phi)), env) == a);
    CHECK(ev.eval(f_not(f_or(phi, psi)), env) == ev.eval(f_and(f_not(phi), f_not(psi)), env));
    CHECK(ev.eval(f_or(phi, f_not(phi)), env).is_identity());
  }
}

TEST_CASE("two-valued degeneration against the classical oracle") {
  const BooleanAlgebra two(1);
  Classical oracle{pure_stage(4)};
  const auto sets = check_embed_all(two, oracle.universe);
  const Fragment<BooleanAlgebra> frag(two, sets);
  REQUIRE(frag.size() == 16);
  Session<BooleanAlgebra> s(two, frag);
  Evaluator<BooleanAlgebra> ev(s);
  std::mt19937_64 rng(29);
  const std::vector<std::string> names = {"u", "v"};
  for (int trial = 0; trial < 400; ++trial) {
    const Formula f = random_closed(rng, names, 4, true);
    REQUIRE(depth(f) <= 4);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = 0; j < sets.size(); j += 3) {
        Environment<BooleanAlgebra> env;
        env.universe = &frag;
        env.bind("u", sets[i]).bind("v", sets[j]);
        std::map<std::string, PureSet> cenv{{"u", oracle.universe[i]}, {"v", oracle.universe[j]}};
        const bool expected = oracle.eval(f, cenv);
        REQUIRE(ev.eval(f, env) == (expected ? two.top() : two.bottom()));
      }
    }
  }
}

TEST_CASE("batched evaluation agrees with scalar evaluation") {
  const BooleanAlgebra b(2);
  const auto frag = enumerate_fragment(b, all_values(b), 3);
  Session<BooleanAlgebra> s(b, frag);
  Evaluator<BooleanAlgebra> ev(s);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Formula core = desugar(random_closed(rng, {"u", "v", "w"}, 3, false));
    const std::uint32_t args[] = {static_cast<std::uint32_t>(rng() % frag.size()),
                                  static_cast<std::uint32_t>(rng() % frag.size())};
    const auto batch = ev.eval_over_fragment(core, {"u", "v"}, args, "w");
    for (std::uint32_t k = 0; k < frag.size(); k += 7) {
      Environment<BooleanAlgebra> env;
      env.bind("u", frag[args[0]]).bind("v", frag[args[1]]).bind("w", frag[k]);
      REQUIRE(batch[k] == ev.eval(core, env));
    }
  }

  const ProjectionLattice l(2);
  const Projection p = diag_projection({1, 0});
  const Projection q = span_of({vec({1, 1})}, 2);
  const auto pfrag = enumerate_fragment(l, {l.bottom(), p, q}, 2);
  Session<ProjectionLattice> ps(l, pfrag);
  Evaluator<ProjectionLattice> pev(ps);
  for (int trial = 0; trial < 40; ++trial) {
    const Formula core = desugar(random_closed(rng, {"u", "w"}, 3, false));
    Environment<ProjectionLattice> env;
    env.bind("u", pfrag[rng() % pfrag.size()]);
    const auto batch = pev.eval_over_fragment(core, env, "w");
    for (std::uint32_t k = 0; k < pfrag.size(); ++k) {
      env.bind("w", pfrag[k]);
      REQUIRE(batch[k] == pev.eval(core, env));
    }
  }
}
