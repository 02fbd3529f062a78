// Acceptance gate: one PASS/FAIL line per criterion. A criterion passes only
// if every check holds exactly and it finishes within its time limit.

#include "qst/evaluator.hpp"
#include "qst/quantum_reals.hpp"
#include "qst/verification.hpp"
#include "support/classical.hpp"
#include "support/random_exact.hpp"
#include "support/random_formula.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace qst;
using namespace qst::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream notes;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) notes << "failed: " << what << "; ";
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(int number, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < limit_s, "time limit");
  if (!out.ok) ++failures;
  std::printf("criterion %d %s: %s (%.2f s, limit %.0f s) %s\n", number, out.ok ? "PASS" : "FAIL", title, secs, limit_s,
              out.notes.str().c_str());
  std::fflush(stdout);
}

std::vector<BooleanAlgebra::Element> all_values(const BooleanAlgebra& b) {
  std::vector<BooleanAlgebra::Element> out;
  for (unsigned m = 0; m < b.size(); ++m) out.push_back(b.element(m));
  return out;
}

Projection axis() { return diag_projection({1, 0}); }
Projection diagonal_line() { return span_of({vec({1, 1})}, 2); }

QSetPtr<ProjectionLattice> random_qset(std::mt19937_64& rng, const ProjectionLattice& l, const std::vector<Projection>& pool,
                                       int rank) {
  std::vector<QSet<ProjectionLattice>::Entry> entries;
  if (rank > 0) {
    const int count = static_cast<int>(rng() % 3);
    for (int i = 0; i < count; ++i) entries.push_back({random_qset(rng, l, pool, rank - 1), pool[rng() % pool.size()]});
  }
  return make_qset(l, std::move(entries));
}

mpq_class expectation(const ExactMatrix& m, const ExactVector& psi) {
  const ExactVector mv = m * psi;
  GaussianRational acc = 0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) acc += conj(psi(i)) * mv(i);
  return acc.real();
}

// Commuting family: sums of parts of one orthogonal resolution.
std::vector<Projection> commuting_family(std::mt19937_64& rng, int dim) {
  const auto parts = random_orthogonal_resolution(rng, dim);
  std::vector<Projection> family;
  for (int k = 0; k < 3; ++k) {
    ExactMatrix m = ExactMatrix::Zero(dim, dim);
    for (const auto& p : parts) {
      if (rng() % 2) m += p.matrix();
    }
    family.push_back(Projection::from_matrix(m));
  }
  return family;
}

void two_line_counterexample(Outcome& out) {
  const ProjectionLattice l(2);
  const Projection a1 = axis(), a2 = axis().complement();
  const Projection b1 = diagonal_line(), b2 = diagonal_line().complement();
  for (const auto& a : {a1, a2}) {
    for (const auto& b : {b1, b2}) out.require(l.meet(a, b).is_zero(), "no common eigenvector");
  }
  out.require(l.meet(l.join(a1, a2), l.join(b1, b2)).is_identity(), "meet of joins is 1");
  const Projection distributed =
      l.join(l.join(l.meet(a1, b1), l.meet(a1, b2)), l.join(l.meet(a2, b1), l.meet(a2, b2)));
  out.require(distributed.is_zero(), "four-term join is 0");
  out.notes << "meet of joins = 1, distributed join = 0";
}

void law_suite(Outcome& out) {
  std::size_t checked = 0;
  for (int atoms = 0; atoms <= 8; ++atoms) {
    const BooleanAlgebra b(atoms);
    const LawReport rep = verify_laws(b, b.elements());
    out.require(rep.ortholattice_ok && rep.orthomodular_ok && rep.distributive,
                "boolean laws on " + std::to_string(atoms) + " atoms");
    for (const auto& r : rep.laws) checked += r.checked;
  }
  std::mt19937_64 rng(1001);
  std::size_t non_distributive = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + trial % 3;
    const ProjectionLattice l(dim);
    const Projection p = random_projection(rng, dim);
    const Projection q = random_projection(rng, dim);
    const LawReport rep = verify_laws(l, {p, q, p.complement(), q.complement()});
    out.require(rep.ortholattice_ok && rep.orthomodular_ok, "projection laws on a random pair");
    non_distributive += !rep.distributive;
  }
  const ProjectionLattice plane(2);
  const LawReport lines = verify_laws(plane, {axis(), diagonal_line(), diagonal_line().complement()});
  out.require(!lines.distributive && lines.distributivity_witness.has_value(), "distributivity violation on two lines");
  out.require(non_distributive > 0, "distributivity violation among random pairs");
  out.notes << "boolean 2^0..2^8: " << checked << " law instances; 1000 projection pairs; " << non_distributive
            << " non-distributive";
}

void scott_solovay(Outcome& out) {
  const BooleanAlgebra b(2);
  const auto frag = enumerate_fragment(b, all_values(b), 3);
  out.require(frag.size() == 3125, "fragment size 3125");
  Session<BooleanAlgebra> s(b, frag);
  std::size_t instances = 0;
  for (const auto& summary : run_suite(s, catalog(), SuiteKind::scott_solovay)) {
    out.require(summary.failures == 0 && summary.below_one == 0, "schema " + summary.schema);
    instances += summary.instances;
  }
  out.notes << catalog().size() << " schemas, " << instances << " instances, all exactly 1";
}

void transfer(Outcome& out) {
  const ProjectionLattice l(2);
  const Projection p = axis(), q = diagonal_line();
  const auto frag = enumerate_fragment(l, {l.bottom(), l.top(), p, p.complement(), q, q.complement()}, 2, {6, 3});
  Session<ProjectionLattice> s(l, frag);
  std::size_t instances = 0, below = 0;
  for (const auto& summary : run_suite(s, catalog(), SuiteKind::transfer)) {
    out.require(summary.failures == 0, "schema " + summary.schema);
    instances += summary.instances;
    below += summary.below_one;
  }
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 600; ++trial) {
    const int dim = 2 + trial % 2;
    const ProjectionLattice ld(dim);
    std::vector<Projection> pool = {ld.top()};
    for (int i = 0; i < 3; ++i) pool.push_back(random_projection(rng, dim));
    Session<ProjectionLattice> sd(ld);
    const Schema& schema = catalog()[trial % catalog().size()];
    std::vector<QSetPtr<ProjectionLattice>> args;
    for (std::size_t k = 0; k < schema.params.size(); ++k) args.push_back(random_qset(rng, ld, pool, 2));
    const auto r = check_transfer(sd, schema, args);
    out.require(r.verdict == Verdict::pass, r.witness(ld));
  }
  out.notes << frag.size() << "-set fragment: " << instances << " instances (" << below
            << " below 1); 600 random instances; 0 violations";
}

void equality(Outcome& out) {
  const BooleanAlgebra b(2);
  const auto bfrag = enumerate_fragment(b, all_values(b), 3);
  Session<BooleanAlgebra> bs(b, bfrag);
  const auto n = static_cast<std::uint32_t>(bfrag.size());
  bool refl = true, symm = true;
  for (std::uint32_t i = 0; i < n; ++i) {
    refl = refl && bs.equality_at(i, i) == b.top();
    const auto row = bs.equality_row(i);
    for (std::uint32_t j = 0; j < i; ++j) symm = symm && row[j] == bs.equality_at(j, i);
  }
  const ProjectionLattice l(2);
  const Projection p = axis(), q = diagonal_line();
  const auto pfrag = enumerate_fragment(l, {l.top(), p, q}, 3);
  Session<ProjectionLattice> ps(l, pfrag);
  for (std::uint32_t i = 0; i < pfrag.size(); ++i) {
    refl = refl && ps.equality_at(i, i).is_identity();
    for (std::uint32_t j = 0; j < i; ++j) symm = symm && ps.equality_at(i, j) == ps.equality_at(j, i);
  }
  out.require(refl, "reflexivity");
  out.require(symm, "symmetry");

  const auto found = find_equality_axiom_violation(ps);
  out.require(found.has_value(), "projection violation witness");
  if (found) {
    // Recompute the witness from scratch.
    Environment<ProjectionLattice> env, at_u, at_v;
    env.bind("u", found->u).bind("v", found->v);
    at_u.bind("x", found->u).bind("w", found->w);
    at_v.bind("x", found->v).bind("w", found->w);
    const Formula phi = parse(found->formula);
    const Projection e = evaluate(l, parse("u = v"), env);
    out.require(!leq(l, l.meet(e, evaluate(l, phi, at_u)), evaluate(l, phi, at_v)), "witness recomputes");
    out.notes << "witness " << found->formula << "; ";
  }
  out.require(!find_equality_axiom_violation(bs).has_value(), "no boolean violation");
  out.notes << n + pfrag.size() << " sets reflexive and symmetric; boolean V_3 has no violation";
}

void degeneration(Outcome& out) {
  const BooleanAlgebra two(1);
  Classical oracle{pure_stage(4)};
  const auto sets = check_embed_all(two, oracle.universe);
  const Fragment<BooleanAlgebra> frag(two, sets);
  Session<BooleanAlgebra> s(two, frag);
  Evaluator<BooleanAlgebra> ev(s);
  std::mt19937_64 rng(6);
  const std::vector<std::string> names = {"u", "v"};
  std::size_t compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Formula f = random_closed(rng, names, 4, true);
    out.require(depth(f) <= 4, "formula depth");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = 0; j < sets.size(); ++j) {
        Environment<BooleanAlgebra> env;
        env.universe = &frag;
        env.bind("u", sets[i]).bind("v", sets[j]);
        std::map<std::string, PureSet> cenv{{"u", oracle.universe[i]}, {"v", oracle.universe[j]}};
        const bool expected = oracle.eval(f, cenv);
        out.require(ev.eval(f, env) == (expected ? two.top() : two.bottom()), print(f));
        ++compared;
      }
    }
  }
  out.notes << "1000 formulas x 256 argument pairs over 16 check-sets: " << compared << " exact agreements";
}

void takeuti(Outcome& out) {
  std::mt19937_64 rng(7);
  const std::vector<mpq_class> extra = {mpq_class(-7, 2), mpq_class(1, 3), mpq_class(5, 2), mpq_class(9)};
  for (int trial = 0; trial < 120; ++trial) {
    const int dim = 2 + trial % 3;
    const ProjectionLattice l(dim);
    const auto resolution = random_orthogonal_resolution(rng, dim);
    const QReal a = qreal_from_spectral(random_observable(rng, dim, resolution));
    const QReal b = qreal_from_spectral(trial % 2 ? random_observable(rng, dim) : random_observable(rng, dim, resolution));
    out.require(evaluate(l, real_predicate(), encode_real(l, a).environment()).is_identity(), "real predicate");
    const QReal ra = refine(a, extra), rb = refine(b, extra);
    out.require(evaluate(l, real_predicate(), encode_real(l, ra).environment()).is_identity(), "refined predicate");
    out.require(truth_eq(ra, rb).value == truth_eq(a, b).value, "refined equality");
    out.require(truth_leq(ra, rb).value == truth_leq(a, b).value, "refined order");
    out.require(truth_leq(ra, b).value == truth_leq(a, b).value, "one-sided refinement");
  }
  out.notes << "120 observables in dims 2-4 satisfy the predicate; refinement changes no value";
}

void born(Outcome& out) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 3;
    const SpectralData a = random_observable(rng, dim);
    const StateVector psi = StateVector::exact(random_unit_vector(rng, dim));
    mpq_class total = 0;
    for (const auto& e : a.spaces) total += *born_probability(observational_atom(a, e.value), psi).exact;
    out.require(total == 1, "spectral probabilities sum to 1");
  }
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 2 + trial % 3;
    const auto resolution = random_orthogonal_resolution(rng, dim);
    const SpectralData a = random_observable(rng, dim, resolution);
    const SpectralData b = random_observable(rng, dim, resolution);
    const ExactVector psi = random_unit_vector(rng, dim);
    mpq_class joint = 0;
    for (const auto& ea : a.spaces) {
      for (const auto& eb : b.spaces) {
        if (ea.value == eb.value) joint += expectation(ea.proj.matrix() * eb.proj.matrix(), psi);
      }
    }
    const auto got = prob_equal(a, b, StateVector::exact(psi));
    out.require(got.probability.exact && *got.probability.exact == joint, "joint distribution");
  }
  auto diagonal = [](int x, int y) {
    return SpectralData::from_eigenspaces(
        2, {{mpq_class(x), diag_projection({1, 0})}, {mpq_class(y), diag_projection({0, 1})}});
  };
  const auto worked = prob_equal(diagonal(1, 2), diagonal(1, 3), StateVector::ray(vec({1, 1})));
  out.require(worked.probability.exact && *worked.probability.exact == mpq_class(1, 2), "worked example");
  out.notes << "100 exact spectra sum to 1; 60 commuting pairs match; worked example "
            << worked.probability.to_string();
}

void commutator(Outcome& out) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 120; ++trial) {
    const int dim = 2 + trial % 3;
    const std::vector<Projection> s{random_projection(rng, dim), random_projection(rng, dim)};
    out.require(lattice_commutator(s) == commutator_closed_form(s[0], s[1]), "closed form");
  }
  for (int trial = 0; trial < 30; ++trial) {
    out.require(lattice_commutator(commuting_family(rng, 2 + trial % 3)).is_identity(), "commuting family");
  }
  ExactMatrix p = ExactMatrix::Zero(4, 4), q = ExactMatrix::Zero(4, 4);
  p.topLeftCorner(2, 2) = axis().matrix();
  q.topLeftCorner(2, 2) = diagonal_line().matrix();
  p.bottomRightCorner(2, 2) = diag({1, 0});
  q.bottomRightCorner(2, 2) = diag({1, 1});
  const std::vector<Projection> block{Projection::from_matrix(p), Projection::from_matrix(q)};
  out.require(lattice_commutator(block).matrix() == diag({0, 0, 1, 1}), "dim-4 block example");
  out.notes << "120 random pairs match the closed form; 30 commuting families give 1; block example diag(0,0,1,1)";
}

}  // namespace

int main() {
  criterion(1, "distributivity counterexample", 1, two_line_counterexample);
  criterion(2, "lattice law suite", 30, law_suite);
  criterion(3, "value-1 catalog over boolean V_3", 300, scott_solovay);
  criterion(4, "transfer inequality", 300, transfer);
  criterion(5, "equality behavior", 120, equality);
  criterion(6, "two-valued degeneration", 300, degeneration);
  criterion(7, "real-number predicate and refinement", 300, takeuti);
  criterion(8, "born rule and equality probability", 300, born);
  criterion(9, "commutator", 300, commutator);
  return failures == 0 ? 0 : 1;
}
