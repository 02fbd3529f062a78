#pragma once

// Theorem checks over finite fragments: the Boolean-valued universe satisfies
// every catalog theorem with value 1, and in the projection-valued universe a
// bounded theorem holds at least to the commutator of its arguments.

#include "qst/evaluator.hpp"
#include "qst/formula.hpp"
#include "qst/lattice.hpp"
#include "qst/planes.hpp"
#include "qst/projection.hpp"
#include "qst/universe.hpp"

#include <bit>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace qst {

/// A theorem schema whose free variables are its parameters. When `pairs` is
/// set the schema also mentions z, bound to the constructed set {u: 1, v: 1}.
struct Schema {
  std::string name;
  std::string text;
  std::vector<std::string> params;
  bool theorem = true;
  bool pairs = false;

  Formula formula() const { return parse(text); }
  Formula core() const { return desugar(parse(text)); }
};

/// Bounded ZFC theorems: equality laws, extensionality, substitutivity,
/// tautologies, empty-domain and regularity instances, pairing.
const std::vector<Schema>& catalog();
/// Throws std::out_of_range for an unknown name.
const Schema& catalog_entry(std::string_view name);
/// "u = v": not a theorem; used to show the checks can return values below 1.
const Schema& control_schema();

enum class Verdict { pass, fail, not_applicable, not_a_theorem_control };
const char* verdict_name(Verdict v);

template <OrthoLattice L>
struct CheckReport {
  std::string schema;
  std::vector<std::string> args;  // set literals
  std::optional<typename L::Element> value;
  std::optional<typename L::Element> commutator;
  Verdict verdict = Verdict::not_applicable;
  std::string note;

  /// Everything needed to reproduce the instance.
  std::string witness(const L& lattice) const {
    std::string out = "schema " + schema;
    for (std::size_t k = 0; k < args.size(); ++k) out += "; arg" + std::to_string(k) + " = " + args[k];
    if (value) out += "; value = " + lattice.describe(*value);
    if (commutator) out += "; commutator = " + lattice.describe(*commutator);
    return out;
  }
};

/// Text literal of a set: "{key: value, ...}" with keys written the same way.
template <OrthoLattice L>
std::string qset_literal(const L& lattice, const QSet<L>& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : s.entries()) {
    if (!first) out += ", ";
    first = false;
    out += qset_literal(lattice, *e.key) + ": " + lattice.describe(e.value);
  }
  return out + "}";
}

/// Commutator of every lattice value occurring hereditarily in the arguments.
/// In a Boolean algebra everything commutes and the result is 1.
template <OrthoLattice L>
typename L::Element qset_commutator(const L& lattice, const std::vector<QSetPtr<L>>& args) {
  if constexpr (L::kind == LatticeKind::boolean) {
    return lattice.top();
  } else {
    std::vector<typename L::Element> values;
    for (const auto& a : args) collect_hereditary_values(lattice, *a, values);
    if (values.empty()) return lattice.top();
    return lattice_commutator(std::span<const typename L::Element>(values));
  }
}

namespace detail {

template <OrthoLattice L>
Environment<L> bind_schema(const L& lattice, const Schema& schema, const std::vector<QSetPtr<L>>& args) {
  if (args.size() != schema.params.size()) {
    throw std::invalid_argument("schema " + schema.name + " takes " + std::to_string(schema.params.size()) +
                                " arguments, got " + std::to_string(args.size()));
  }
  Environment<L> env;
  for (std::size_t k = 0; k < args.size(); ++k) env.bind(schema.params[k], args[k]);
  if (schema.pairs) env.bind("z", make_qset(lattice, {{args[0], lattice.top()}, {args[1], lattice.top()}}));
  return env;
}

template <OrthoLattice L>
std::vector<std::string> literals(const L& lattice, const std::vector<QSetPtr<L>>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) out.push_back(qset_literal(lattice, *a));
  return out;
}

}  // namespace detail

/// Value-1 check in a Boolean-valued universe.
template <OrthoLattice L>
CheckReport<L> check_scott_solovay(Session<L>& session, const Schema& schema, const std::vector<QSetPtr<L>>& args) {
  const L& lattice = session.lattice();
  CheckReport<L> r;
  r.schema = schema.name;
  r.args = detail::literals(lattice, args);
  if constexpr (L::kind != LatticeKind::boolean) {
    r.note = "value-1 check applies to Boolean lattices only";
    return r;
  } else {
    const Formula f = schema.formula();
    if (has_unbounded_quantifier(f)) {
      r.note = "unbounded quantifier";
      return r;
    }
    Evaluator<L> ev(session);
    r.value = ev.eval(f, detail::bind_schema(lattice, schema, args));
    if (!schema.theorem) {
      r.verdict = Verdict::not_a_theorem_control;
    } else {
      r.verdict = lattice.equal(*r.value, lattice.top()) ? Verdict::pass : Verdict::fail;
    }
    return r;
  }
}

/// [[phi(args)]] >= commutator(args).
template <OrthoLattice L>
CheckReport<L> check_transfer(Session<L>& session, const Schema& schema, const std::vector<QSetPtr<L>>& args) {
  const L& lattice = session.lattice();
  CheckReport<L> r;
  r.schema = schema.name;
  r.args = detail::literals(lattice, args);
  const Formula f = schema.formula();
  if (has_unbounded_quantifier(f)) {
    r.note = "unbounded quantifier";
    return r;
  }
  Evaluator<L> ev(session);
  r.value = ev.eval(f, detail::bind_schema(lattice, schema, args));
  r.commutator = qset_commutator(lattice, args);
  if (!schema.theorem) {
    r.verdict = Verdict::not_a_theorem_control;
  } else {
    r.verdict = leq(lattice, *r.commutator, *r.value) ? Verdict::pass : Verdict::fail;
  }
  return r;
}

enum class SuiteKind { scott_solovay, transfer };

template <OrthoLattice L>
struct SchemaSummary {
  std::string schema;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::size_t below_one = 0;  // instances whose value is not 1
  std::vector<CheckReport<L>> failed;  // first few
  double seconds = 0;
};

/// Runs every schema over every argument tuple drawn from the session's
/// fragment. Tuples are enumerated in lexicographic index order, the last
/// argument varying fastest (and evaluated in one batch).
template <OrthoLattice L>
std::vector<SchemaSummary<L>> run_suite(Session<L>& session, const std::vector<Schema>& schemas, SuiteKind kind,
                                        std::size_t keep_failures = 3) {
  const Fragment<L>* frag = session.fragment();
  if (!frag || !session.dense()) throw std::invalid_argument("suite runs need a session with a small attached fragment");
  const L& lattice = session.lattice();
  if (kind == SuiteKind::scott_solovay && L::kind != LatticeKind::boolean) {
    throw std::invalid_argument("value-1 suite needs a Boolean lattice");
  }
  const auto n = static_cast<std::uint32_t>(frag->size());
  const auto top = lattice.top();
  Evaluator<L> ev(session);

  // Hereditary values of each member, as indices into `distinct`, and a memo
  // of commutators keyed by the sorted index set.
  std::vector<typename L::Element> distinct;
  std::vector<std::vector<std::uint32_t>> hereditary(n);
  std::map<std::vector<std::uint32_t>, typename L::Element> commutator_memo;
  if (kind == SuiteKind::transfer) {
    for (std::uint32_t i = 0; i < n; ++i) {
      std::vector<typename L::Element> vals;
      collect_hereditary_values(lattice, *(*frag)[i], vals);
      for (const auto& v : vals) {
        std::uint32_t idx = 0;
        while (idx < distinct.size() && !lattice.equal(distinct[idx], v)) ++idx;
        if (idx == distinct.size()) distinct.push_back(v);
        hereditary[i].push_back(idx);
      }
    }
  }
  auto commutator_of = [&](std::span<const std::uint32_t> tuple) -> typename L::Element {
    if constexpr (L::kind == LatticeKind::boolean) {
      return lattice.top();
    } else {
      std::vector<std::uint32_t> key;
      for (auto i : tuple) key.insert(key.end(), hereditary[i].begin(), hereditary[i].end());
      std::sort(key.begin(), key.end());
      key.erase(std::unique(key.begin(), key.end()), key.end());
      if (auto it = commutator_memo.find(key); it != commutator_memo.end()) return it->second;
      typename L::Element c = lattice.top();
      if (!key.empty()) {
        std::vector<typename L::Element> vals;
        for (auto k : key) vals.push_back(distinct[k]);
        c = lattice_commutator(std::span<const typename L::Element>(vals));
      }
      commutator_memo.emplace(std::move(key), c);
      return c;
    }
  };

  std::optional<BooleanPlanes> planes;
  std::vector<SchemaSummary<L>> out;
  for (const Schema& schema : schemas) {
    const auto start = std::chrono::steady_clock::now();
    SchemaSummary<L> s;
    s.schema = schema.name;
    const Formula core = schema.core();
    const std::size_t arity = schema.params.size();
    auto record = [&](std::span<const std::uint32_t> tuple, const typename L::Element& value) {
      ++s.instances;
      const bool one = lattice.equal(value, lattice.top());
      if (!one) ++s.below_one;
      bool ok = one;
      typename L::Element comm = lattice.top();
      if (kind == SuiteKind::transfer && !one) {
        comm = commutator_of(tuple);
        ok = leq(lattice, comm, value);
      }
      if (!schema.theorem || ok) return;
      ++s.failures;
      if (s.failed.size() >= keep_failures) return;
      CheckReport<L> r;
      r.schema = schema.name;
      for (auto i : tuple) r.args.push_back(qset_literal(lattice, *(*frag)[i]));
      r.value = value;
      if (kind == SuiteKind::transfer) r.commutator = comm;
      r.verdict = Verdict::fail;
      s.failed.push_back(std::move(r));
    };

    if (arity == 0) throw std::invalid_argument("schema without parameters");
    std::vector<std::uint32_t> tuple(arity, 0);
    if (schema.pairs) {
      // z depends on the whole tuple, so evaluate one instance at a time.
      for (tuple[0] = 0; tuple[0] < n; ++tuple[0]) {
        for (tuple[1] = 0; tuple[1] < n; ++tuple[1]) {
          Environment<L> env =
              detail::bind_schema(lattice, schema, {(*frag)[tuple[0]], (*frag)[tuple[1]]});
          record(tuple, ev.eval(core, env));
          session.clear_scratch();
        }
      }
    } else if constexpr (std::is_same_v<L, BooleanAlgebra>) {
      if (!planes) planes.emplace(session);
      PlaneEvaluator pe(*planes, core, schema.params);
      const std::size_t w = planes->words();
      const int m = planes->atoms();
      while (true) {
        const auto out = pe.run(std::span<const std::uint32_t>(tuple.data(), arity - 1));
        bool all_top = true;
        for (int k = 0; k < m && all_top; ++k) {
          for (std::size_t i = 0; i + 1 < w && all_top; ++i) all_top = out[k * w + i] == ~std::uint64_t{0};
          all_top = all_top && out[(k + 1) * w - 1] == planes->tail_mask();
        }
        if (all_top) {
          s.instances += n;
        } else {
          for (std::uint32_t last = 0; last < n; ++last) {
            unsigned bits = 0;
            for (int k = 0; k < m; ++k) bits |= unsigned(out[k * w + last / 64] >> (last % 64) & 1) << k;
            tuple[arity - 1] = last;
            record(tuple, lattice.element(bits));
          }
        }
        std::size_t pos = arity - 1;
        while (pos > 0 && ++tuple[pos - 1] == n) tuple[--pos] = 0;
        if (pos == 0) break;
      }
    } else {
      const std::vector<std::string> fixed(schema.params.begin(), schema.params.end() - 1);
      while (true) {
        const auto batch = ev.eval_batch_indexed(core, fixed, std::span<const std::uint32_t>(tuple.data(), arity - 1),
                                                 schema.params.back());
        if (batch.uniform && lattice.equal(batch.scalar, top)) {
          s.instances += n;
        } else {
          for (std::uint32_t last = 0; last < n; ++last) {
            const auto& value = batch.uniform ? batch.scalar : batch.values[last];
            if (lattice.equal(value, top)) {
              ++s.instances;
              continue;
            }
            tuple[arity - 1] = last;
            record(tuple, value);
          }
        }
        std::size_t pos = arity - 1;
        while (pos > 0 && ++tuple[pos - 1] == n) tuple[--pos] = 0;
        if (pos == 0) break;
      }
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(s));
  }
  return out;
}

/// u, v, w and a one-variable formula phi(x) with [[u = v]] ^ [[phi(u)]] not
/// below [[phi(v)]].
template <OrthoLattice L>
struct EqualityViolation {
  std::string formula;  // phi(x), mentioning w
  QSetPtr<L> u, v, w;
  typename L::Element equal_uv, phi_u, phi_v;

  std::string describe(const L& lattice) const {
    return "phi(x) = " + formula + "; u = " + qset_literal(lattice, *u) + "; v = " + qset_literal(lattice, *v) +
           "; w = " + qset_literal(lattice, *w) + "; [[u = v]] = " + lattice.describe(equal_uv) +
           "; [[phi(u)]] = " + lattice.describe(phi_u) + "; [[phi(v)]] = " + lattice.describe(phi_v);
  }
};

/// Searches the fragment for a substitutivity failure with phi(x) one of
/// "x = w", "x in w", "w in x". Returns the first in index order, or nothing.
template <OrthoLattice L>
std::optional<EqualityViolation<L>> find_equality_axiom_violation(Session<L>& session) {
  const Fragment<L>* frag = session.fragment();
  if (!frag || !session.dense()) throw std::invalid_argument("violation search needs a small attached fragment");
  const L& lattice = session.lattice();
  const auto n = static_cast<std::uint32_t>(frag->size());
  struct Template {
    const char* text;
    typename L::Element (*eval)(Session<L>&, std::uint32_t x, std::uint32_t w);
  };
  const Template templates[] = {
      {"x = w", [](Session<L>& s, std::uint32_t x, std::uint32_t w) { return s.equality_at(x, w); }},
      {"x in w", [](Session<L>& s, std::uint32_t x, std::uint32_t w) { return s.membership_at(x, w); }},
      {"w in x", [](Session<L>& s, std::uint32_t x, std::uint32_t w) { return s.membership_at(w, x); }},
  };
  if constexpr (std::is_same_v<L, BooleanAlgebra>) {
    // Atomwise: on every atom of [[u = v]], the plane of phi(u) over w must
    // lie inside the plane of phi(v).
    const BooleanPlanes planes(session);
    const std::size_t words = planes.words();
    using PlaneOf = const std::uint64_t* (BooleanPlanes::*)(std::uint32_t, int) const;
    const PlaneOf plane_of[] = {&BooleanPlanes::eq_plane, &BooleanPlanes::mem_row_plane, &BooleanPlanes::mem_col_plane};
    for (std::size_t ti = 0; ti < 3; ++ti) {
      const auto plane = plane_of[ti];
      for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = 0; v < n; ++v) {
          const std::uint8_t e = planes.eq(u, v);
          for (int k = 0; k < planes.atoms(); ++k) {
            if (!(e >> k & 1)) continue;
            const std::uint64_t* pu = (planes.*plane)(u, k);
            const std::uint64_t* pv = (planes.*plane)(v, k);
            for (std::size_t i = 0; i < words; ++i) {
              const std::uint64_t bad = pu[i] & ~pv[i];
              if (!bad) continue;
              const auto w = static_cast<std::uint32_t>(i * 64 + std::countr_zero(bad));
              return EqualityViolation<L>{templates[ti].text, (*frag)[u], (*frag)[v], (*frag)[w],
                                          session.equality_at(u, v), templates[ti].eval(session, u, w),
                                          templates[ti].eval(session, v, w)};
            }
          }
        }
      }
    }
    return std::nullopt;
  }
  for (const auto& t : templates) {
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = 0; v < n; ++v) {
        const auto e = session.equality_at(u, v);
        if (lattice.equal(e, lattice.bottom())) continue;
        for (std::uint32_t w = 0; w < n; ++w) {
          const auto pu = t.eval(session, u, w);
          const auto pv = t.eval(session, v, w);
          if (!leq(lattice, lattice.meet(e, pu), pv)) {
            return EqualityViolation<L>{t.text, (*frag)[u], (*frag)[v], (*frag)[w], e, pu, pv};
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace qst
