#pragma once

// Truth values of formulas in a lattice-valued universe:
//   (1) [[~a]]               = [[a]]'
//   (2) [[a & b]]            = [[a]] ^ [[b]]
//   (3) [[forall x in u . a]] = meet over x in dom(u) of u(x) -> [[a(x)]]
//   (4) [[forall x . a]]     = meet over the attached fragment of [[a(x)]]
//   (8) [[u in v]], (9) [[u = v]] from the session.
// Defined connectives are removed by desugar() before evaluation.

#include "qst/formula.hpp"
#include "qst/lattice.hpp"
#include "qst/universe.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace qst {

class MissingFragment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names of sets, plus the fragment standing in for the whole universe under
/// unbounded quantifiers.
template <OrthoLattice L>
struct Environment {
  std::map<std::string, QSetPtr<L>> sets;
  const Fragment<L>* universe = nullptr;

  Environment& bind(const std::string& name, QSetPtr<L> s) {
    sets[name] = std::move(s);
    return *this;
  }
};

struct EvalNotes {
  /// Set when an unbounded quantifier ranged over a fragment instead of the universe.
  bool truncated_universal = false;
  std::vector<std::string> trace;
};

namespace detail {

// Elementwise lattice operations over value vectors. The boolean overloads
// work on raw masks so the loops vectorize.
template <OrthoLattice L>
void batch_ortho(const L& l, std::vector<typename L::Element>& a) {
  for (auto& x : a) x = l.ortho(x);
}
template <OrthoLattice L>
void batch_meet(const L& l, std::vector<typename L::Element>& acc, std::span<const typename L::Element> b) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = l.meet(acc[k], b[k]);
}
template <OrthoLattice L>
void batch_meet_scalar(const L& l, std::vector<typename L::Element>& acc, const typename L::Element& b) {
  for (auto& x : acc) x = l.meet(x, b);
}
/// acc[k] = acc[k] ^ (value -> body[k])
template <OrthoLattice L>
void batch_meet_arrow(const L& l, std::vector<typename L::Element>& acc, const typename L::Element& value,
                      std::span<const typename L::Element> body) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = l.meet(acc[k], sasaki_arrow(l, value, body[k]));
}

inline void batch_ortho(const BooleanAlgebra& l, std::vector<BooleanAlgebra::Element>& a) {
  const std::uint8_t full = l.full_mask();
  for (auto& x : a) x.bits = static_cast<std::uint8_t>(~x.bits & full);
}
inline void batch_meet(const BooleanAlgebra&, std::vector<BooleanAlgebra::Element>& acc,
                       std::span<const BooleanAlgebra::Element> b) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k].bits &= b[k].bits;
}
inline void batch_meet_scalar(const BooleanAlgebra&, std::vector<BooleanAlgebra::Element>& acc,
                              const BooleanAlgebra::Element& b) {
  for (auto& x : acc) x.bits &= b.bits;
}
inline void batch_meet_arrow(const BooleanAlgebra& l, std::vector<BooleanAlgebra::Element>& acc,
                             const BooleanAlgebra::Element& value, std::span<const BooleanAlgebra::Element> body) {
  // In a Boolean algebra a -> b = a' v b.
  const auto not_value = static_cast<std::uint8_t>(~value.bits & l.full_mask());
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k].bits &= static_cast<std::uint8_t>(not_value | body[k].bits);
}

}  // namespace detail

template <OrthoLattice L>
class Evaluator {
 public:
  using Element = typename L::Element;

  /// Per-member truth values; `uniform` means every member has `scalar`.
  struct Batch {
    bool uniform = true;
    Element scalar;
    std::vector<Element> values;
  };

  explicit Evaluator(Session<L>& session)
      : session_(session), lattice_(session.lattice()), top_(lattice_.top()), bottom_(lattice_.bottom()) {}

  /// Records "(n) formula = value" lines for each clause application (capped).
  void set_trace(bool on, std::size_t limit = 2000) {
    trace_ = on;
    trace_limit_ = limit;
  }
  const EvalNotes& notes() const { return notes_; }
  void reset_notes() { notes_ = {}; }

  /// Evaluates a closed (after substitution) formula; sugar is removed first.
  Element eval(const Formula& f, const Environment<L>& env) {
    const Formula core = is_core(f) ? f : desugar(f);
    Scope scope(env, session_);
    check_closed(core, scope);
    return eval_core(core, scope, env.universe);
  }

  /// a -> b as the Sasaki arrow of the two truth values.
  Element eval_implies(const Formula& a, const Formula& b, const Environment<L>& env) {
    return sasaki_arrow(lattice_, eval(a, env), eval(b, env));
  }

  /// Truth value of a core formula for every assignment of `var` to a member
  /// of the session's fragment (in fragment order). Requires dense tables.
  std::vector<Element> eval_over_fragment(const Formula& core, const Environment<L>& env, const std::string& var) {
    require_batchable(core);
    Scope scope(env, session_);
    return expand(run_batch(core, scope, env.universe, var));
  }

  /// As above, with the other free variables bound to fragment members by
  /// index: params[k] names fragment member args[k].
  std::vector<Element> eval_over_fragment(const Formula& core, const std::vector<std::string>& params,
                                          std::span<const std::uint32_t> args, const std::string& var) {
    return expand(eval_batch_indexed(core, params, args, var));
  }

  Batch eval_batch_indexed(const Formula& core, const std::vector<std::string>& params,
                           std::span<const std::uint32_t> args, const std::string& var) {
    require_batchable(core);
    if (params.size() != args.size()) throw std::invalid_argument("parameter and argument counts differ");
    const Fragment<L>& frag = *session_.fragment();
    Scope scope(session_);
    for (std::size_t k = 0; k < params.size(); ++k) scope.push(params[k], {&frag[args[k]], args[k]});
    return run_batch(core, scope, nullptr, var);
  }

 private:
  struct Binding {
    const QSetPtr<L>* set;
    std::int64_t index;  // dense fragment index or -1
  };

  // Variable stack; the environment sits at the bottom.
  class Scope {
   public:
    explicit Scope(Session<L>& session) : session_(session) {}
    Scope(const Environment<L>& env, Session<L>& session) : session_(session) {
      for (const auto& [name, s] : env.sets) {
        if (!s) throw std::invalid_argument("environment binds '" + name + "' to nothing");
        push(name, {&s, index_of(*s)});
      }
    }
    void push(const std::string& name, Binding b) { stack_.emplace_back(&name, b); }
    void pop() { stack_.pop_back(); }
    const Binding* find(const std::string& name) const {
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        if (*it->first == name) return &it->second;
      }
      return nullptr;
    }
    std::int64_t index_of(const QSet<L>& s) const {
      const auto i = session_.dense_index(s);
      return i ? static_cast<std::int64_t>(*i) : -1;
    }

   private:
    Session<L>& session_;
    std::vector<std::pair<const std::string*, Binding>> stack_;
  };

  void check_closed(const Formula& f, const Scope& scope) const {
    std::vector<std::string> locals;
    auto rec = [&](auto&& self, const Formula& g) -> void {
      auto bound = [&](const std::string& name) {
        return std::find(locals.begin(), locals.end(), name) != locals.end() || scope.find(name) != nullptr;
      };
      const Node& n = *g;
      switch (n.op) {
        case Op::Eq:
        case Op::In:
          if (!bound(n.lhs)) throw UnboundVariable(n.lhs, n.span);
          if (!bound(n.rhs)) throw UnboundVariable(n.rhs, n.span);
          return;
        case Op::ForallIn:
        case Op::ExistsIn:
          if (!bound(n.bound)) throw UnboundVariable(n.bound, n.span);
          [[fallthrough]];
        case Op::Forall:
        case Op::Exists:
          locals.push_back(n.var);
          self(self, n.children[0]);
          locals.pop_back();
          return;
        default:
          for (const auto& c : n.children) self(self, c);
      }
    };
    rec(rec, f);
  }

  static const Binding& lookup(const Scope& scope, const std::string& name, const Node& n) {
    const Binding* b = scope.find(name);
    if (!b) throw UnboundVariable(name, n.span);
    return *b;
  }

  const Fragment<L>& require_universe(const Fragment<L>* universe, const Node& n) {
    const Fragment<L>* frag = universe ? universe : session_.fragment();
    if (!frag) {
      throw MissingFragment(std::to_string(n.span.line) + ":" + std::to_string(n.span.column) +
                            ": unbounded quantifier over '" + n.var + "' needs a fragment");
    }
    notes_.truncated_universal = true;
    return *frag;
  }

  Element atom(const Node& n, const Binding& a, const Binding& b) {
    if (a.index >= 0 && b.index >= 0) {
      const auto i = static_cast<std::uint32_t>(a.index);
      const auto j = static_cast<std::uint32_t>(b.index);
      return n.op == Op::Eq ? session_.equality_at(i, j) : session_.membership_at(i, j);
    }
    return n.op == Op::Eq ? session_.equality(*a.set, *b.set) : session_.membership(*a.set, *b.set);
  }

  void record(int clause, const Formula& f, const Element& v) {
    if (!trace_ || notes_.trace.size() >= trace_limit_) return;
    notes_.trace.push_back("(" + std::to_string(clause) + ") " + print(f) + " = " + lattice_.describe(v));
  }

  Element eval_core(const Formula& f, Scope& scope, const Fragment<L>* universe) {
    const Node& n = *f;
    switch (n.op) {
      case Op::Not: {
        Element v = lattice_.ortho(eval_core(n.children[0], scope, universe));
        record(1, f, v);
        return v;
      }
      case Op::And: {
        const Element a = eval_core(n.children[0], scope, universe);
        // Short-circuit only when not tracing, so traces show every clause.
        Element v = !trace_ && is_bottom(a) ? a : lattice_.meet(a, eval_core(n.children[1], scope, universe));
        record(2, f, v);
        return v;
      }
      case Op::ForallIn: {
        const Binding domain = lookup(scope, n.bound, n);
        Element acc = lattice_.top();
        if (domain.index >= 0) {
          const Fragment<L>& frag = *session_.fragment();
          for (const auto& e : frag.dom(static_cast<std::uint32_t>(domain.index))) {
            if (!trace_ && is_bottom(e.value)) continue;  // 0 -> anything = 1
            scope.push(n.var, {&frag[e.key], e.key});
            acc = lattice_.meet(acc, sasaki_arrow(lattice_, e.value, eval_core(n.children[0], scope, universe)));
            scope.pop();
          }
        } else {
          for (const auto& e : (*domain.set)->entries()) {
            if (!trace_ && is_bottom(e.value)) continue;
            scope.push(n.var, {&e.key, scope.index_of(*e.key)});
            acc = lattice_.meet(acc, sasaki_arrow(lattice_, e.value, eval_core(n.children[0], scope, universe)));
            scope.pop();
          }
        }
        record(3, f, acc);
        return acc;
      }
      case Op::Forall: {
        const Fragment<L>& frag = require_universe(universe, n);
        Element acc = lattice_.top();
        for (const auto& member : frag.members()) {
          scope.push(n.var, {&member, scope.index_of(*member)});
          acc = lattice_.meet(acc, eval_core(n.children[0], scope, universe));
          scope.pop();
        }
        record(4, f, acc);
        return acc;
      }
      case Op::Eq:
      case Op::In: {
        Element v = atom(n, lookup(scope, n.lhs, n), lookup(scope, n.rhs, n));
        record(n.op == Op::Eq ? 9 : 8, f, v);
        return v;
      }
      default:
        throw std::logic_error("evaluator reached a defined connective; desugar first");
    }
  }

  // Batched evaluation over the fragment.

  void require_batchable(const Formula& core) const {
    if (!session_.dense()) throw std::logic_error("batched evaluation needs a session with an attached fragment");
    if (!is_core(core)) throw std::invalid_argument("batched evaluation expects a desugared formula");
  }

  std::vector<Element> expand(Batch b) const {
    if (b.uniform) return std::vector<Element>(session_.fragment()->size(), b.scalar);
    return std::move(b.values);
  }

  Batch run_batch(const Formula& core, Scope& scope, const Fragment<L>* universe, const std::string& var) {
    if (prepared_ != core.get() || batch_var_ != var) {
      scope.push(var, {nullptr, -1});
      check_closed(core, scope);
      scope.pop();
      batch_var_ = var;
      depends_.clear();
      mark_dependence(core);
      prepared_ = core.get();
      prepared_root_ = core;
    }
    return eval_batch(core, scope, universe);
  }

  // Records which nodes have the batch variable free.
  bool mark_dependence(const Formula& f) {
    const Node& n = *f;
    bool dep = false;
    switch (n.op) {
      case Op::Eq:
      case Op::In:
        dep = n.lhs == batch_var_ || n.rhs == batch_var_;
        break;
      case Op::ForallIn:
      case Op::Forall: {
        const bool body = mark_dependence(n.children[0]);
        dep = n.bound == batch_var_ || (body && n.var != batch_var_);
        break;
      }
      default:
        for (const auto& c : n.children) dep = mark_dependence(c) || dep;
    }
    depends_[f.get()] = dep;
    return dep;
  }

  bool mentions_batch_var(const Formula& f) const { return depends_.at(f.get()); }

  Batch per_member(const Formula& f, Scope& scope, const Fragment<L>* universe) {
    const Fragment<L>& frag = *session_.fragment();
    Batch out;
    out.uniform = false;
    out.values.reserve(frag.size());
    for (std::uint32_t k = 0; k < frag.size(); ++k) {
      scope.push(batch_var_, {&frag[k], k});
      out.values.push_back(eval_core(f, scope, universe));
      scope.pop();
    }
    return out;
  }

  bool is_bottom(const Element& x) const { return lattice_.equal(x, bottom_); }
  bool is_top(const Element& x) const { return lattice_.equal(x, top_); }

  // acc ^= x, keeping uniform batches scalar as long as possible.
  void meet_into(Batch& acc, Batch&& x) {
    if (x.uniform) {
      if (is_top(x.scalar)) return;
      if (acc.uniform) {
        acc.scalar = lattice_.meet(acc.scalar, x.scalar);
      } else {
        detail::batch_meet_scalar(lattice_, acc.values, x.scalar);
      }
      return;
    }
    if (acc.uniform) {
      if (!is_top(acc.scalar)) detail::batch_meet_scalar(lattice_, x.values, acc.scalar);
      acc = std::move(x);
      return;
    }
    detail::batch_meet(lattice_, acc.values, std::span<const Element>(x.values));
  }

  Batch eval_batch(const Formula& f, Scope& scope, const Fragment<L>* universe) {
    if (!mentions_batch_var(f)) return {true, eval_core(f, scope, universe), {}};
    const Node& n = *f;
    switch (n.op) {
      case Op::Not: {
        Batch b = eval_batch(n.children[0], scope, universe);
        if (b.uniform) return {true, lattice_.ortho(b.scalar), {}};
        detail::batch_ortho(lattice_, b.values);
        return b;
      }
      case Op::And: {
        Batch a = eval_batch(n.children[0], scope, universe);
        if (a.uniform && is_bottom(a.scalar)) return a;
        meet_into(a, eval_batch(n.children[1], scope, universe));
        return a;
      }
      case Op::ForallIn: {
        if (n.bound == batch_var_ || n.var == batch_var_) return per_member(f, scope, universe);
        const Binding domain = lookup(scope, n.bound, n);
        Batch acc{true, top_, {}};
        auto step = [&](const Element& value, Batch&& body) {
          if (body.uniform) {
            meet_into(acc, {true, sasaki_arrow(lattice_, value, body.scalar), {}});
          } else if (acc.uniform) {
            std::vector<Element> v(session_.fragment()->size(), acc.scalar);
            detail::batch_meet_arrow(lattice_, v, value, std::span<const Element>(body.values));
            acc = {false, {}, std::move(v)};
          } else {
            detail::batch_meet_arrow(lattice_, acc.values, value, std::span<const Element>(body.values));
          }
        };
        auto done = [&] { return acc.uniform && is_bottom(acc.scalar); };
        if (domain.index >= 0) {
          const Fragment<L>& frag = *session_.fragment();
          for (const auto& e : frag.dom(static_cast<std::uint32_t>(domain.index))) {
            if (is_bottom(e.value)) continue;  // 0 -> anything = 1
            scope.push(n.var, {&frag[e.key], e.key});
            step(e.value, eval_batch(n.children[0], scope, universe));
            scope.pop();
            if (done()) break;
          }
        } else {
          for (const auto& e : (*domain.set)->entries()) {
            if (is_bottom(e.value)) continue;
            scope.push(n.var, {&e.key, scope.index_of(*e.key)});
            step(e.value, eval_batch(n.children[0], scope, universe));
            scope.pop();
            if (done()) break;
          }
        }
        return acc;
      }
      case Op::Forall: {
        if (n.var == batch_var_) return per_member(f, scope, universe);
        const Fragment<L>& frag = require_universe(universe, n);
        Batch acc{true, top_, {}};
        for (const auto& member : frag.members()) {
          scope.push(n.var, {&member, scope.index_of(*member)});
          meet_into(acc, eval_batch(n.children[0], scope, universe));
          scope.pop();
          if (acc.uniform && is_bottom(acc.scalar)) break;
        }
        return acc;
      }
      case Op::Eq:
      case Op::In: {
        const bool lhs_batched = n.lhs == batch_var_;
        const bool rhs_batched = n.rhs == batch_var_;
        if (lhs_batched && rhs_batched) return per_member(f, scope, universe);
        const Binding other = lookup(scope, lhs_batched ? n.rhs : n.lhs, n);
        if (other.index < 0) return per_member(f, scope, universe);
        const auto o = static_cast<std::uint32_t>(other.index);
        std::span<const Element> row;
        if (n.op == Op::Eq) {
          row = session_.equality_row(o);  // symmetric
        } else {
          row = lhs_batched ? session_.membership_column(o) : session_.membership_row(o);
        }
        return {false, {}, std::vector<Element>(row.begin(), row.end())};
      }
      default:
        throw std::logic_error("evaluator reached a defined connective; desugar first");
    }
  }

  Session<L>& session_;
  L lattice_;
  Element top_;
  Element bottom_;
  EvalNotes notes_;
  bool trace_ = false;
  std::size_t trace_limit_ = 2000;
  std::string batch_var_;
  const Node* prepared_ = nullptr;
  Formula prepared_root_;  // keeps prepared_ alive
  std::unordered_map<const Node*, bool> depends_;
};

/// Convenience for one closed formula in a fresh session.
template <OrthoLattice L>
typename L::Element evaluate(const L& lattice, const Formula& f, const Environment<L>& env) {
  Session<L> session(lattice);
  if (env.universe) session.attach(*env.universe);
  Evaluator<L> ev(session);
  return ev.eval(f, env);
}

}  // namespace qst
