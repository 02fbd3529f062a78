#pragma once

// The set-theory formula language.
//
//   formula  := implies
//   implies  := or ( "->" implies )?
//   or       := and ( "|" and )*
//   and      := unary ( "&" unary )*
//   unary    := "~" unary | quant | primary
//   quant    := ("forall" | "exists") ident ( "in" ident )? "." formula
//   primary  := "(" formula ")" | ident ( "=" | "in" ) ident
//   ident    := [a-z][a-z0-9_]*   (keywords excluded)
//
// A quantifier body extends as far right as possible.

#include <nlohmann/json_fwd.hpp>

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qst {

struct SourceSpan {
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourceSpan where)
      : std::runtime_error(std::to_string(where.line) + ":" + std::to_string(where.column) + ": " + message),
        span(where) {}
  SourceSpan span;
};

class UnboundVariable : public std::runtime_error {
 public:
  UnboundVariable(const std::string& name, SourceSpan where)
      : std::runtime_error(std::to_string(where.line) + ":" + std::to_string(where.column) +
                           ": unbound variable '" + name + "'"),
        name(name),
        span(where) {}
  std::string name;
  SourceSpan span;
};

enum class Op { Not, And, Or, Implies, ForallIn, ExistsIn, Forall, Exists, Eq, In };

struct Node;
using Formula = std::shared_ptr<const Node>;

/// One AST node. Atoms use lhs/rhs; quantifiers use var, bound (bounded
/// forms only) and children[0] as the body; connectives use children.
struct Node {
  Op op;
  std::string var;
  std::string bound;
  std::string lhs;
  std::string rhs;
  std::vector<Formula> children;
  SourceSpan span;
};

// Builders.
Formula f_not(Formula a, SourceSpan at = {});
Formula f_and(Formula a, Formula b, SourceSpan at = {});
Formula f_or(Formula a, Formula b, SourceSpan at = {});
Formula f_implies(Formula a, Formula b, SourceSpan at = {});
Formula f_forall_in(std::string var, std::string bound, Formula body, SourceSpan at = {});
Formula f_exists_in(std::string var, std::string bound, Formula body, SourceSpan at = {});
Formula f_forall(std::string var, Formula body, SourceSpan at = {});
Formula f_exists(std::string var, Formula body, SourceSpan at = {});
Formula f_eq(std::string lhs, std::string rhs, SourceSpan at = {});
Formula f_in(std::string lhs, std::string rhs, SourceSpan at = {});

Formula parse(std::string_view text);

/// Formula files: one formula per line; '#' starts a comment; blank lines skipped.
struct FormulaLine {
  int line;
  Formula formula;
};
std::vector<FormulaLine> parse_formula_file(std::string_view text);

/// Minimal-parenthesis rendering; parse(print(f)) is structurally equal to f.
std::string print(const Formula& f);

/// Structural equality, ignoring source spans.
bool same_formula(const Formula& a, const Formula& b);

/// Rewrites | , exists-in, exists and -> into ~, &, forall-in, forall:
///   a | b           := ~(~a & ~b)
///   exists x in u.a := ~(forall x in u . ~a)
///   exists x . a    := ~(forall x . ~a)
///   a -> b          := ~(a & ~(a & b))      (equals a' v (a ^ b) in any ortholattice)
Formula desugar(const Formula& f);

bool is_core(const Formula& f);
bool has_unbounded_quantifier(const Formula& f);
std::set<std::string> free_variables(const Formula& f);
/// Nesting of connectives and quantifiers; atoms have depth 0.
int depth(const Formula& f);

nlohmann::json to_json(const Formula& f);

}  // namespace qst
