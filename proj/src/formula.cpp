#include "qst/formula.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

namespace qst {

namespace {

Formula make(Node n) { return std::make_shared<const Node>(std::move(n)); }

// Lexer

enum class Tok { Ident, Forall, Exists, In, Not, And, Or, Arrow, Eq, Dot, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan at;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Forall: return "'forall'";
    case Tok::Exists: return "'exists'";
    case Tok::In: return "'in'";
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Eq: return "'='";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    const SourceSpan at{line, col};
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      advance(1);
      continue;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i;
      while (j < text.size() && ((text[j] >= 'a' && text[j] <= 'z') || (text[j] >= '0' && text[j] <= '9') ||
                                 text[j] == '_')) {
        ++j;
      }
      std::string word(text.substr(i, j - i));
      Tok kind = Tok::Ident;
      if (word == "forall") kind = Tok::Forall;
      if (word == "exists") kind = Tok::Exists;
      if (word == "in") kind = Tok::In;
      out.push_back({kind, std::move(word), at});
      advance(j - i);
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '~': kind = Tok::Not; break;
      case '&': kind = Tok::And; break;
      case '|': kind = Tok::Or; break;
      case '=': kind = Tok::Eq; break;
      case '.': kind = Tok::Dot; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          kind = Tok::Arrow;
          len = 2;
          break;
        }
        [[fallthrough]];
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }
    out.push_back({kind, std::string(text.substr(i, len)), at});
    advance(len);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

// Recursive-descent parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse_all() {
    Formula f = implies();
    if (peek().kind != Tok::End) fail("unexpected " + std::string(describe(peek().kind)));
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok k) {
    if (peek().kind != k) {
      fail(std::string("expected ") + describe(k) + ", found " + describe(peek().kind));
    }
    return take();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().at); }

  Formula implies() {
    Formula lhs = disjunction();
    const SourceSpan at = peek().at;
    if (accept(Tok::Arrow)) return f_implies(lhs, implies(), at);
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (peek().kind == Tok::Or) {
      const SourceSpan at = take().at;
      lhs = f_or(lhs, conjunction(), at);
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (peek().kind == Tok::And) {
      const SourceSpan at = take().at;
      lhs = f_and(lhs, unary(), at);
    }
    return lhs;
  }

  Formula unary() {
    const Token& t = peek();
    if (t.kind == Tok::Not) {
      const SourceSpan at = take().at;
      return f_not(unary(), at);
    }
    if (t.kind == Tok::Forall || t.kind == Tok::Exists) return quantifier();
    return primary();
  }

  Formula quantifier() {
    const Token q = take();
    const Token var = expect(Tok::Ident);
    std::string bound;
    if (accept(Tok::In)) bound = expect(Tok::Ident).text;
    expect(Tok::Dot);
    Formula body = implies();
    const bool universal = q.kind == Tok::Forall;
    if (bound.empty()) return universal ? f_forall(var.text, body, q.at) : f_exists(var.text, body, q.at);
    return universal ? f_forall_in(var.text, bound, body, q.at) : f_exists_in(var.text, bound, body, q.at);
  }

  Formula primary() {
    if (peek().kind == Tok::LParen) {
      take();
      Formula inner = implies();
      expect(Tok::RParen);
      return inner;
    }
    const Token lhs = expect(Tok::Ident);
    if (accept(Tok::Eq)) return f_eq(lhs.text, expect(Tok::Ident).text, lhs.at);
    if (accept(Tok::In)) return f_in(lhs.text, expect(Tok::Ident).text, lhs.at);
    fail("expected '=' or 'in' after '" + lhs.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Printer

int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Not: return 4;
    case Op::ForallIn:
    case Op::ExistsIn:
    case Op::Forall:
    case Op::Exists: return 0;
    case Op::Eq:
    case Op::In: return 5;
  }
  return 0;
}

bool is_quantifier(Op op) { return op == Op::ForallIn || op == Op::ExistsIn || op == Op::Forall || op == Op::Exists; }

void print_to(std::string& out, const Formula& f, bool open_right);

void print_child(std::string& out, const Formula& child, bool parens, bool open_right) {
  if (parens) {
    out += '(';
    print_to(out, child, true);
    out += ')';
  } else {
    print_to(out, child, open_right);
  }
}

void print_to(std::string& out, const Formula& f, bool open_right) {
  const Node& n = *f;
  switch (n.op) {
    case Op::Eq:
      out += n.lhs + " = " + n.rhs;
      return;
    case Op::In:
      out += n.lhs + " in " + n.rhs;
      return;
    case Op::Not: {
      out += '~';
      const Formula& c = n.children[0];
      const bool parens = is_quantifier(c->op) ? !open_right : precedence(c->op) != 4;
      print_child(out, c, parens, open_right);
      return;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      const int p = precedence(n.op);
      const bool right_assoc = n.op == Op::Implies;
      const Formula& l = n.children[0];
      const Formula& r = n.children[1];
      const bool lp = is_quantifier(l->op) || (right_assoc ? precedence(l->op) <= p : precedence(l->op) < p);
      const bool rp = (is_quantifier(r->op) && !open_right) ||
                      (!is_quantifier(r->op) && (right_assoc ? precedence(r->op) < p : precedence(r->op) <= p));
      print_child(out, l, lp, false);
      out += n.op == Op::And ? " & " : n.op == Op::Or ? " | " : " -> ";
      print_child(out, r, rp, open_right);
      return;
    }
    case Op::ForallIn:
    case Op::ExistsIn:
    case Op::Forall:
    case Op::Exists: {
      const bool wrap = !open_right;
      if (wrap) out += '(';
      out += (n.op == Op::ForallIn || n.op == Op::Forall) ? "forall " : "exists ";
      out += n.var;
      if (n.op == Op::ForallIn || n.op == Op::ExistsIn) out += " in " + n.bound;
      out += " . ";
      print_to(out, n.children[0], true);
      if (wrap) out += ')';
      return;
    }
  }
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "implies";
    case Op::ForallIn: return "forall_in";
    case Op::ExistsIn: return "exists_in";
    case Op::Forall: return "forall";
    case Op::Exists: return "exists";
    case Op::Eq: return "eq";
    case Op::In: return "in";
  }
  return "?";
}

void free_vars(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  const Node& n = *f;
  auto term = [&](const std::string& t) {
    if (!bound.contains(t)) out.insert(t);
  };
  switch (n.op) {
    case Op::Eq:
    case Op::In:
      term(n.lhs);
      term(n.rhs);
      return;
    case Op::ForallIn:
    case Op::ExistsIn:
      term(n.bound);
      [[fallthrough]];
    case Op::Forall:
    case Op::Exists: {
      const bool fresh = bound.insert(n.var).second;
      free_vars(n.children[0], bound, out);
      if (fresh) bound.erase(n.var);
      return;
    }
    default:
      for (const auto& c : n.children) free_vars(c, bound, out);
  }
}

}  // namespace

Formula f_not(Formula a, SourceSpan at) { return make({Op::Not, {}, {}, {}, {}, {std::move(a)}, at}); }
Formula f_and(Formula a, Formula b, SourceSpan at) {
  return make({Op::And, {}, {}, {}, {}, {std::move(a), std::move(b)}, at});
}
Formula f_or(Formula a, Formula b, SourceSpan at) {
  return make({Op::Or, {}, {}, {}, {}, {std::move(a), std::move(b)}, at});
}
Formula f_implies(Formula a, Formula b, SourceSpan at) {
  return make({Op::Implies, {}, {}, {}, {}, {std::move(a), std::move(b)}, at});
}
Formula f_forall_in(std::string var, std::string bound, Formula body, SourceSpan at) {
  return make({Op::ForallIn, std::move(var), std::move(bound), {}, {}, {std::move(body)}, at});
}
Formula f_exists_in(std::string var, std::string bound, Formula body, SourceSpan at) {
  return make({Op::ExistsIn, std::move(var), std::move(bound), {}, {}, {std::move(body)}, at});
}
Formula f_forall(std::string var, Formula body, SourceSpan at) {
  return make({Op::Forall, std::move(var), {}, {}, {}, {std::move(body)}, at});
}
Formula f_exists(std::string var, Formula body, SourceSpan at) {
  return make({Op::Exists, std::move(var), {}, {}, {}, {std::move(body)}, at});
}
Formula f_eq(std::string lhs, std::string rhs, SourceSpan at) {
  return make({Op::Eq, {}, {}, std::move(lhs), std::move(rhs), {}, at});
}
Formula f_in(std::string lhs, std::string rhs, SourceSpan at) {
  return make({Op::In, {}, {}, std::move(lhs), std::move(rhs), {}, at});
}

Formula parse(std::string_view text) { return Parser(lex(text)).parse_all(); }

std::vector<FormulaLine> parse_formula_file(std::string_view text) {
  std::vector<FormulaLine> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const bool blank = std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) {
      try {
        out.push_back({line_no, parse(line)});
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()).substr(std::string(e.what()).find(": ") + 2),
                         {line_no, e.span.column});
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string print(const Formula& f) {
  std::string out;
  print_to(out, f, true);
  return out;
}

bool same_formula(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->op != b->op || a->var != b->var || a->bound != b->bound || a->lhs != b->lhs || a->rhs != b->rhs ||
      a->children.size() != b->children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!same_formula(a->children[i], b->children[i])) return false;
  }
  return true;
}

Formula desugar(const Formula& f) {
  const Node& n = *f;
  switch (n.op) {
    case Op::Eq:
    case Op::In:
      return f;
    case Op::Not:
      return f_not(desugar(n.children[0]), n.span);
    case Op::And:
      return f_and(desugar(n.children[0]), desugar(n.children[1]), n.span);
    case Op::Or:
      return f_not(f_and(f_not(desugar(n.children[0])), f_not(desugar(n.children[1]))), n.span);
    case Op::Implies: {
      const Formula a = desugar(n.children[0]);
      const Formula b = desugar(n.children[1]);
      return f_not(f_and(a, f_not(f_and(a, b))), n.span);
    }
    case Op::ForallIn:
      return f_forall_in(n.var, n.bound, desugar(n.children[0]), n.span);
    case Op::ExistsIn:
      return f_not(f_forall_in(n.var, n.bound, f_not(desugar(n.children[0]))), n.span);
    case Op::Forall:
      return f_forall(n.var, desugar(n.children[0]), n.span);
    case Op::Exists:
      return f_not(f_forall(n.var, f_not(desugar(n.children[0]))), n.span);
  }
  return f;
}

bool is_core(const Formula& f) {
  switch (f->op) {
    case Op::Or:
    case Op::Implies:
    case Op::ExistsIn:
    case Op::Exists:
      return false;
    default:
      return std::all_of(f->children.begin(), f->children.end(), [](const Formula& c) { return is_core(c); });
  }
}

bool has_unbounded_quantifier(const Formula& f) {
  if (f->op == Op::Forall || f->op == Op::Exists) return true;
  return std::any_of(f->children.begin(), f->children.end(),
                     [](const Formula& c) { return has_unbounded_quantifier(c); });
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  free_vars(f, bound, out);
  return out;
}

int depth(const Formula& f) {
  if (f->children.empty()) return 0;
  int d = 0;
  for (const auto& c : f->children) d = std::max(d, depth(c));
  return d + 1;
}

nlohmann::json to_json(const Formula& f) {
  const Node& n = *f;
  nlohmann::json j;
  j["op"] = op_name(n.op);
  j["span"] = {{"line", n.span.line}, {"column", n.span.column}};
  switch (n.op) {
    case Op::Eq:
    case Op::In:
      j["lhs"] = n.lhs;
      j["rhs"] = n.rhs;
      break;
    case Op::ForallIn:
    case Op::ExistsIn:
      j["in"] = n.bound;
      [[fallthrough]];
    case Op::Forall:
    case Op::Exists:
      j["var"] = n.var;
      j["body"] = to_json(n.children[0]);
      break;
    default: {
      nlohmann::json args = nlohmann::json::array();
      for (const auto& c : n.children) args.push_back(to_json(c));
      j["args"] = std::move(args);
    }
  }
  return j;
}

}  // namespace qst
