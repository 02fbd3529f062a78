#pragma once

// JSON formats and the set-literal language.
//
//   lattice     {"kind":"boolean","atoms":n} | {"kind":"projection","dim":d}
//   matrix      rows of entries; an entry is "a/b" or ["a/b","c/d"] (re, im)
//   spectral    {"dim":d,"eigen":[{"value":"a/b","proj":matrix}, ...]}
//   state       {"exact":[entries]} | {"ray":[entries]} | {"decimal":[x or [re,im]]},
//               optionally with "dim"
//   value       boolean: atom mask (integer); projection: matrix, "0" or "1"
//   fragment    {"lattice":lattice,"members":[{"entries":[[key index, value], ...]}, ...]}
//               with every key index below the member's own index
//
// Set literals:
//   set   := "{" [ entry ("," entry)* ] "}" | "check" "(" pure ")" | name
//   entry := set [ ":" value ]            (value defaults to 1)
//   value := ( integer | name ) [ "'" ]    ("'" is the orthocomplement)

#include "qst/projection.hpp"
#include "qst/quantum_reals.hpp"
#include "qst/universe.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qst {

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A syntax error in a set literal, with the 1-based column.
class LiteralError : public std::runtime_error {
 public:
  LiteralError(const std::string& message, int column)
      : std::runtime_error("column " + std::to_string(column) + ": " + message), column(column) {}
  int column;
};

struct LatticeSpec {
  LatticeKind kind = LatticeKind::boolean;
  int size = 0;  // atoms or dimension

  BooleanAlgebra boolean() const { return BooleanAlgebra(size); }
  ProjectionLattice projection() const { return ProjectionLattice(size); }
  std::string describe() const;
};

LatticeSpec lattice_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LatticeSpec& spec);
inline LatticeSpec spec_of(const BooleanAlgebra& b) { return {LatticeKind::boolean, b.atom_count()}; }
inline LatticeSpec spec_of(const ProjectionLattice& l) { return {LatticeKind::projection, l.dim()}; }

GaussianRational entry_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GaussianRational& z);
/// A square matrix; when dim >= 0 its size must match.
ExactMatrix matrix_from_json(const nlohmann::json& j, int dim = -1);
nlohmann::json matrix_to_json(const ExactMatrix& m);
Projection projection_from_json(const nlohmann::json& j, int dim);

SpectralData spectral_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpectralData& sd);

StateVector state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StateVector& psi);

BooleanAlgebra::Element value_from_json(const BooleanAlgebra& b, const nlohmann::json& j);
Projection value_from_json(const ProjectionLattice& l, const nlohmann::json& j);
nlohmann::json value_to_json(const BooleanAlgebra& b, BooleanAlgebra::Element v);
nlohmann::json value_to_json(const ProjectionLattice& l, const Projection& v);

template <OrthoLattice L>
nlohmann::json fragment_to_json(const Fragment<L>& frag) {
  nlohmann::json members = nlohmann::json::array();
  for (std::uint32_t i = 0; i < frag.size(); ++i) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : frag.dom(i)) entries.push_back({e.key, value_to_json(frag.lattice(), e.value)});
    members.push_back({{"entries", std::move(entries)}});
  }
  return {{"lattice", to_json(spec_of(frag.lattice()))}, {"members", std::move(members)}};
}

template <OrthoLattice L>
Fragment<L> fragment_from_json(const L& lattice, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("members") || !j["members"].is_array()) {
    throw DataError("fragment needs a \"members\" array");
  }
  if (j.contains("lattice")) {
    const LatticeSpec s = lattice_from_json(j["lattice"]);
    if (s.kind != L::kind || s.size != lattice.carrier()) throw DataError("fragment lattice differs from " + spec_of(lattice).describe());
  }
  std::vector<QSetPtr<L>> built;
  for (const auto& m : j["members"]) {
    const auto& entries = m.is_object() && m.contains("entries") ? m["entries"] : m;
    if (!entries.is_array()) throw DataError("fragment member " + std::to_string(built.size()) + " has no entry list");
    std::vector<typename QSet<L>::Entry> out;
    for (const auto& e : entries) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned()) {
        throw DataError("fragment entries are [key index, value] pairs");
      }
      const auto key = e[0].get<std::size_t>();
      if (key >= built.size()) {
        throw DataError("fragment member " + std::to_string(built.size()) + " refers to later member " + std::to_string(key));
      }
      out.push_back({built[key], value_from_json(lattice, e[1])});
    }
    built.push_back(make_qset(lattice, std::move(out)));
  }
  return Fragment<L>(lattice, std::move(built));
}

/// Name lookups used while parsing a literal; either may throw.
template <OrthoLattice L>
struct LiteralScope {
  std::function<typename L::Element(const std::string&)> value;
  std::function<QSetPtr<L>(const std::string&)> set;
};

namespace detail {

template <OrthoLattice L>
class LiteralParser {
 public:
  LiteralParser(const L& lattice, std::string_view text, const LiteralScope<L>& scope)
      : l_(lattice), s_(text), scope_(scope) {}

  QSetPtr<L> parse_all() {
    auto out = set();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw LiteralError(msg, static_cast<int>(pos_) + 1); }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  QSetPtr<L> set() {
    skip();
    if (eat('{')) {
      std::vector<typename QSet<L>::Entry> entries;
      if (!eat('}')) {
        do {
          auto key = set();
          auto v = eat(':') ? value() : l_.top();
          entries.push_back({std::move(key), std::move(v)});
        } while (eat(','));
        expect('}');
      }
      return make_qset(l_, std::move(entries));
    }
    const std::size_t at = pos_;
    const std::string name = word();
    if (name.empty()) fail("expected a set");
    if (name == "check") {
      expect('(');
      skip();
      const std::size_t start = pos_;
      int depth = 0;
      while (pos_ < s_.size()) {
        if (s_[pos_] == '{') ++depth;
        if (s_[pos_] == '}' && --depth == 0) {
          ++pos_;
          break;
        }
        if (depth == 0 && s_[pos_] != '{') fail("check() takes a standard set such as { {}, {{}} }");
        ++pos_;
      }
      PureSet p;
      try {
        p = PureSet::parse(s_.substr(start, pos_ - start));
      } catch (const std::invalid_argument& e) {
        pos_ = start;
        fail(e.what());
      }
      expect(')');
      return check_embed(l_, p);
    }
    try {
      return scope_.set(name);
    } catch (const std::out_of_range&) {
      pos_ = at;
      fail("unknown set '" + name + "'");
    }
  }

  typename L::Element value() {
    skip();
    const std::size_t at = pos_;
    const std::string w = word();
    if (w.empty()) fail("expected a truth value");
    typename L::Element v = l_.top();
    try {
      if (std::isdigit(static_cast<unsigned char>(w[0]))) {
        v = value_from_json(l_, nlohmann::json(std::stoul(w)));
      } else {
        v = scope_.value(w);
      }
    } catch (const std::out_of_range&) {
      pos_ = at;
      fail("unknown truth value '" + w + "'");
    } catch (const DataError& e) {
      pos_ = at;
      fail(e.what());
    }
    while (eat('\'')) v = l_.ortho(v);
    return v;
  }

  const L& l_;
  std::string_view s_;
  const LiteralScope<L>& scope_;
  std::size_t pos_ = 0;
};

}  // namespace detail

template <OrthoLattice L>
QSetPtr<L> parse_qset_literal(const L& lattice, std::string_view text, const LiteralScope<L>& scope = {}) {
  LiteralScope<L> s = scope;
  if (!s.value) s.value = [](const std::string& n) -> typename L::Element { throw std::out_of_range(n); };
  if (!s.set) s.set = [](const std::string& n) -> QSetPtr<L> { throw std::out_of_range(n); };
  return detail::LiteralParser<L>(lattice, text, s).parse_all();
}

/// Inverse of parse_qset_literal for sets without named values: values are
/// written as masks (boolean) or left to `name_of`.
template <OrthoLattice L>
std::string qset_to_literal(const L& lattice, const QSet<L>& s,
                            const std::function<std::string(const typename L::Element&)>& name_of) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : s.entries()) {
    if (!first) out += ", ";
    first = false;
    out += qset_to_literal(lattice, *e.key, name_of);
    if (!lattice.equal(e.value, lattice.top())) out += ": " + name_of(e.value);
  }
  return out + "}";
}

}  // namespace qst
