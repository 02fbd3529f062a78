#include "qst/universe.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <set>

namespace qst {

std::string PureSet::canonical() const {
  std::set<std::string> parts;
  for (const auto& m : members) parts.insert(m.canonical());
  std::string out = "{";
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += ',';
    out += p;
    first = false;
  }
  out += '}';
  return out;
}

int PureSet::depth() const {
  int d = 0;
  for (const auto& m : members) d = std::max(d, m.depth() + 1);
  return d;
}

PureSet PureSet::numeral(int n) {
  PureSet out;
  for (int k = 0; k < n; ++k) out.members.push_back(numeral(k));
  return out;
}

PureSet PureSet::parse(std::string_view text) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n')) ++pos;
  };
  auto rec = [&](auto&& self) -> PureSet {
    skip();
    if (pos >= text.size() || text[pos] != '{') {
      throw std::invalid_argument("expected '{' at offset " + std::to_string(pos));
    }
    ++pos;
    PureSet s;
    skip();
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
      return s;
    }
    while (true) {
      s.members.push_back(self(self));
      skip();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < text.size() && text[pos] == '}') {
        ++pos;
        return s;
      }
      throw std::invalid_argument("expected ',' or '}' at offset " + std::to_string(pos));
    }
  };
  PureSet s = rec(rec);
  skip();
  if (pos != text.size()) throw std::invalid_argument("trailing input at offset " + std::to_string(pos));
  return s;
}

std::string stage_cardinality(std::size_t values, int rank) {
  mpz_class size = 0;
  for (int k = 0; k < rank; ++k) {
    if (size > 1'000'000) return std::to_string(values + 1) + "^" + size.get_str();
    mpz_class next;
    mpz_ui_pow_ui(next.get_mpz_t(), values + 1, size.get_ui());
    size = next;
  }
  return size.get_str();
}

}  // namespace qst
