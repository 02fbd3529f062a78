#include "qst/verification.hpp"

namespace qst {

const std::vector<Schema>& catalog() {
  static const std::vector<Schema> schemas = {
      {"eq-reflexivity", "u = u", {"u"}},
      {"eq-symmetry", "u = v -> v = u", {"u", "v"}},
      {"eq-transitivity", "u = v & v = w -> u = w", {"u", "v", "w"}},
      {"extensionality", "(forall x in u . x in v) & (forall x in v . x in u) -> u = v", {"u", "v"}},
      {"member-substitution", "u = v & u in w -> v in w", {"u", "v", "w"}},
      {"set-substitution", "u = v & w in u -> w in v", {"u", "v", "w"}},
      {"subset-transitivity",
       "(forall x in u . x in v) & (forall x in v . x in w) -> (forall x in u . x in w)",
       {"u", "v", "w"}},
      {"conjunction-elimination", "u in v & v in w -> u in v", {"u", "v", "w"}},
      {"excluded-middle", "u in v | ~u in v", {"u", "v"}},
      {"empty-domain", "(forall x in u . ~x = x) -> (forall y in u . y in v)", {"u", "v"}},
      {"regularity-instance", "~u in u", {"u"}},
      {"pairing", "u in z & v in z & (forall x in z . x = u | x = v)", {"u", "v"}, true, true},
  };
  return schemas;
}

const Schema& catalog_entry(std::string_view name) {
  for (const auto& s : catalog()) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("no catalog schema named '" + std::string(name) + "'");
}

const Schema& control_schema() {
  static const Schema s{"control-equality", "u = v", {"u", "v"}, false};
  return s;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
    case Verdict::not_a_theorem_control: return "not-a-theorem-control";
  }
  return "?";
}

}  // namespace qst
