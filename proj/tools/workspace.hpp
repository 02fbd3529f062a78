#pragma once

// Named lattices, values, sets, fragments, observables and states loaded from
// a session document:
//
//   {"lattices":    {"B": {"kind":"boolean","atoms":2,"values":{"a":1}}, ...},
//    "sets":        {"u": {"lattice":"B","literal":"{ {}: a }"}, ...},
//    "fragments":   {"F": {"lattice":"B","enumerate":{"values":[0,"a",3],"rank":3}},
//                    "G": {"lattice":"B","sets":["u"]},
//                    "H": {"lattice":"B","import":<fragment document>}},
//    "observables": {"A": <spectral document>},
//    "states":      {"psi": <state document>}}
//
// Value tokens in the document are truth-value documents or names of values
// (a trailing ' takes the orthocomplement). Set literals may refer to other
// sets of the same lattice by name, in any order.

#include "qst/io.hpp"
#include "qst/quantum_reals.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>

namespace qst::cli {

template <OrthoLattice L>
struct Universe {
  using Element = typename L::Element;

  std::string name;
  L lattice;
  std::map<std::string, Element> values;
  std::map<std::string, QSetPtr<L>> sets;
  std::map<std::string, std::unique_ptr<Fragment<L>>> fragments;

  explicit Universe(std::string n, L l) : name(std::move(n)), lattice(std::move(l)) {}

  /// Name of a value if it has one, else its rendering.
  std::string value_name(const Element& v) const;
  LiteralScope<L> scope() const;
};

using AnyUniverse = std::variant<Universe<BooleanAlgebra>, Universe<ProjectionLattice>>;

class Workspace {
 public:
  Workspace() = default;
  /// Throws DataError on any malformed section.
  static Workspace from_json(const nlohmann::json& doc);

  nlohmann::json doc = nlohmann::json::object();
  std::map<std::string, AnyUniverse> lattices;
  std::map<std::string, SpectralData> observables;
  std::map<std::string, StateVector> states;

  AnyUniverse& lattice(const std::string& name);
  /// The lattice owning a set or fragment name, if any.
  std::string owner_of_set(const std::string& name) const;
  std::string owner_of_fragment(const std::string& name) const;
  /// The named lattice, or the only one when name is empty.
  AnyUniverse& pick_lattice(const std::string& name);

 private:
  std::map<std::string, std::string> set_owner_, fragment_owner_;

  void load_lattice(const std::string& name, const nlohmann::json& j);
  void load_sets(const nlohmann::json& sets);
  void load_fragment(const std::string& name, const nlohmann::json& j);
};

/// A value token: a truth-value document or a (possibly primed) name.
template <OrthoLattice L>
typename L::Element resolve_value(const Universe<L>& u, const nlohmann::json& token);

}  // namespace qst::cli
