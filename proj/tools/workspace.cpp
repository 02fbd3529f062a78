#include "workspace.hpp"

namespace qst::cli {

using nlohmann::json;

template <OrthoLattice L>
std::string Universe<L>::value_name(const Element& v) const {
  for (const auto& [n, x] : values) {
    if (lattice.equal(x, v)) return n;
  }
  return lattice.describe(v);
}

template <OrthoLattice L>
LiteralScope<L> Universe<L>::scope() const {
  LiteralScope<L> s;
  s.value = [this](const std::string& n) { return values.at(n); };
  s.set = [this](const std::string& n) { return sets.at(n); };
  return s;
}

template <OrthoLattice L>
typename L::Element resolve_value(const Universe<L>& u, const json& token) {
  if (token.is_string()) {
    std::string s = token.get<std::string>();
    int primes = 0;
    while (!s.empty() && s.back() == '\'') {
      s.pop_back();
      ++primes;
    }
    auto it = u.values.find(s);
    typename L::Element v = [&] {
      if (it != u.values.end()) return it->second;
      if (s == "0") return u.lattice.bottom();
      if (s == "1") return u.lattice.top();
      throw DataError("lattice " + u.name + " has no value named '" + s + "'");
    }();
    for (int k = 0; k < primes; ++k) v = u.lattice.ortho(v);
    return v;
  }
  return value_from_json(u.lattice, token);
}

template struct Universe<BooleanAlgebra>;
template struct Universe<ProjectionLattice>;
template BooleanAlgebra::Element resolve_value(const Universe<BooleanAlgebra>&, const json&);
template Projection resolve_value(const Universe<ProjectionLattice>&, const json&);

namespace {

const json& section(const json& doc, const char* name) {
  static const json empty = json::object();
  if (!doc.contains(name)) return empty;
  if (!doc[name].is_object()) throw DataError(std::string("section \"") + name + "\" must be an object");
  return doc[name];
}

std::string lattice_name_of(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("lattice") || !j["lattice"].is_string()) {
    throw DataError(what + " needs a \"lattice\" name");
  }
  return j["lattice"].get<std::string>();
}

}  // namespace

Workspace Workspace::from_json(const json& doc) {
  if (!doc.is_object()) throw DataError("session document must be an object");
  for (const auto& [key, _] : doc.items()) {
    static const std::set<std::string> known = {"lattices", "sets", "fragments", "observables", "states"};
    if (!known.count(key)) throw DataError("unknown session section \"" + key + "\"");
  }
  Workspace w;
  w.doc = doc;
  for (const auto& [name, j] : section(doc, "lattices").items()) w.load_lattice(name, j);
  w.load_sets(section(doc, "sets"));
  for (const auto& [name, j] : section(doc, "fragments").items()) w.load_fragment(name, j);
  for (const auto& [name, j] : section(doc, "observables").items()) {
    try {
      w.observables.emplace(name, spectral_from_json(j));
    } catch (const DataError& e) {
      throw DataError("observable " + name + ": " + e.what());
    }
  }
  for (const auto& [name, j] : section(doc, "states").items()) {
    try {
      w.states.emplace(name, state_from_json(j));
    } catch (const DataError& e) {
      throw DataError("state " + name + ": " + e.what());
    }
  }
  return w;
}

AnyUniverse& Workspace::lattice(const std::string& name) {
  auto it = lattices.find(name);
  if (it == lattices.end()) throw std::out_of_range("no lattice named '" + name + "'");
  return it->second;
}

AnyUniverse& Workspace::pick_lattice(const std::string& name) {
  if (!name.empty()) return lattice(name);
  if (lattices.size() != 1) throw std::out_of_range("several lattices are defined; choose one with --lattice");
  return lattices.begin()->second;
}

std::string Workspace::owner_of_set(const std::string& name) const {
  auto it = set_owner_.find(name);
  return it == set_owner_.end() ? "" : it->second;
}

std::string Workspace::owner_of_fragment(const std::string& name) const {
  auto it = fragment_owner_.find(name);
  return it == fragment_owner_.end() ? "" : it->second;
}

void Workspace::load_lattice(const std::string& name, const json& j) {
  const LatticeSpec spec = lattice_from_json(j);
  auto fill = [&](auto& u) {
    if (!j.contains("values")) return;
    if (!j["values"].is_object()) throw DataError("lattice " + name + ": \"values\" must be an object");
    for (const auto& [vn, vj] : j["values"].items()) {
      if (vn == "0" || vn == "1") throw DataError("lattice " + name + ": value names 0 and 1 are reserved");
      try {
        u.values.emplace(vn, resolve_value(u, vj));
      } catch (const DataError& e) {
        throw DataError("lattice " + name + ", value " + vn + ": " + e.what());
      }
    }
  };
  if (spec.kind == LatticeKind::boolean) {
    auto& u = std::get<Universe<BooleanAlgebra>>(
        lattices.emplace(name, AnyUniverse(std::in_place_index<0>, name, spec.boolean())).first->second);
    fill(u);
  } else {
    auto& u = std::get<Universe<ProjectionLattice>>(
        lattices.emplace(name, AnyUniverse(std::in_place_index<1>, name, spec.projection())).first->second);
    fill(u);
  }
}

void Workspace::load_sets(const json& sets) {
  for (const auto& [name, j] : sets.items()) {
    const std::string owner = lattice_name_of(j, "set " + name);
    if (!lattices.count(owner)) throw DataError("set " + name + " uses unknown lattice " + owner);
    if (!j.contains("literal") || !j["literal"].is_string()) throw DataError("set " + name + " needs a \"literal\"");
    set_owner_[name] = owner;
  }
  std::set<std::string> in_progress;
  // Builds a set and, first, the sets its literal names.
  std::function<void(const std::string&)> build = [&](const std::string& name) {
    auto& any = lattices.at(set_owner_.at(name));
    std::visit(
        [&](auto& u) {
          if (u.sets.count(name)) return;
          if (!in_progress.insert(name).second) throw DataError("set " + name + " is defined in terms of itself");
          auto scope = u.scope();
          auto plain = scope.set;
          scope.set = [&, plain](const std::string& ref) {
            if (set_owner_.count(ref) && set_owner_.at(ref) == u.name) build(ref);
            return plain(ref);
          };
          const std::string text = sets[name]["literal"].get<std::string>();
          try {
            u.sets.emplace(name, parse_qset_literal(u.lattice, text, scope));
          } catch (const LiteralError& e) {
            throw DataError("set " + name + ": " + e.what());
          }
          in_progress.erase(name);
        },
        any);
  };
  for (const auto& [name, _] : sets.items()) build(name);
}

void Workspace::load_fragment(const std::string& name, const json& j) {
  const std::string owner = lattice_name_of(j, "fragment " + name);
  if (!lattices.count(owner)) throw DataError("fragment " + name + " uses unknown lattice " + owner);
  fragment_owner_[name] = owner;
  std::visit(
      [&](auto& u) {
        using L = std::decay_t<decltype(u.lattice)>;
        try {
          if (j.contains("enumerate")) {
            const json& e = j["enumerate"];
            if (!e.contains("values") || !e["values"].is_array() || !e.contains("rank") || !e["rank"].is_number_integer()) {
              throw DataError("\"enumerate\" needs \"values\" and \"rank\"");
            }
            std::vector<typename L::Element> vals;
            for (const auto& t : e["values"]) vals.push_back(resolve_value(u, t));
            EnumerationLimits limits;
            if (e.contains("max_values")) limits.max_values = e["max_values"].get<std::size_t>();
            u.fragments.emplace(name, std::make_unique<Fragment<L>>(
                                          enumerate_fragment(u.lattice, vals, e["rank"].get<int>(), limits)));
          } else if (j.contains("sets")) {
            std::vector<QSetPtr<L>> members;
            for (const auto& s : j["sets"]) {
              const auto sn = s.get<std::string>();
              if (!u.sets.count(sn)) throw DataError("unknown set " + sn + " in lattice " + owner);
              members.push_back(u.sets.at(sn));
            }
            u.fragments.emplace(name, std::make_unique<Fragment<L>>(u.lattice, std::move(members)));
          } else if (j.contains("import")) {
            u.fragments.emplace(name, std::make_unique<Fragment<L>>(fragment_from_json(u.lattice, j["import"])));
          } else {
            throw DataError("needs \"enumerate\", \"sets\" or \"import\"");
          }
        } catch (const SizeGuardExceeded& e) {
          throw DataError("fragment " + name + ": " + e.what());
        } catch (const DataError& e) {
          throw DataError("fragment " + name + ": " + e.what());
        } catch (const std::invalid_argument& e) {
          throw DataError("fragment " + name + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
          throw DataError("fragment " + name + ": " + e.what());
        }
      },
      lattices.at(owner));
}

}  // namespace qst::cli
