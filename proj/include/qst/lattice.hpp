#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <ranges>
#include <stdexcept>
#include <string>
#include <vector>

namespace qst {

class LatticeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class LatticeKind { boolean, projection };

/// A finite (hence complete) orthocomplemented lattice. Models carry their
/// element type and the operations used by the truth-value clauses.
template <typename L>
concept OrthoLattice = requires(const L& l, const typename L::Element& a, const typename L::Element& b) {
  typename L::Element;
  { L::kind } -> std::convertible_to<LatticeKind>;
  { l.carrier() } -> std::convertible_to<int>;
  { l.bottom() } -> std::same_as<typename L::Element>;
  { l.top() } -> std::same_as<typename L::Element>;
  { l.meet(a, b) } -> std::same_as<typename L::Element>;
  { l.join(a, b) } -> std::same_as<typename L::Element>;
  { l.ortho(a) } -> std::same_as<typename L::Element>;
  { l.equal(a, b) } -> std::same_as<bool>;
  { l.contains(a) } -> std::same_as<bool>;
  { l.describe(a) } -> std::convertible_to<std::string>;
};

/// Powerset of n <= 8 atoms; elements are atom bitmasks.
class BooleanAlgebra {
 public:
  struct Element {
    std::uint8_t bits = 0;
    std::uint8_t atoms = 0;

    friend bool operator==(const Element&, const Element&) = default;
  };

  static constexpr LatticeKind kind = LatticeKind::boolean;
  static constexpr int max_atoms = 8;

  explicit BooleanAlgebra(int atoms) : atoms_(static_cast<std::uint8_t>(atoms)) {
    if (atoms < 0 || atoms > max_atoms) {
      throw std::invalid_argument("boolean algebra supports 0..8 atoms, got " + std::to_string(atoms));
    }
  }

  int carrier() const { return atoms_; }
  int atom_count() const { return atoms_; }
  std::size_t size() const { return std::size_t{1} << atoms_; }
  std::uint8_t full_mask() const { return static_cast<std::uint8_t>((1u << atoms_) - 1u); }

  Element bottom() const { return {0, atoms_}; }
  Element top() const { return {full_mask(), atoms_}; }
  Element element(unsigned mask) const {
    if (mask > full_mask()) throw std::out_of_range("mask outside the algebra: " + std::to_string(mask));
    return {static_cast<std::uint8_t>(mask), atoms_};
  }
  Element atom(int i) const {
    if (i < 0 || i >= atoms_) throw std::out_of_range("no atom " + std::to_string(i));
    return {static_cast<std::uint8_t>(1u << i), atoms_};
  }

  Element meet(Element a, Element b) const {
    check(a);
    check(b);
    return {static_cast<std::uint8_t>(a.bits & b.bits), atoms_};
  }
  Element join(Element a, Element b) const {
    check(a);
    check(b);
    return {static_cast<std::uint8_t>(a.bits | b.bits), atoms_};
  }
  Element ortho(Element a) const {
    check(a);
    return {static_cast<std::uint8_t>(~a.bits & full_mask()), atoms_};
  }
  bool equal(Element a, Element b) const {
    check(a);
    check(b);
    return a.bits == b.bits;
  }
  bool contains(Element a) const { return a.atoms == atoms_ && a.bits <= full_mask(); }

  /// Every element, in mask order.
  std::vector<Element> elements() const {
    std::vector<Element> out;
    out.reserve(size());
    for (unsigned m = 0; m < size(); ++m) out.push_back(element(m));
    return out;
  }

  std::string describe(Element a) const;

  friend bool operator==(const BooleanAlgebra&, const BooleanAlgebra&) = default;

 private:
  void check(Element a) const {
    if (a.atoms != atoms_) {
      throw LatticeMismatch("element of a " + std::to_string(a.atoms) + "-atom algebra used in a " +
                            std::to_string(atoms_) + "-atom algebra");
    }
  }

  std::uint8_t atoms_;
};

static_assert(OrthoLattice<BooleanAlgebra>);

// Derived operations shared by every lattice model.

template <OrthoLattice L>
bool leq(const L& l, const typename L::Element& a, const typename L::Element& b) {
  return l.equal(l.meet(a, b), a);
}

/// Infimum of a finite family; the empty meet is 1.
template <OrthoLattice L, std::ranges::input_range R>
typename L::Element big_meet(const L& l, R&& family) {
  typename L::Element acc = l.top();
  for (const auto& x : family) acc = l.meet(acc, x);
  return acc;
}

/// Supremum of a finite family; the empty join is 0.
template <OrthoLattice L, std::ranges::input_range R>
typename L::Element big_join(const L& l, R&& family) {
  typename L::Element acc = l.bottom();
  for (const auto& x : family) acc = l.join(acc, x);
  return acc;
}

/// a -> b = a' v (a ^ b).
template <OrthoLattice L>
typename L::Element sasaki_arrow(const L& l, const typename L::Element& a, const typename L::Element& b) {
  return l.join(l.ortho(a), l.meet(a, b));
}

/// (a ^ b) v (a' ^ b').
template <OrthoLattice L>
typename L::Element biconditional(const L& l, const typename L::Element& a, const typename L::Element& b) {
  return l.join(l.meet(a, b), l.meet(l.ortho(a), l.ortho(b)));
}

/// Compatibility: a = (a ^ b) v (a ^ b').
template <OrthoLattice L>
bool commutes(const L& l, const typename L::Element& a, const typename L::Element& b) {
  return l.equal(a, l.join(l.meet(a, b), l.meet(a, l.ortho(b))));
}

// Law report

struct LawResult {
  std::string law;
  bool holds = true;
  std::size_t checked = 0;
  std::optional<std::string> witness;  // first counterexample, rendered
};

struct LawReport {
  std::vector<LawResult> laws;
  bool ortholattice_ok = true;   // involution, contradiction, excluded middle, contraposition, De Morgan
  bool orthomodular_ok = true;
  bool distributive = true;
  std::optional<std::string> distributivity_witness;

  const LawResult* find(const std::string& name) const {
    for (const auto& r : laws) {
      if (r.law == name) return &r;
    }
    return nullptr;
  }
};

struct LawOptions {
  bool distributivity = true;  // the triple loop dominates the cost on large samples
};

/// Checks the ortholattice laws, De Morgan, orthomodularity and both
/// distributive laws over every pair/triple drawn from sample. Distributivity
/// failures are reported, not treated as errors.
template <OrthoLattice L>
LawReport verify_laws(const L& l, const std::vector<typename L::Element>& sample, LawOptions opts = {}) {
  LawReport rep;
  rep.laws.reserve(16);  // law() hands out references into this vector
  auto law = [&](const std::string& name) -> LawResult& {
    rep.laws.push_back({name, true, 0, std::nullopt});
    return rep.laws.back();
  };
  auto show = [&](std::initializer_list<const typename L::Element*> xs) {
    std::string s;
    for (const auto* x : xs) {
      if (!s.empty()) s += " ; ";
      s += l.describe(*x);
    }
    return s;
  };
  auto fail = [&](LawResult& r, std::string w) {
    if (r.holds) r.witness = std::move(w);
    r.holds = false;
  };
  const auto top = l.top();
  const auto bot = l.bottom();

  {
    LawResult& bounds = law("bounds");
    LawResult& inv = law("involution");
    LawResult& contra = law("non-contradiction");
    LawResult& lem = law("excluded-middle");
    for (const auto& x : sample) {
      ++bounds.checked;
      if (!leq(l, bot, x) || !leq(l, x, top)) fail(bounds, show({&x}));
      const auto xo = l.ortho(x);
      ++inv.checked;
      if (!l.equal(l.ortho(xo), x)) fail(inv, show({&x}));
      ++contra.checked;
      if (!l.equal(l.meet(x, xo), bot)) fail(contra, show({&x}));
      ++lem.checked;
      if (!l.equal(l.join(x, xo), top)) fail(lem, show({&x}));
    }
  }
  {
    LawResult& contrapos = law("contraposition");
    LawResult& demorgan = law("de-morgan");
    LawResult& om = law("orthomodular");
    for (const auto& x : sample) {
      for (const auto& y : sample) {
        const bool x_le_y = leq(l, x, y);
        ++contrapos.checked;
        if (x_le_y != leq(l, l.ortho(y), l.ortho(x))) fail(contrapos, show({&x, &y}));
        ++demorgan.checked;
        if (!l.equal(l.ortho(l.join(x, y)), l.meet(l.ortho(x), l.ortho(y))) ||
            !l.equal(l.ortho(l.meet(x, y)), l.join(l.ortho(x), l.ortho(y)))) {
          fail(demorgan, show({&x, &y}));
        }
        if (x_le_y) {
          ++om.checked;
          if (!l.equal(y, l.join(x, l.meet(l.ortho(x), y)))) fail(om, show({&x, &y}));
        }
      }
    }
  }
  if (opts.distributivity) {
    LawResult& dist_meet = law("distributive-meet");
    LawResult& dist_join = law("distributive-join");
    for (const auto& x : sample) {
      for (const auto& y : sample) {
        for (const auto& z : sample) {
          ++dist_meet.checked;
          if (!l.equal(l.meet(x, l.join(y, z)), l.join(l.meet(x, y), l.meet(x, z)))) {
            fail(dist_meet, show({&x, &y, &z}));
          }
          ++dist_join.checked;
          if (!l.equal(l.join(x, l.meet(y, z)), l.meet(l.join(x, y), l.join(x, z)))) {
            fail(dist_join, show({&x, &y, &z}));
          }
        }
      }
    }
  }

  for (const auto& r : rep.laws) {
    if (r.law == "orthomodular") {
      rep.orthomodular_ok = r.holds;
    } else if (r.law == "distributive-meet" || r.law == "distributive-join") {
      if (!r.holds) {
        if (rep.distributive) rep.distributivity_witness = r.witness;
        rep.distributive = false;
      }
    } else if (!r.holds) {
      rep.ortholattice_ok = false;
    }
  }
  return rep;
}

}  // namespace qst
