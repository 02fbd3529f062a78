#pragma once

// Finite-rank fragments of the lattice-valued universe and the recursive
// membership / equality truth values.

#include "qst/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qst {

class SizeGuardExceeded : public std::runtime_error {
 public:
  SizeGuardExceeded(const std::string& what, std::string bound)
      : std::runtime_error(what), cardinality_bound(std::move(bound)) {}
  std::string cardinality_bound;
};

namespace detail {
inline std::uint64_t next_qset_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

/// An L-valued set: a finite function from previously built sets into L.
/// Immutable; identity (for memoization) is the handle, not the structure.
template <OrthoLattice L>
class QSet {
 public:
  using Element = typename L::Element;
  using Ptr = std::shared_ptr<const QSet>;
  struct Entry {
    Ptr key;
    Element value;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// 0 for the empty set, otherwise 1 + the largest key rank.
  int rank() const { return rank_; }
  int carrier() const { return carrier_; }
  std::uint64_t id() const { return id_; }

 private:
  QSet(std::vector<Entry> entries, int rank, int carrier)
      : entries_(std::move(entries)), rank_(rank), carrier_(carrier), id_(detail::next_qset_id()) {}

  template <OrthoLattice M>
  friend typename QSet<M>::Ptr make_qset(const M& lattice, std::vector<typename QSet<M>::Entry> entries);

  std::vector<Entry> entries_;
  int rank_;
  int carrier_;
  std::uint64_t id_;
};

template <OrthoLattice L>
using QSetPtr = typename QSet<L>::Ptr;

template <OrthoLattice L>
QSetPtr<L> make_qset(const L& lattice, std::vector<typename QSet<L>::Entry> entries) {
  int rank = 0;
  for (const auto& e : entries) {
    if (!e.key) throw std::invalid_argument("null key in qset literal");
    if (e.key->carrier() != lattice.carrier()) throw LatticeMismatch("qset key built over a different lattice");
    if (!lattice.contains(e.value)) throw LatticeMismatch("qset value " + std::string("outside the lattice"));
    rank = std::max(rank, e.key->rank() + 1);
  }
  return QSetPtr<L>(new QSet<L>(std::move(entries), rank, lattice.carrier()));
}

/// A standard hereditarily finite set, as nested member lists.
struct PureSet {
  std::vector<PureSet> members;

  /// Canonical text: members deduplicated and sorted, e.g. "{{},{{}}}".
  std::string canonical() const;
  int depth() const;
  /// Von Neumann numeral n = {0, ..., n-1}.
  static PureSet numeral(int n);
  /// Parses "{}", "{ {}, {{}} }" (whitespace ignored).
  static PureSet parse(std::string_view text);

  friend bool operator==(const PureSet& a, const PureSet& b) { return a.canonical() == b.canonical(); }
};

/// Check-sets of several standard sets, sharing one handle per distinct
/// hereditary member (so they can form a duplicate-free fragment).
template <OrthoLattice L>
std::vector<QSetPtr<L>> check_embed_all(const L& lattice, const std::vector<PureSet>& sets, int max_depth = 16) {
  std::map<std::string, QSetPtr<L>> memo;
  auto rec = [&](auto&& self, const PureSet& s) -> QSetPtr<L> {
    const std::string key = s.canonical();
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::map<std::string, QSetPtr<L>> children;
    for (const auto& m : s.members) children.emplace(m.canonical(), self(self, m));
    std::vector<typename QSet<L>::Entry> entries;
    for (auto& [name, child] : children) entries.push_back({child, lattice.top()});
    auto out = make_qset(lattice, std::move(entries));
    memo.emplace(key, out);
    return out;
  };
  std::vector<QSetPtr<L>> out;
  out.reserve(sets.size());
  for (const auto& a : sets) {
    if (a.depth() > max_depth) {
      throw std::invalid_argument("nesting depth " + std::to_string(a.depth()) + " exceeds limit " +
                                  std::to_string(max_depth));
    }
    out.push_back(rec(rec, a));
  }
  return out;
}

/// The check-set of a standard set: every member embedded with value 1.
template <OrthoLattice L>
QSetPtr<L> check_embed(const L& lattice, const PureSet& a, int max_depth = 16) {
  return check_embed_all(lattice, {a}, max_depth).front();
}

/// Structural equality: same values on structurally equal keys, order and
/// duplicate handles ignored only as far as the entry lists match pairwise.
template <OrthoLattice L>
bool structurally_equal(const L& lattice, const QSet<L>& a, const QSet<L>& b) {
  if (&a == &b) return true;
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& ea : a.entries()) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto& eb = b.entries()[j];
      if (used[j] || !lattice.equal(ea.value, eb.value)) continue;
      if (structurally_equal(lattice, *ea.key, *eb.key)) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

/// A finite collection of sets closed under taking domain elements, ordered
/// so that every key precedes the sets that use it.
template <OrthoLattice L>
class Fragment {
 public:
  using Element = typename L::Element;
  struct IndexedEntry {
    std::uint32_t key;
    Element value;
  };

  /// Adds every hereditary key of the given sets.
  Fragment(L lattice, std::vector<QSetPtr<L>> sets) : lattice_(std::move(lattice)) {
    for (const auto& s : sets) add(s);
  }

  const L& lattice() const { return lattice_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<QSetPtr<L>>& members() const { return members_; }
  const QSetPtr<L>& operator[](std::size_t i) const { return members_[i]; }

  std::optional<std::uint32_t> index_of(const QSet<L>& s) const {
    if (auto it = index_.find(s.id()); it != index_.end()) return it->second;
    return std::nullopt;
  }
  const std::vector<IndexedEntry>& dom(std::uint32_t i) const { return dom_[i]; }

 private:
  std::uint32_t add(const QSetPtr<L>& s) {
    if (!s) throw std::invalid_argument("null set in fragment");
    if (auto it = index_.find(s->id()); it != index_.end()) return it->second;
    if (s->carrier() != lattice_.carrier()) throw LatticeMismatch("fragment member over a different lattice");
    std::vector<IndexedEntry> d;
    d.reserve(s->size());
    for (const auto& e : s->entries()) d.push_back({add(e.key), e.value});
    const auto idx = static_cast<std::uint32_t>(members_.size());
    members_.push_back(s);
    dom_.push_back(std::move(d));
    index_.emplace(s->id(), idx);
    return idx;
  }

  L lattice_;
  std::vector<QSetPtr<L>> members_;
  std::vector<std::vector<IndexedEntry>> dom_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

struct EnumerationLimits {
  std::size_t max_values = 4;
  int max_rank = 3;
};

/// Closed-form size of the stage V_rank over a value set of the given size:
/// |V_0| = 0, |V_{k+1}| = (values + 1)^|V_k|. Returned as decimal text.
std::string stage_cardinality(std::size_t values, int rank);

/// Every set of the stage V_max_rank whose values lie in `values`, i.e. all
/// sets of rank < max_rank, deduplicated structurally. Refuses (with the
/// cardinality bound) beyond the limits.
template <OrthoLattice L>
Fragment<L> enumerate_fragment(const L& lattice, const std::vector<typename L::Element>& values, int max_rank,
                               EnumerationLimits limits = {}) {
  if (max_rank < 0) throw std::invalid_argument("negative rank");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!lattice.contains(values[i])) throw LatticeMismatch("enumeration value outside the lattice");
    for (std::size_t j = 0; j < i; ++j) {
      if (lattice.equal(values[i], values[j])) throw std::invalid_argument("duplicate enumeration value");
    }
  }
  if (values.size() > limits.max_values || max_rank > limits.max_rank) {
    const std::string bound = stage_cardinality(values.size(), max_rank);
    const std::string shown = bound.size() <= 40 ? bound : "a " + std::to_string(bound.size()) + "-digit number of";
    throw SizeGuardExceeded("full enumeration of V_" + std::to_string(max_rank) + " over " +
                                std::to_string(values.size()) + " values refused: " + shown + " sets",
                            bound);
  }
  using Entry = typename QSet<L>::Entry;
  // Structural key: sorted (stage index, value index) pairs.
  std::map<std::vector<std::pair<std::uint32_t, std::uint32_t>>, std::uint32_t> seen;
  std::vector<QSetPtr<L>> all;
  std::vector<std::uint32_t> stage;  // indices into `all` forming the current V_k
  for (int k = 0; k < max_rank; ++k) {
    std::vector<std::uint32_t> next;
    const std::size_t n = stage.size();
    const std::size_t radix = values.size() + 1;  // 0 = absent
    std::vector<std::size_t> digit(n, 0);
    while (true) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> key;
      for (std::size_t i = 0; i < n; ++i) {
        if (digit[i] != 0) key.emplace_back(stage[i], static_cast<std::uint32_t>(digit[i] - 1));
      }
      auto [it, inserted] = seen.emplace(key, static_cast<std::uint32_t>(all.size()));
      if (inserted) {
        std::vector<Entry> entries;
        entries.reserve(key.size());
        for (const auto& [member, value] : key) entries.push_back({all[member], values[value]});
        all.push_back(make_qset(lattice, std::move(entries)));
      }
      next.push_back(it->second);
      std::size_t pos = 0;
      while (pos < n && ++digit[pos] == radix) digit[pos++] = 0;
      if (pos == n) break;
    }
    stage = std::move(next);
  }
  std::vector<QSetPtr<L>> members;
  members.reserve(stage.size());
  for (std::uint32_t i : stage) members.push_back(all[i]);
  return Fragment<L>(lattice, std::move(members));
}

/// Per-session memo of [[u in v]] and [[u = v]]. Sets of an attached fragment
/// use dense tables; other sets fall back to hash maps keyed by handle ids.
/// Not shareable across threads; distinct sessions are independent.
template <OrthoLattice L>
class Session {
 public:
  using Element = typename L::Element;
  static constexpr std::size_t max_dense = 4096;

  explicit Session(L lattice) : lattice_(std::move(lattice)) {}
  Session(L lattice, const Fragment<L>& fragment) : lattice_(std::move(lattice)) { attach(fragment); }
  // The session keeps a pointer to its fragment.
  Session(L lattice, Fragment<L>&&) = delete;

  const L& lattice() const { return lattice_; }
  const Fragment<L>* fragment() const { return fragment_; }

  /// Dense tables for the fragment's members (if it is small enough).
  void attach(Fragment<L>&&) = delete;
  void attach(const Fragment<L>& fragment) {
    if (fragment.lattice().carrier() != lattice_.carrier()) throw LatticeMismatch("fragment over a different lattice");
    fragment_ = &fragment;
    n_ = fragment.size() <= max_dense ? fragment.size() : 0;
    eq_.assign(n_ * n_, lattice_.bottom());
    mem_.assign(n_ * n_, lattice_.bottom());
    eq_known_.assign(n_ * n_, 0);
    mem_known_.assign(n_ * n_, 0);
    eq_row_done_.assign(n_, 0);
    mem_row_done_.assign(n_, 0);
    mem_t_.clear();
    mem_col_done_.clear();
  }

  /// [[u in v]] = join over x in dom(v) of v(x) ^ [[x = u]].
  Element membership(const QSetPtr<L>& u, const QSetPtr<L>& v) {
    check(*u);
    check(*v);
    if (auto iu = dense_index(*u), iv = dense_index(*v); iu && iv) return membership_at(*iu, *iv);
    const auto key = std::make_pair(u->id(), v->id());
    if (auto it = mem_scratch_.find(key); it != mem_scratch_.end()) return it->second;
    Element acc = lattice_.bottom();
    for (const auto& e : v->entries()) acc = lattice_.join(acc, lattice_.meet(e.value, equality(e.key, u)));
    mem_scratch_.emplace(key, acc);
    return acc;
  }

  /// [[u = v]] = meet over x in dom(u) of (u(x) -> [[x in v]]) and symmetrically.
  Element equality(const QSetPtr<L>& u, const QSetPtr<L>& v) {
    check(*u);
    check(*v);
    if (auto iu = dense_index(*u), iv = dense_index(*v); iu && iv) return equality_at(*iu, *iv);
    const auto key = std::make_pair(u->id(), v->id());
    if (auto it = eq_scratch_.find(key); it != eq_scratch_.end()) return it->second;
    Element acc = lattice_.top();
    for (const auto& e : u->entries()) acc = lattice_.meet(acc, sasaki_arrow(lattice_, e.value, membership(e.key, v)));
    for (const auto& e : v->entries()) acc = lattice_.meet(acc, sasaki_arrow(lattice_, e.value, membership(e.key, u)));
    eq_scratch_.emplace(key, acc);
    eq_scratch_.emplace(std::make_pair(v->id(), u->id()), acc);
    return acc;
  }

  Element membership_at(std::uint32_t u, std::uint32_t v) {
    const std::size_t slot = std::size_t{u} * n_ + v;
    if (mem_known_[slot]) return mem_[slot];
    Element acc = lattice_.bottom();
    for (const auto& e : fragment_->dom(v)) acc = lattice_.join(acc, lattice_.meet(e.value, equality_at(e.key, u)));
    mem_[slot] = acc;
    mem_known_[slot] = 1;
    return acc;
  }

  Element equality_at(std::uint32_t u, std::uint32_t v) {
    const std::size_t slot = std::size_t{u} * n_ + v;
    if (eq_known_[slot]) return eq_[slot];
    Element acc = lattice_.top();
    for (const auto& e : fragment_->dom(u)) acc = lattice_.meet(acc, sasaki_arrow(lattice_, e.value, membership_at(e.key, v)));
    for (const auto& e : fragment_->dom(v)) acc = lattice_.meet(acc, sasaki_arrow(lattice_, e.value, membership_at(e.key, u)));
    eq_[slot] = acc;
    eq_known_[slot] = 1;
    const std::size_t mirror = std::size_t{v} * n_ + u;
    eq_[mirror] = acc;
    eq_known_[mirror] = 1;
    return acc;
  }

  /// [[x_u = x_j]] for every fragment index j.
  std::span<const Element> equality_row(std::uint32_t u) {
    if (!eq_row_done_[u]) {
      for (std::uint32_t j = 0; j < n_; ++j) equality_at(u, j);
      eq_row_done_[u] = 1;
    }
    return {eq_.data() + std::size_t{u} * n_, n_};
  }
  /// [[x_u in x_j]] for every fragment index j.
  std::span<const Element> membership_row(std::uint32_t u) {
    if (!mem_row_done_[u]) {
      for (std::uint32_t j = 0; j < n_; ++j) membership_at(u, j);
      mem_row_done_[u] = 1;
    }
    return {mem_.data() + std::size_t{u} * n_, n_};
  }
  /// [[x_j in x_v]] for every fragment index j (a transposed copy, filled lazily).
  std::span<const Element> membership_column(std::uint32_t v) {
    if (mem_t_.empty()) {
      mem_t_.assign(n_ * n_, lattice_.bottom());
      mem_col_done_.assign(n_, 0);
    }
    Element* col = mem_t_.data() + std::size_t{v} * n_;
    if (!mem_col_done_[v]) {
      for (std::uint32_t j = 0; j < n_; ++j) col[j] = membership_at(j, v);
      mem_col_done_[v] = 1;
    }
    return {col, n_};
  }

  /// Whether fragment index tables are available.
  bool dense() const { return n_ > 0; }
  std::optional<std::uint32_t> dense_index(const QSet<L>& s) const {
    if (n_ == 0) return std::nullopt;
    return fragment_->index_of(s);
  }

  /// Drops memo entries for sets outside the fragment.
  void clear_scratch() {
    eq_scratch_.clear();
    mem_scratch_.clear();
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
      return std::hash<std::uint64_t>{}(p.first * 0x9E3779B97F4A7C15ull ^ p.second);
    }
  };

  void check(const QSet<L>& s) const {
    if (s.carrier() != lattice_.carrier()) throw LatticeMismatch("set built over a different lattice");
  }

  L lattice_;
  const Fragment<L>* fragment_ = nullptr;
  std::size_t n_ = 0;
  std::vector<Element> eq_;
  std::vector<Element> mem_;
  std::vector<Element> mem_t_;
  std::vector<std::uint8_t> eq_row_done_;
  std::vector<std::uint8_t> mem_row_done_;
  std::vector<std::uint8_t> mem_col_done_;
  std::vector<std::uint8_t> eq_known_;
  std::vector<std::uint8_t> mem_known_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Element, PairHash> eq_scratch_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Element, PairHash> mem_scratch_;
};

/// One-shot conveniences over a fresh session.
template <OrthoLattice L>
typename L::Element truth_membership(const L& lattice, const QSetPtr<L>& u, const QSetPtr<L>& v) {
  Session<L> s(lattice);
  return s.membership(u, v);
}

template <OrthoLattice L>
typename L::Element truth_equality(const L& lattice, const QSetPtr<L>& u, const QSetPtr<L>& v) {
  Session<L> s(lattice);
  return s.equality(u, v);
}

/// Every lattice value occurring in u, its keys, their keys, and so on,
/// without repeats.
template <OrthoLattice L>
void collect_hereditary_values(const L& lattice, const QSet<L>& u, std::vector<typename L::Element>& out) {
  std::vector<std::uint64_t> visited;
  auto rec = [&](auto&& self, const QSet<L>& s) -> void {
    if (std::find(visited.begin(), visited.end(), s.id()) != visited.end()) return;
    visited.push_back(s.id());
    for (const auto& e : s.entries()) {
      bool present = false;
      for (const auto& x : out) {
        if (lattice.equal(x, e.value)) {
          present = true;
          break;
        }
      }
      if (!present) out.push_back(e.value);
      self(self, *e.key);
    }
  };
  rec(rec, u);
}

}  // namespace qst
