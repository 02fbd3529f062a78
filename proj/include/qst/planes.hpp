#pragma once

// Bit-plane evaluation over a Boolean-valued fragment. The algebra on m atoms
// is a product of m two-element algebras and every connective acts atomwise,
// so the values of a formula at all n members (as its last argument) are m
// bitsets of n bits each.

#include "qst/formula.hpp"
#include "qst/lattice.hpp"
#include "qst/universe.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qst {

/// Dense membership and equality tables of a session's fragment, as bytes and
/// as per-atom bit planes. Fills every table entry on construction.
class BooleanPlanes {
 public:
  explicit BooleanPlanes(Session<BooleanAlgebra>& session);

  const Fragment<BooleanAlgebra>& fragment() const { return *fragment_; }
  int atoms() const { return atoms_; }
  std::uint8_t full() const { return full_; }
  std::uint32_t size() const { return n_; }
  /// 64-bit words per plane.
  std::size_t words() const { return words_; }
  /// Mask of valid bits in the last word of a plane.
  std::uint64_t tail_mask() const { return tail_; }

  std::uint8_t eq(std::uint32_t u, std::uint32_t v) const { return eq8_[std::size_t{u} * n_ + v]; }
  std::uint8_t mem(std::uint32_t u, std::uint32_t v) const { return mem8_[std::size_t{u} * n_ + v]; }

  /// Atom k of [[x_u = x_j]] over j.
  const std::uint64_t* eq_plane(std::uint32_t u, int k) const { return eq_rows_.data() + offset(u, k); }
  /// Atom k of [[x_u in x_j]] over j.
  const std::uint64_t* mem_row_plane(std::uint32_t u, int k) const { return mem_rows_.data() + offset(u, k); }
  /// Atom k of [[x_j in x_v]] over j.
  const std::uint64_t* mem_col_plane(std::uint32_t v, int k) const { return mem_cols_.data() + offset(v, k); }

 private:
  std::size_t offset(std::uint32_t u, int k) const { return (std::size_t{u} * atoms_ + k) * words_; }

  const Fragment<BooleanAlgebra>* fragment_;
  int atoms_;
  std::uint8_t full_;
  std::uint32_t n_;
  std::size_t words_;
  std::uint64_t tail_;
  std::vector<std::uint8_t> eq8_, mem8_;
  std::vector<std::uint64_t> eq_rows_, mem_rows_, mem_cols_;
};

/// Evaluates one core formula (no unbounded quantifiers) with every parameter
/// but the last fixed to a fragment index and the last ranging over the whole
/// fragment.
class PlaneEvaluator {
 public:
  PlaneEvaluator(const BooleanPlanes& planes, const Formula& core, const std::vector<std::string>& params);

  /// Plane k occupies words [k * words(), (k + 1) * words()) of the result.
  std::span<const std::uint64_t> run(std::span<const std::uint32_t> fixed);

  /// All-fixed evaluation, the last parameter included.
  std::uint8_t scalar(std::span<const std::uint32_t> args);

 private:
  struct Cell {
    Op op;
    int a = -1, b = -1;        // children
    int lhs = -1, rhs = -1;    // atom slots
    int var = -1, bound = -1;  // quantifier slots
    bool dep = false;          // mentions the varying parameter
  };

  int compile(const Formula& f, std::vector<std::pair<std::string, int>>& scope, std::vector<bool>& slot_dep);
  std::uint8_t eval_scalar(int c);
  void eval_plane(int c);
  std::uint64_t* buffer(int c) { return buffers_.data() + std::size_t(c) * stride_; }
  void fill(std::uint64_t* dst, std::uint8_t value);

  const BooleanPlanes& t_;
  std::vector<Cell> cells_;
  int root_ = -1;
  int batched_ = -1;
  std::vector<std::uint32_t> slots_;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> buffers_;
};

}  // namespace qst
