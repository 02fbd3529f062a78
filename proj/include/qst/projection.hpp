#pragma once

#include "qst/exact_linalg.hpp"
#include "qst/gaussian_rational.hpp"
#include "qst/lattice.hpp"

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qst {

class InvalidProjection : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Orthogonal projection on C^dim with Gaussian-rational entries. Always
/// exactly Hermitian and idempotent; the matrix is shared between copies.
class Projection {
 public:
  /// Validates M = M^dagger and M*M = M exactly.
  static Projection from_matrix(ExactMatrix m);
  static Projection zero(int dim);
  static Projection identity(int dim);

  Projection() : Projection(zero(0)) {}

  int dim() const { return static_cast<int>(m_->rows()); }
  const ExactMatrix& matrix() const { return *m_; }
  const GaussianRational& operator()(Eigen::Index i, Eigen::Index j) const { return (*m_)(i, j); }

  /// Dimension of the range (the trace).
  int rank() const;
  bool is_zero() const;
  bool is_identity() const;

  /// I - P.
  Projection complement() const;

  friend bool operator==(const Projection& a, const Projection& b) {
    return a.m_ == b.m_ || *a.m_ == *b.m_;
  }

  std::size_t hash() const;
  std::string to_string() const;

 private:
  struct Trusted {};
  Projection(Trusted, ExactMatrix m) : m_(std::make_shared<const ExactMatrix>(std::move(m))) {}

  friend Projection projection_unchecked(ExactMatrix m);

  std::shared_ptr<const ExactMatrix> m_;
};

/// For results whose Hermitian idempotency follows from construction.
Projection projection_unchecked(ExactMatrix m);

bool is_hermitian(const ExactMatrix& m);
bool is_idempotent(const ExactMatrix& m);

/// Orthogonal projection onto the span of the columns of vectors (dim rows).
/// Uses P = V (V^dagger V)^-1 V^dagger on a maximal independent subset.
Projection proj_from_span(const ExactMatrix& vectors, int dim);
Projection proj_from_span(std::span<const ExactVector> vectors, int dim);

/// ran(P) intersect ran(Q), via the kernel of the stacked system (I-P; I-Q).
Projection subspace_meet(const Projection& p, const Projection& q);
/// ran(P) + ran(Q), via the column span of [P Q].
Projection subspace_join(const Projection& p, const Projection& q);

bool matrices_commute(const Projection& p, const Projection& q);

/// Basis (as matrices) of the unital algebra generated by words in S. Words are
/// extended by one generator per round until a round adds nothing; the basis
/// never exceeds dim^2 elements.
std::vector<ExactMatrix> generate_algebra(std::span<const Projection> s);

/// Largest projection E, central in the algebra generated by S, on which S
/// commutes: the sum of the abelian central summands of A(S). Computed as the
/// complement of the range of the commutator ideal A(S)[S,S].
Projection lattice_commutator(std::span<const Projection> s);

/// (P^Q) v (P^Q') v (P'^Q) v (P'^Q').
Projection commutator_closed_form(const Projection& p, const Projection& q);

/// Standard quantum logic on C^dim.
class ProjectionLattice {
 public:
  using Element = Projection;
  static constexpr LatticeKind kind = LatticeKind::projection;

  explicit ProjectionLattice(int dim) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("negative dimension");
  }

  int carrier() const { return dim_; }
  int dim() const { return dim_; }

  Element bottom() const { return Projection::zero(dim_); }
  Element top() const { return Projection::identity(dim_); }
  Element meet(const Element& a, const Element& b) const {
    check(a);
    check(b);
    return subspace_meet(a, b);
  }
  Element join(const Element& a, const Element& b) const {
    check(a);
    check(b);
    return subspace_join(a, b);
  }
  Element ortho(const Element& a) const {
    check(a);
    return a.complement();
  }
  bool equal(const Element& a, const Element& b) const {
    check(a);
    check(b);
    return a == b;
  }
  bool contains(const Element& a) const { return a.dim() == dim_; }
  std::string describe(const Element& a) const { return a.to_string(); }

  friend bool operator==(const ProjectionLattice&, const ProjectionLattice&) = default;

 private:
  void check(const Element& a) const {
    if (a.dim() != dim_) {
      throw LatticeMismatch("projection on C^" + std::to_string(a.dim()) + " used in the lattice of C^" +
                            std::to_string(dim_));
    }
  }

  int dim_;
};

static_assert(OrthoLattice<ProjectionLattice>);

/// Spectral decomposition of a self-adjoint operator with rational spectrum.
struct SpectralData {
  struct Eigenspace {
    mpq_class value;
    Projection proj;
  };

  int dim = 0;
  std::vector<Eigenspace> spaces;  // sorted by value

  /// Checks distinct values, pairwise orthogonal projections, sum = I; sorts
  /// by value. Throws InvalidProjection on violation.
  static SpectralData from_eigenspaces(int dim, std::vector<Eigenspace> spaces);

  /// A = sum value * proj.
  ExactMatrix operator_matrix() const;
};

/// Rounds a floating-point matrix entrywise to the nearest fractions with
/// denominators <= max_denominator, then re-verifies exact projection-ness.
Projection rationalize_projection(const Eigen::MatrixXcd& m, long max_denominator = 1'000'000);

}  // namespace qst
