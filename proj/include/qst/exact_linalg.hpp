#pragma once

// Exact linear algebra over a field scalar (Gaussian rationals, rationals).
// No pivoting heuristics: any nonzero entry is an exact pivot.

#include "qst/gaussian_rational.hpp"

#include <stdexcept>
#include <vector>

namespace qst {

inline bool is_exact_zero(const GaussianRational& z) { return z.is_zero(); }
inline bool is_exact_zero(const mpq_class& q) { return sgn(q) == 0; }

template <typename Scalar>
struct RowEchelon {
  MatrixX<Scalar> reduced;
  std::vector<Eigen::Index> pivots;  // pivot column of each nonzero row

  Eigen::Index rank() const { return static_cast<Eigen::Index>(pivots.size()); }
};

/// Reduced row echelon form.
template <typename Scalar>
RowEchelon<Scalar> row_reduce(MatrixX<Scalar> a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  std::vector<Eigen::Index> pivots;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index p = r;
    while (p < rows && is_exact_zero(a(p, c))) ++p;
    if (p == rows) continue;
    if (p != r) a.row(p).swap(a.row(r));
    const Scalar inv = Scalar(1) / a(r, c);
    for (Eigen::Index k = c; k < cols; ++k) a(r, k) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || is_exact_zero(a(i, c))) continue;
      const Scalar f = a(i, c);
      for (Eigen::Index k = c; k < cols; ++k) {
        if (!is_exact_zero(a(r, k))) a(i, k) -= f * a(r, k);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(pivots)};
}

template <typename Scalar>
Eigen::Index rank(const MatrixX<Scalar>& a) {
  return row_reduce<Scalar>(a).rank();
}

/// Basis of ker(a), one vector per column.
template <typename Scalar>
MatrixX<Scalar> nullspace(const MatrixX<Scalar>& a) {
  const RowEchelon<Scalar> e = row_reduce<Scalar>(a);
  const Eigen::Index cols = a.cols();
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Eigen::Index p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  MatrixX<Scalar> basis(cols, cols - e.rank());
  Eigen::Index out = 0;
  for (Eigen::Index free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    for (Eigen::Index i = 0; i < cols; ++i) basis(i, out) = Scalar(0);
    basis(free, out) = Scalar(1);
    for (Eigen::Index row = 0; row < e.rank(); ++row) {
      basis(e.pivots[static_cast<std::size_t>(row)], out) = -e.reduced(row, free);
    }
    ++out;
  }
  return basis;
}

/// The columns of a that form a maximal linearly independent prefix-greedy subset.
template <typename Scalar>
MatrixX<Scalar> independent_columns(const MatrixX<Scalar>& a) {
  const RowEchelon<Scalar> e = row_reduce<Scalar>(a);
  MatrixX<Scalar> out(a.rows(), e.rank());
  for (Eigen::Index k = 0; k < e.rank(); ++k) out.col(k) = a.col(e.pivots[static_cast<std::size_t>(k)]);
  return out;
}

template <typename Scalar>
MatrixX<Scalar> inverse(const MatrixX<Scalar>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse of a non-square matrix");
  const Eigen::Index n = a.rows();
  MatrixX<Scalar> aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = MatrixX<Scalar>::Identity(n, n);
  const RowEchelon<Scalar> e = row_reduce<Scalar>(std::move(aug));
  if (e.rank() < n || e.pivots[static_cast<std::size_t>(n - 1)] != n - 1) {
    throw std::domain_error("singular matrix");
  }
  return e.reduced.rightCols(n);
}

/// Incrementally maintained row-echelon basis of a subspace of Scalar^n, for
/// cheap membership tests while a spanning set grows.
template <typename Scalar>
class EchelonBasis {
 public:
  explicit EchelonBasis(Eigen::Index n) : n_(n) {}

  Eigen::Index ambient() const { return n_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(rows_.size()); }

  /// Adds v if it is independent of the current basis; returns whether it was added.
  bool insert(const VectorX<Scalar>& v) {
    VectorX<Scalar> r = reduce(v);
    Eigen::Index lead = 0;
    while (lead < n_ && is_exact_zero(r(lead))) ++lead;
    if (lead == n_) return false;
    const Scalar inv = Scalar(1) / r(lead);
    for (Eigen::Index k = lead; k < n_; ++k) r(k) *= inv;
    rows_.push_back(std::move(r));
    leads_.push_back(lead);
    return true;
  }

  bool contains(const VectorX<Scalar>& v) const {
    const VectorX<Scalar> r = reduce(v);
    for (Eigen::Index k = 0; k < n_; ++k) {
      if (!is_exact_zero(r(k))) return false;
    }
    return true;
  }

 private:
  VectorX<Scalar> reduce(VectorX<Scalar> v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Eigen::Index lead = leads_[i];
      if (is_exact_zero(v(lead))) continue;
      const Scalar f = v(lead);
      for (Eigen::Index k = lead; k < n_; ++k) {
        if (!is_exact_zero(rows_[i](k))) v(k) -= f * rows_[i](k);
      }
    }
    return v;
  }

  Eigen::Index n_;
  std::vector<VectorX<Scalar>> rows_;
  std::vector<Eigen::Index> leads_;
};

}  // namespace qst
