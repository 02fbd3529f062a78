#include "qst/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qst {

namespace {

ExactMatrix identity_matrix(int dim) { return ExactMatrix::Identity(dim, dim); }

ExactMatrix mul(const ExactMatrix& a, const ExactMatrix& b) {
  // Skips zero entries; exact matrices here are small and often sparse.
  ExactMatrix out = ExactMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const GaussianRational& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        if (!b(k, j).is_zero()) out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

bool all_zero(const ExactMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!m.data()[i].is_zero()) return false;
  }
  return true;
}

Eigen::Matrix<GaussianRational, Eigen::Dynamic, 1> flatten(const ExactMatrix& m) {
  return Eigen::Map<const ExactVector>(m.data(), m.size());
}

// Best rational approximation with bounded denominator (continued fractions).
mpq_class approximate(double x, long max_den) {
  if (!std::isfinite(x)) throw InvalidProjection("non-finite matrix entry");
  const bool neg = x < 0;
  double v = std::fabs(x);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(v);
    if (a_d > 1e15) break;
    const long a = static_cast<long>(a_d);
    const long q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const long p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = v - a_d;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (q1 == 0) throw InvalidProjection("entry cannot be rationalized");
  mpq_class out(p1, q1);
  out.canonicalize();
  return neg ? mpq_class(-out) : out;
}

}  // namespace

bool is_hermitian(const ExactMatrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (m(i, j) != m(j, i).conj()) return false;
    }
  }
  return true;
}

bool is_idempotent(const ExactMatrix& m) { return m.rows() == m.cols() && mul(m, m) == m; }

Projection projection_unchecked(ExactMatrix m) { return Projection(Projection::Trusted{}, std::move(m)); }

Projection Projection::from_matrix(ExactMatrix m) {
  if (m.rows() != m.cols()) throw InvalidProjection("projection matrix must be square");
  if (!is_hermitian(m)) throw InvalidProjection("matrix is not Hermitian");
  if (!is_idempotent(m)) throw InvalidProjection("matrix is not idempotent");
  return Projection(Trusted{}, std::move(m));
}

Projection Projection::zero(int dim) { return Projection(Trusted{}, ExactMatrix::Zero(dim, dim)); }

Projection Projection::identity(int dim) { return Projection(Trusted{}, identity_matrix(dim)); }

int Projection::rank() const {
  mpq_class tr = 0;
  for (Eigen::Index i = 0; i < m_->rows(); ++i) tr += (*m_)(i, i).real();
  return static_cast<int>(tr.get_num().get_si());
}

bool Projection::is_zero() const {
  for (Eigen::Index i = 0; i < m_->rows(); ++i) {
    if (!(*m_)(i, i).is_zero()) return false;  // PSD: zero diagonal forces zero matrix
  }
  return true;
}

bool Projection::is_identity() const { return rank() == dim(); }

Projection Projection::complement() const { return Projection(Trusted{}, identity_matrix(dim()) - *m_); }

std::size_t Projection::hash() const {
  std::size_t h = static_cast<std::size_t>(dim());
  for (Eigen::Index i = 0; i < m_->size(); ++i) h = h * 1000003u ^ m_->data()[i].hash();
  return h;
}

std::string Projection::to_string() const {
  if (dim() > 0 && is_zero()) return "0";
  if (dim() > 0 && is_identity()) return "1";
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < m_->rows(); ++i) {
    if (i) os << ',';
    os << '[';
    for (Eigen::Index j = 0; j < m_->cols(); ++j) {
      if (j) os << ',';
      os << (*m_)(i, j);
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

Projection proj_from_span(const ExactMatrix& vectors, int dim) {
  if (vectors.rows() != dim && vectors.cols() != 0) {
    throw std::invalid_argument("span vectors have " + std::to_string(vectors.rows()) + " rows, expected " +
                                std::to_string(dim));
  }
  if (vectors.cols() == 0) return Projection::zero(dim);
  const ExactMatrix v = independent_columns<GaussianRational>(vectors);
  if (v.cols() == 0) return Projection::zero(dim);
  if (v.cols() == dim) return Projection::identity(dim);
  const ExactMatrix vh = v.adjoint();
  const ExactMatrix gram_inv = inverse<GaussianRational>(mul(vh, v));
  return projection_unchecked(mul(mul(v, gram_inv), vh));
}

Projection proj_from_span(std::span<const ExactVector> vectors, int dim) {
  ExactMatrix m(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != dim) {
      throw std::invalid_argument("vector " + std::to_string(k) + " has dimension " +
                                  std::to_string(vectors[k].size()) + ", expected " + std::to_string(dim));
    }
    m.col(static_cast<Eigen::Index>(k)) = vectors[k];
  }
  return proj_from_span(m, dim);
}

namespace {
void require_same_dim(const Projection& p, const Projection& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(p.dim()) + " vs " + std::to_string(q.dim()));
  }
}
}  // namespace

Projection subspace_meet(const Projection& p, const Projection& q) {
  require_same_dim(p, q);
  if (p == q) return p;
  if (p.is_zero() || q.is_identity()) return p;
  if (q.is_zero() || p.is_identity()) return q;
  const int d = p.dim();
  ExactMatrix stacked(2 * d, d);
  stacked.topRows(d) = identity_matrix(d) - p.matrix();
  stacked.bottomRows(d) = identity_matrix(d) - q.matrix();
  return proj_from_span(nullspace<GaussianRational>(stacked), d);
}

Projection subspace_join(const Projection& p, const Projection& q) {
  require_same_dim(p, q);
  if (p == q) return p;
  if (p.is_zero() || q.is_identity()) return q;
  if (q.is_zero() || p.is_identity()) return p;
  const int d = p.dim();
  ExactMatrix cols(d, 2 * d);
  cols.leftCols(d) = p.matrix();
  cols.rightCols(d) = q.matrix();
  return proj_from_span(cols, d);
}

bool matrices_commute(const Projection& p, const Projection& q) {
  require_same_dim(p, q);
  return mul(p.matrix(), q.matrix()) == mul(q.matrix(), p.matrix());
}

std::vector<ExactMatrix> generate_algebra(std::span<const Projection> s) {
  if (s.empty()) throw std::invalid_argument("generate_algebra needs at least one generator");
  const int d = s.front().dim();
  for (const auto& p : s) require_same_dim(s.front(), p);
  const Eigen::Index cap = static_cast<Eigen::Index>(d) * d;

  EchelonBasis<GaussianRational> span(cap);
  std::vector<ExactMatrix> basis;
  auto add = [&](ExactMatrix m) {
    if (span.size() < cap && span.insert(flatten(m))) {
      basis.push_back(std::move(m));
      return true;
    }
    return false;
  };
  add(identity_matrix(d));
  std::vector<std::size_t> frontier;
  for (const auto& p : s) {
    if (add(p.matrix())) frontier.push_back(basis.size() - 1);
  }
  while (!frontier.empty() && span.size() < cap) {
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      for (const auto& g : s) {
        if (add(mul(basis[idx], g.matrix()))) next.push_back(basis.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return basis;
}

Projection lattice_commutator(std::span<const Projection> s) {
  if (s.empty()) throw std::invalid_argument("commutator of an empty family");
  const int d = s.front().dim();
  for (const auto& p : s) require_same_dim(s.front(), p);

  std::vector<ExactMatrix> commutators;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      ExactMatrix c = mul(s[i].matrix(), s[j].matrix()) - mul(s[j].matrix(), s[i].matrix());
      if (!all_zero(c)) commutators.push_back(std::move(c));
    }
  }
  if (commutators.empty()) return Projection::identity(d);

  const std::vector<ExactMatrix> algebra = generate_algebra(s);
  // Range of the ideal generated by [S,S] is A(S) applied to the commutator columns.
  ExactMatrix cols(d, 0);
  for (const auto& b : algebra) {
    for (const auto& c : commutators) {
      const ExactMatrix bc = mul(b, c);
      ExactMatrix grown(d, cols.cols() + bc.cols());
      grown << cols, bc;
      cols = independent_columns<GaussianRational>(grown);
      if (cols.cols() == d) return Projection::zero(d);
    }
  }
  return proj_from_span(cols, d).complement();
}

Projection commutator_closed_form(const Projection& p, const Projection& q) {
  const Projection po = p.complement();
  const Projection qo = q.complement();
  return subspace_join(subspace_join(subspace_meet(p, q), subspace_meet(p, qo)),
                       subspace_join(subspace_meet(po, q), subspace_meet(po, qo)));
}

SpectralData SpectralData::from_eigenspaces(int dim, std::vector<Eigenspace> spaces) {
  std::sort(spaces.begin(), spaces.end(), [](const Eigenspace& a, const Eigenspace& b) { return a.value < b.value; });
  ExactMatrix sum = ExactMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    if (spaces[i].proj.dim() != dim) throw InvalidProjection("eigenprojection dimension mismatch");
    if (spaces[i].proj.is_zero()) throw InvalidProjection("zero eigenprojection for " + spaces[i].value.get_str());
    if (i > 0 && spaces[i].value == spaces[i - 1].value) {
      throw InvalidProjection("repeated eigenvalue " + spaces[i].value.get_str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!all_zero(mul(spaces[i].proj.matrix(), spaces[j].proj.matrix()))) {
        throw InvalidProjection("eigenprojections for " + spaces[j].value.get_str() + " and " +
                                spaces[i].value.get_str() + " are not orthogonal");
      }
    }
    sum += spaces[i].proj.matrix();
  }
  if (sum != identity_matrix(dim)) throw InvalidProjection("eigenprojections do not sum to the identity");
  return SpectralData{dim, std::move(spaces)};
}

ExactMatrix SpectralData::operator_matrix() const {
  ExactMatrix a = ExactMatrix::Zero(dim, dim);
  for (const auto& e : spaces) a += e.proj.matrix() * GaussianRational(e.value);
  return a;
}

Projection rationalize_projection(const Eigen::MatrixXcd& m, long max_denominator) {
  ExactMatrix exact(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      exact(i, j) = GaussianRational(approximate(m(i, j).real(), max_denominator),
                                     approximate(m(i, j).imag(), max_denominator));
    }
  }
  return Projection::from_matrix(std::move(exact));
}

}  // namespace qst
