#include "qst/quantum_reals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qst {

namespace {

void require_increasing(const std::vector<mpq_class>& grid) {
  if (grid.empty()) throw GridError("empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k - 1] < grid[k])) throw GridError("grid must be strictly increasing at position " + std::to_string(k));
  }
}

std::vector<mpq_class> merged(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  std::vector<mpq_class> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool families_commute(const QReal& a, const QReal& b) {
  for (const auto& x : a.cuts) {
    for (const auto& y : b.cuts) {
      if (!matrices_commute(x, y)) return false;
    }
  }
  return true;
}

template <typename Step>
RealTruth meet_over_grid(const QReal& a, const QReal& b, Step step) {
  if (a.dim != b.dim) {
    throw GridError("quantum reals of dimensions " + std::to_string(a.dim) + " and " + std::to_string(b.dim));
  }
  const ProjectionLattice l(a.dim);
  const std::vector<mpq_class> grid = merged(a.grid, b.grid);
  const QReal ra = refine(a, grid);
  const QReal rb = refine(b, grid);
  Projection acc = l.top();
  for (std::size_t k = 0; k < grid.size() && !acc.is_zero(); ++k) acc = l.meet(acc, step(l, ra.cuts[k], rb.cuts[k]));
  return {acc, !families_commute(a, b)};
}

}  // namespace

Projection QReal::cut_at(const mpq_class& r) const {
  auto it = std::upper_bound(grid.begin(), grid.end(), r);
  if (it == grid.begin()) return Projection::zero(dim);
  return cuts[static_cast<std::size_t>(it - grid.begin()) - 1];
}

QReal qreal_from_spectral(const SpectralData& sd, std::vector<mpq_class> grid) {
  require_increasing(grid);
  for (const auto& e : sd.spaces) {
    if (!std::binary_search(grid.begin(), grid.end(), e.value)) {
      throw GridError("grid is missing eigenvalue " + rational_to_string(e.value));
    }
  }
  QReal out;
  out.dim = sd.dim;
  const ProjectionLattice l(sd.dim);
  Projection acc = l.bottom();
  std::size_t next = 0;
  for (const auto& r : grid) {
    // Eigenspaces are orthogonal, so the running join is their sum.
    while (next < sd.spaces.size() && sd.spaces[next].value <= r) acc = l.join(acc, sd.spaces[next++].proj);
    out.cuts.push_back(acc);
  }
  out.grid = std::move(grid);
  return out;
}

QReal qreal_from_spectral(const SpectralData& sd) {
  std::vector<mpq_class> grid;
  for (const auto& e : sd.spaces) grid.push_back(e.value);
  return qreal_from_spectral(sd, std::move(grid));
}

QReal refine(const QReal& a, const std::vector<mpq_class>& points) {
  std::vector<mpq_class> extra = points;
  std::sort(extra.begin(), extra.end());
  QReal out;
  out.dim = a.dim;
  out.grid = merged(a.grid, extra);
  out.cuts.reserve(out.grid.size());
  for (const auto& r : out.grid) out.cuts.push_back(a.cut_at(r));
  return out;
}

RealTruth truth_eq(const QReal& a, const QReal& b) {
  return meet_over_grid(a, b, [](const ProjectionLattice& l, const Projection& x, const Projection& y) {
    return biconditional(l, x, y);
  });
}

RealTruth truth_leq(const QReal& a, const QReal& b) {
  return meet_over_grid(a, b, [](const ProjectionLattice& l, const Projection& x, const Projection& y) {
    return sasaki_arrow(l, y, x);
  });
}

StateVector StateVector::exact(ExactVector v) {
  if (v.size() == 0) throw std::invalid_argument("empty state");
  StateVector s;
  s.data_ = std::move(v);
  return s;
}

StateVector StateVector::ray(ExactVector v) {
  StateVector s = exact(std::move(v));
  if (s.norm_squared_exact() == 0) throw std::invalid_argument("zero vector does not define a state");
  s.ray_ = true;
  return s;
}

StateVector StateVector::decimal(Eigen::VectorXcd v) {
  if (v.size() == 0) throw std::invalid_argument("empty state");
  StateVector s;
  s.data_ = std::move(v);
  return s;
}

int StateVector::dim() const {
  return static_cast<int>(is_exact() ? exact_entries().size() : decimal_entries().size());
}

mpq_class StateVector::norm_squared_exact() const {
  mpq_class n = 0;
  for (const auto& x : exact_entries()) n += x.norm();
  return n;
}

double StateVector::norm_squared() const {
  if (is_exact()) return norm_squared_exact().get_d();
  return decimal_entries().squaredNorm();
}

std::string Probability::to_string() const {
  if (exact) return "exact " + rational_to_string(*exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", approx);
  return std::string("decimal ") + buf;
}

Probability born_probability(const Projection& p, const StateVector& psi) {
  if (p.dim() != psi.dim()) {
    throw std::invalid_argument("projection of dimension " + std::to_string(p.dim()) + " applied to a state of dimension " +
                                std::to_string(psi.dim()));
  }
  Probability out;
  if (psi.is_exact()) {
    const mpq_class n = psi.norm_squared_exact();
    if (n != 1 && !psi.is_ray()) throw NormalizationError("state is not normalized: squared norm " + rational_to_string(n), rational_to_string(n));
    const ExactVector& v = psi.exact_entries();
    const ExactVector pv = p.matrix() * v;
    GaussianRational inner = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) inner += conj(v(i)) * pv(i);
    out.exact = inner.real() / n;
    out.approx = out.exact->get_d();
    return out;
  }
  const Eigen::VectorXcd& v = psi.decimal_entries();
  const double n = v.squaredNorm();
  if (std::abs(n - 1.0) > decimal_norm_tolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", n);
    throw NormalizationError(std::string("state is not normalized: squared norm ") + buf, buf);
  }
  Eigen::MatrixXcd m(p.dim(), p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    for (int j = 0; j < p.dim(); ++j) m(i, j) = {p(i, j).real().get_d(), p(i, j).imag().get_d()};
  }
  out.approx = std::clamp(v.dot(m * v).real(), 0.0, 1.0);
  return out;
}

EqualityProbability prob_equal(const SpectralData& a, const SpectralData& b, const StateVector& psi) {
  if (a.dim != b.dim) throw std::invalid_argument("observables of different dimensions");
  const RealTruth t = truth_eq(qreal_from_spectral(a), qreal_from_spectral(b));
  return {born_probability(t.value, psi), t};
}

Projection observational_atom(const SpectralData& a, const mpq_class& value) {
  for (const auto& e : a.spaces) {
    if (e.value == value) return e.proj;
  }
  return Projection::zero(a.dim);
}

Environment<ProjectionLattice> RealEncoding::environment(const std::string& name) const {
  Environment<ProjectionLattice> env;
  env.bind(name, real).bind("g", grid_set).bind("t", top);
  return env;
}

RealEncoding encode_real(const ProjectionLattice& lattice, const QReal& a) {
  if (lattice.dim() != a.dim) throw LatticeMismatch("real of another dimension");
  // Numeral k = {0, ..., k-1}, built with shared handles.
  std::vector<QSetPtr<ProjectionLattice>> points;
  std::vector<QSet<ProjectionLattice>::Entry> grid_entries;
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    points.push_back(make_qset(lattice, grid_entries));
    grid_entries.push_back({points.back(), lattice.top()});
  }
  std::vector<QSet<ProjectionLattice>::Entry> real_entries;
  for (std::size_t k = 0; k < points.size(); ++k) real_entries.push_back({points[k], a.cuts[k]});
  return {make_qset(lattice, std::move(real_entries)), make_qset(lattice, std::move(grid_entries)), points.back()};
}

Formula real_predicate() {
  static const Formula f =
      parse("(forall x in u . x in g) & (forall k in g . forall j in g . k in j -> k in u -> j in u) & t in u");
  return f;
}

}  // namespace qst
