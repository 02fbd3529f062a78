#pragma once

// Self-adjoint operators with finite rational spectrum as quantum reals:
// a real is its family of spectral cuts E(r) = sum of eigenprojections with
// eigenvalue <= r, sampled on a finite grid that contains the spectrum.

#include "qst/evaluator.hpp"
#include "qst/formula.hpp"
#include "qst/projection.hpp"
#include "qst/universe.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qst {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NormalizationError : public std::invalid_argument {
 public:
  NormalizationError(const std::string& what, std::string measured)
      : std::invalid_argument(what), measured_norm_squared(std::move(measured)) {}
  std::string measured_norm_squared;
};

struct QReal {
  int dim = 0;
  std::vector<mpq_class> grid;  // strictly increasing
  std::vector<Projection> cuts;  // cuts[k] = E(grid[k])

  /// E(r) for any rational r: the cut at the largest grid point <= r, or 0.
  Projection cut_at(const mpq_class& r) const;
};

/// Requires every eigenvalue to be a grid point. Throws GridError naming the
/// first missing eigenvalue, or on an unsorted grid.
QReal qreal_from_spectral(const SpectralData& sd, std::vector<mpq_class> grid);

/// The spectrum itself as the grid.
QReal qreal_from_spectral(const SpectralData& sd);

/// Resamples on the union of the current grid and `points`.
QReal refine(const QReal& a, const std::vector<mpq_class>& points);

struct RealTruth {
  Projection value;
  /// Set when the two cut families do not commute: the value then depends on
  /// the chosen rendering of equality/order, not on quantum mechanics alone.
  bool model_dependent = false;
};

/// Meet over the common grid of (E_a(r) <-> E_b(r)), x <-> y = (x ^ y) v (x' ^ y').
RealTruth truth_eq(const QReal& a, const QReal& b);

/// a <= b as cut containment: meet over r of (E_b(r) -> E_a(r)).
RealTruth truth_leq(const QReal& a, const QReal& b);

/// A pure state, exact or as decimals.
class StateVector {
 public:
  static StateVector exact(ExactVector v);
  static StateVector decimal(Eigen::VectorXcd v);
  /// The unit vector v/|v| for a nonzero exact v; probabilities stay exact
  /// because only |v|^2 enters.
  static StateVector ray(ExactVector v);

  int dim() const;
  bool is_exact() const { return std::holds_alternative<ExactVector>(data_); }
  bool is_ray() const { return ray_; }
  const ExactVector& exact_entries() const { return std::get<ExactVector>(data_); }
  const Eigen::VectorXcd& decimal_entries() const { return std::get<Eigen::VectorXcd>(data_); }

  /// Exact squared norm (exact states only).
  mpq_class norm_squared_exact() const;
  double norm_squared() const;

 private:
  std::variant<ExactVector, Eigen::VectorXcd> data_;
  bool ray_ = false;
};

/// Decimal states count as normalized within this tolerance on the squared norm.
inline constexpr double decimal_norm_tolerance = 1e-11;

struct Probability {
  std::optional<mpq_class> exact;  // present iff all inputs were exact
  double approx = 0;

  /// "exact 1/2" or "decimal 0.500000000000".
  std::string to_string() const;
};

/// ||P psi||^2 = <psi, P psi>.
Probability born_probability(const Projection& p, const StateVector& psi);

/// Born probability of the equality truth value of the two observables.
struct EqualityProbability {
  Probability probability;
  RealTruth truth;
};
EqualityProbability prob_equal(const SpectralData& a, const SpectralData& b, const StateVector& psi);

/// Eigenprojection of `value`, or 0 when it is not an eigenvalue.
Projection observational_atom(const SpectralData& a, const mpq_class& value);

/// A quantum real as a set in the projection-valued universe: grid point k is
/// the numeral k (a check-set) and belongs to the set with value E(grid[k]).
/// `grid_set` holds all grid numerals, `top` is the last one.
struct RealEncoding {
  QSetPtr<ProjectionLattice> real;
  QSetPtr<ProjectionLattice> grid_set;
  QSetPtr<ProjectionLattice> top;

  Environment<ProjectionLattice> environment(const std::string& name = "u") const;
};
RealEncoding encode_real(const ProjectionLattice& lattice, const QReal& a);

/// Bounded rendering of "u is a real number on the grid": u is a subset of the
/// grid, upward closed along the grid order, and contains the top point.
/// Free variables: u, g (grid), t (top).
Formula real_predicate();

}  // namespace qst
