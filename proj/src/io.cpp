#include "qst/io.hpp"

#include <cmath>

namespace qst {

using nlohmann::json;

namespace {

int positive_int(const json& j, const char* key, int lo, int hi) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw DataError(std::string("missing integer \"") + key + "\"");
  const auto v = j[key].get<long long>();
  if (v < lo || v > hi) {
    throw DataError(std::string("\"") + key + "\" = " + std::to_string(v) + " outside " + std::to_string(lo) + ".." +
                    std::to_string(hi));
  }
  return static_cast<int>(v);
}

mpq_class rational_from_json(const json& j) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  if (!j.is_string()) throw DataError("expected a rational string such as \"-3/4\", got " + j.dump());
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

std::complex<double> decimal_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw DataError("decimal entries are numbers or [re, im] pairs, got " + j.dump());
}

ExactVector exact_vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw DataError("state entries must be a nonempty array");
  ExactVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = entry_from_json(j[i]);
  return v;
}

}  // namespace

std::string LatticeSpec::describe() const {
  return kind == LatticeKind::boolean ? "boolean algebra on " + std::to_string(size) + " atoms"
                                      : "projection lattice of C^" + std::to_string(size);
}

LatticeSpec lattice_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw DataError("lattice needs a \"kind\"");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "boolean") return {LatticeKind::boolean, positive_int(j, "atoms", 0, BooleanAlgebra::max_atoms)};
  if (kind == "projection") return {LatticeKind::projection, positive_int(j, "dim", 1, 64)};
  throw DataError("unknown lattice kind \"" + kind + "\"");
}

json to_json(const LatticeSpec& spec) {
  if (spec.kind == LatticeKind::boolean) return {{"kind", "boolean"}, {"atoms", spec.size}};
  return {{"kind", "projection"}, {"dim", spec.size}};
}

GaussianRational entry_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) throw DataError("complex entries are [re, im] pairs, got " + j.dump());
    return {rational_from_json(j[0]), rational_from_json(j[1])};
  }
  return GaussianRational(rational_from_json(j));
}

json to_json(const GaussianRational& z) {
  if (z.is_real()) return rational_to_string(z.real());
  return json::array({rational_to_string(z.real()), rational_to_string(z.imag())});
}

ExactMatrix matrix_from_json(const json& j, int dim) {
  if (!j.is_array() || j.empty()) throw DataError("matrix must be a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  if (dim >= 0 && n != dim) throw DataError("matrix has " + std::to_string(n) + " rows, expected " + std::to_string(dim));
  ExactMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw DataError("matrix row " + std::to_string(r) + " does not have " + std::to_string(n) + " entries");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json matrix_to_json(const ExactMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Projection projection_from_json(const json& j, int dim) {
  try {
    return Projection::from_matrix(matrix_from_json(j, dim));
  } catch (const InvalidProjection& e) {
    throw DataError(e.what());
  }
}

SpectralData spectral_from_json(const json& j) {
  if (!j.is_object()) throw DataError("observable must be an object");
  const int dim = positive_int(j, "dim", 1, 64);
  if (!j.contains("eigen") || !j["eigen"].is_array()) throw DataError("observable needs an \"eigen\" array");
  std::vector<SpectralData::Eigenspace> spaces;
  for (const auto& e : j["eigen"]) {
    if (!e.is_object() || !e.contains("value") || !e.contains("proj")) throw DataError("eigenspaces need \"value\" and \"proj\"");
    spaces.push_back({rational_from_json(e["value"]), projection_from_json(e["proj"], dim)});
  }
  try {
    return SpectralData::from_eigenspaces(dim, std::move(spaces));
  } catch (const InvalidProjection& e) {
    throw DataError(e.what());
  }
}

json to_json(const SpectralData& sd) {
  json eigen = json::array();
  for (const auto& e : sd.spaces) {
    eigen.push_back({{"value", rational_to_string(e.value)}, {"proj", matrix_to_json(e.proj.matrix())}});
  }
  return {{"dim", sd.dim}, {"eigen", std::move(eigen)}};
}

StateVector state_from_json(const json& j) {
  if (!j.is_object()) throw DataError("state must be an object");
  StateVector out = [&] {
    if (j.contains("exact")) return StateVector::exact(exact_vector_from_json(j["exact"]));
    if (j.contains("ray")) {
      try {
        return StateVector::ray(exact_vector_from_json(j["ray"]));
      } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
      }
    }
    if (j.contains("decimal")) {
      const json& d = j["decimal"];
      if (!d.is_array() || d.empty()) throw DataError("state entries must be a nonempty array");
      Eigen::VectorXcd v(static_cast<Eigen::Index>(d.size()));
      for (std::size_t i = 0; i < d.size(); ++i) v(static_cast<Eigen::Index>(i)) = decimal_from_json(d[i]);
      return StateVector::decimal(v);
    }
    throw DataError("state needs \"exact\", \"ray\" or \"decimal\" entries");
  }();
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<int>() != out.dim())) {
    throw DataError("state has " + std::to_string(out.dim()) + " entries but \"dim\" says " + j["dim"].dump());
  }
  return out;
}

json to_json(const StateVector& psi) {
  json entries = json::array();
  if (psi.is_exact()) {
    for (const auto& z : psi.exact_entries()) entries.push_back(to_json(z));
    return {{"dim", psi.dim()}, {psi.is_ray() ? "ray" : "exact", std::move(entries)}};
  }
  for (const auto& z : psi.decimal_entries()) {
    if (z.imag() == 0) {
      entries.push_back(z.real());
    } else {
      entries.push_back(json::array({z.real(), z.imag()}));
    }
  }
  return {{"dim", psi.dim()}, {"decimal", std::move(entries)}};
}

BooleanAlgebra::Element value_from_json(const BooleanAlgebra& b, const json& j) {
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)) {
    const auto mask = j.get<unsigned long long>();
    if (mask > b.full_mask()) {
      throw DataError("mask " + std::to_string(mask) + " outside the algebra on " + std::to_string(b.atom_count()) + " atoms");
    }
    return b.element(static_cast<unsigned>(mask));
  }
  throw DataError("boolean truth values are atom masks, got " + j.dump());
}

Projection value_from_json(const ProjectionLattice& l, const json& j) {
  if (j == json(0) || j == json("0")) return l.bottom();
  if (j == json(1) || j == json("1")) return l.top();
  if (j.is_array()) return projection_from_json(j, l.dim());
  throw DataError("projection truth values are matrices, 0 or 1, got " + j.dump());
}

json value_to_json(const BooleanAlgebra& b, BooleanAlgebra::Element v) {
  if (v.atoms != b.atom_count()) throw LatticeMismatch("value from another algebra");
  return v.bits;
}

json value_to_json(const ProjectionLattice& l, const Projection& v) {
  if (v.dim() != l.dim()) throw LatticeMismatch("projection of another dimension");
  return matrix_to_json(v.matrix());
}

}  // namespace qst
