#pragma once

#include "mibgap/lp.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace mibgap {

struct EmptyPolyhedron : std::domain_error {
  EmptyPolyhedron() : std::domain_error("polyhedron is empty") {}
};

struct NotPointed : std::domain_error {
  NotPointed() : std::domain_error("polyhedron contains a line") {}
};

/// Vertices and extreme recession rays of a pointed polyhedron.
struct VRep {
  std::vector<RatVector> vertices;
  std::vector<IntVector> rays;  // primitive integer directions
};

/// Extreme rays of the pointed cone {z : M z <= 0}, by the double
/// description method. Throws NotPointed when rank(M) < cols.
std::vector<IntVector> cone_extreme_rays(const RatMatrix& m);

/// Vertices and recession rays via double description on the homogenized
/// cone. Throws NotPointed for polyhedra with a lineality space.
VRep vrep(const Polyhedron& poly);

/// Vertex set, sorted lexicographically. Throws EmptyPolyhedron on empty
/// input; polyhedra containing a line have no vertices and yield {}.
std::vector<RatVector> vertices(const Polyhedron& poly);

/// sup u^T(x - y) over x, y in poly; std::nullopt encodes +infinity.
std::optional<Rational> width_along(const Polyhedron& poly, const IntVector& u);

/// Rational upper bound on the spectral norm: the Frobenius norm rounded up
/// on a 2^-16 grid (exact whenever the Frobenius norm is rational).
Rational operator_norm_upper(const RatMatrix& a);

inline Rational operator_norm_upper(const IntMatrix& a) {
  return operator_norm_upper(to_rational(a));
}

/// Lexicographic comparison for canonical ordering of vectors.
template <typename Scalar>
bool lex_less(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

}  // namespace mibgap
