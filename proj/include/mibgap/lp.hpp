#pragma once

// Exact rational linear programming over H-polyhedra {x : A x <= b}.
//
// The solver is a dense two-phase tableau simplex with Bland's rule, so the
// pivot sequence (and therefore every certificate) is a deterministic
// function of the input. Free variables are split as x = x+ - x-.

#include "mibgap/numeric.hpp"

#include <optional>
#include <variant>

namespace mibgap {

/// {x in Q^k : A x <= b}.
class Polyhedron {
 public:
  Polyhedron() = default;
  Polyhedron(RatMatrix a, RatVector b);

  const RatMatrix& a() const { return a_; }
  const RatVector& b() const { return b_; }
  Eigen::Index dim() const { return a_.cols(); }
  Eigen::Index rows() const { return a_.rows(); }

  bool contains(const RatVector& x) const;
  /// Adds the row a^T x <= b and returns the extended polyhedron.
  Polyhedron with_row(const RatVector& row, const Rational& rhs) const;

 private:
  RatMatrix a_;
  RatVector b_;
};

enum class Sense { Maximize, Minimize };

struct LpFeasible {
  RatVector point;
  Rational value;
};

/// Nonnegative row multipliers y with y^T A = 0 and y^T b < 0.
struct LpInfeasible {
  RatVector multipliers;
};

/// A feasible point plus a recession ray along which the objective improves
/// without bound.
struct LpUnbounded {
  RatVector point;
  RatVector ray;
};

using LpOutcome = std::variant<LpFeasible, LpInfeasible, LpUnbounded>;

LpOutcome lp_solve(const Polyhedron& poly, const RatVector& objective,
                   Sense sense);

/// Feasibility only: a point, or Farkas multipliers.
std::variant<RatVector, LpInfeasible> lp_feasible(const Polyhedron& poly);

/// Re-checks a Farkas certificate for {A x <= b} in exact arithmetic.
bool verify_farkas(const RatMatrix& a, const RatVector& b,
                   const RatVector& multipliers);

inline bool is_feasible(const LpOutcome& o) {
  return !std::holds_alternative<LpInfeasible>(o);
}

}  // namespace mibgap
