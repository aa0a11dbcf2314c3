#pragma once

// Integer linear algebra: column Hermite reduction and integer solutions of
// linear equation systems.

#include "mibgap/numeric.hpp"

#include <optional>

namespace mibgap {

/// E U = H with U unimodular and H in column echelon form.
struct ColumnHermite {
  IntMatrix h;
  IntMatrix u;
  Eigen::Index rank = 0;
};

ColumnHermite column_hermite(const IntMatrix& e);

/// All integer solutions of E x = f as x0 + N t, t in Z^k, N of full
/// column rank (k = cols - rank E). std::nullopt if no integer solution.
struct IntegerAffineLattice {
  IntVector particular;
  IntMatrix kernel;
};

std::optional<IntegerAffineLattice> solve_integer_system(const IntMatrix& e,
                                                         const IntVector& f);

}  // namespace mibgap
