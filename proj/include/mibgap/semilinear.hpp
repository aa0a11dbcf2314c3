#pragma once

// Linear and hybrid linear sets of integer vectors, the decomposition of
// {x in Z^m : C x <= d} into such sets, and the change of variables
// x = w + P z on standard-form MIB systems.

#include "mibgap/mib.hpp"

#include <vector>

namespace mibgap {

/// {w + P z : z in Z^k, z >= 0}.
struct LinearSet {
  IntVector base;
  IntMatrix periods;  // m x k, no zero columns

  Eigen::Index dim() const { return base.size(); }
  Eigen::Index period_count() const { return periods.cols(); }
};

/// Finite union of linear sets over a shared ambient dimension.
struct HybridLinearSet {
  Eigen::Index dim = 0;
  std::vector<LinearSet> pieces;

  bool empty() const { return pieces.empty(); }
};

/// Exact decomposition of {x in Z^m : C x <= d}. Implicit equalities are
/// eliminated through an integer kernel basis; the remaining polyhedron's
/// recession cone is triangulated and every simplicial cone contributes the
/// integer points of (vertex hull + half-open fundamental parallelepiped)
/// as bases. Throws Unpointed when the rational solution set is non-empty
/// and contains a line.
HybridLinearSet decompose(const IntMatrix& c, const IntVector& d);

/// The standard-form system in z obtained by x = w + P z. Requires w >= 0
/// and P >= 0 entrywise so that x >= 0 is implied by z >= 0.
MibSystem substitute(const MibSystem& system, const IntVector& w, const IntMatrix& p);

/// Rewrites the bilinear and real-linear rows for x = w + P z without
/// touching the integer-linear block (callers add the block they need).
std::vector<BilinearRow> substitute_rows(const std::vector<BilinearRow>& rows, const IntVector& w,
                                         const IntMatrix& p);

/// Exhaustively compares the denotation of hls with {x : C x <= d} on the
/// box [0, bound]^m.
bool window_check(const HybridLinearSet& hls, const IntMatrix& c, const IntVector& d,
                  const Integer& bound);

/// Every point of the linear set inside the box [lo, hi]^m.
std::vector<IntVector> points_in_box(const LinearSet& set, const Integer& lo, const Integer& hi);

/// Largest absolute entry across all bases and periods.
Integer max_entry(const HybridLinearSet& hls);

/// The magnitude bound (2 + (m+1) H)^m for m variables and height H.
Integer pottier_bound(Eigen::Index m, const Integer& height);

}  // namespace mibgap
