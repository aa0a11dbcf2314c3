#pragma once

// Gap satisfiability for bounded MIB systems.
//
// solve() either finds an exactly verified assignment (Sat), or proves that
// no assignment has slack eps (Unsat, with a refutation tree), or reports
// Unknown when its budget runs out. A node of the recursion is a
// standard-form system; each refutation step either closes the node or
// splits it into children with fewer integer variables.

#include "mibgap/mib.hpp"
#include "mibgap/real.hpp"
#include "mibgap/relaxation.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mibgap {

/// Certified extents of {y : E y <= f}: lo[k] = -(lo_dual[k] . f) and
/// hi[k] = hi_dual[k] . f with nonnegative duals solving E^T l = -e_k and
/// E^T h = e_k.
struct YBounds {
  std::vector<Rational> lo, hi;
  std::vector<RatVector> lo_dual, hi_dual;
};

/// Empty optional when {E y <= f} is empty; throws UnboundedSystem.
std::optional<YBounds> certified_y_bounds(const MibSystem& s);

/// Which branch a child of a splitting node covers.
struct BranchEquation {
  enum class Kind { ZeroComponent, Hyperplane, FixedValue };
  Kind kind = Kind::ZeroComponent;
  std::size_t index = 0;  // ZeroComponent / FixedValue variable
  IntVector u;            // Hyperplane
  Integer b;              // Hyperplane right side or FixedValue value
};

struct UnsatNode;
using UnsatPtr = std::shared_ptr<const UnsatNode>;

struct ChildLink {
  BranchEquation branch;
  IntVector w;
  IntMatrix p;
  UnsatPtr node;
};

struct UnsatNode {
  enum class Kind {
    Root,        // general-form input: children are the standard pieces
    EmptyReal,   // Farkas multipliers for E y <= f
    Base,        // m = 0: Farkas multipliers for (bilinear rows; E y <= f)
    Continuous,  // x real >= 0, rows at slack eps refuted; children as for RelaxSplit
    RelaxSplit,  // relaxed system refuted; children cover zero components and hyperplanes
    BoundSplit   // x_i >= bound + 1 refuted; children fix x_i = 0..bound
  };
  Kind kind = Kind::Base;
  MibSystem system;
  RatVector farkas;
  YBounds ybounds;
  Certificate real_cert;
  // BoundSplit
  std::size_t bound_var = 0;
  Integer bound;
  // RelaxSplit and Continuous
  std::vector<IntVector> u_primitive;
  Rational omega_hat;
  Rational kappa2;
  std::vector<ChildLink> children;
};

struct Sat {
  Assignment assignment;
  Rational margin;
};
struct Unsat {
  UnsatPtr tree;
};
struct Unknown {
  std::string reason;
};
using GapVerdict = std::variant<Sat, Unsat, Unknown>;

struct SolveOptions {
  std::chrono::milliseconds budget{60000};
  std::size_t max_nodes = 20000;
  unsigned threads = 1;
  KernelOptions kernel{4000, 24, std::nullopt};
  LedgerOptions ledger;
  /// Relaxation is attempted only with at most this many primitive u.
  std::size_t max_width_pairs = 4;
  /// Largest bound tried by the bounding split.
  Integer max_split_bound = 64;
  /// Hyperplane branches are generated only when |U| (2 ceil(kappa2) + 1)
  /// stays within this count.
  std::size_t max_hyperplane_branches = 2048;
  /// Sat fallback: oracle points per round and total.
  std::size_t fallback_points = 200000;
  /// Growing-box cap for the rounding search.
  Integer rounding_cap = 1 << 12;
  /// Called whenever a relaxed system is refuted (used by tests).
  std::function<void(const MibSystem&, const ConstantLedger&)> on_relaxed_refuted;
};

struct SolveStats {
  std::size_t nodes = 0;
  std::size_t kernel_calls = 0;
  std::size_t relaxations_refuted = 0;
  std::size_t roundings = 0;
  std::size_t fallback_points = 0;
  std::optional<ConstantLedger> root_ledger;
};

GapVerdict solve(const MibSystem& s, const Rational& eps, const SolveOptions& options = {},
                 SolveStats* stats = nullptr);

/// m = 0 systems: one LP.
GapVerdict base_case(const MibSystem& s, const Rational& eps);

/// An integer point of P(y) = {x >= 0 : x^T A_i y + b_i^T y <= c_i}, found
/// by growing-box search up to cap.
std::optional<IntVector> round_point(const MibSystem& s, const RatVector& y, const Integer& cap);

/// Children of a refuted relaxation: x_i = 0 for each i, then every base
/// of {u^T x = b, x >= 0} for u in U (primitive) and |b| <= ceil(kappa2).
/// Empty decompositions are dropped.
std::vector<std::pair<BranchEquation, StandardPiece>> split(const MibSystem& s, const ConstantLedger& ledger);

/// The same branch list for explicit width data.
std::vector<std::pair<BranchEquation, StandardPiece>> split(const MibSystem& s, const std::vector<IntVector>& u,
                                                            const Rational& kappa2);

/// Real problem refuted by a Continuous or BoundSplit node.
RealProblem continuous_problem(const MibSystem& s, const Rational& eps, const YBounds& yb,
                               std::optional<std::pair<std::size_t, Integer>> lower = std::nullopt);

/// Real problem refuted by a RelaxSplit node.
RealProblem relaxed_problem(const MibSystem& s, const Rational& eps, const YBounds& yb,
                            const std::vector<IntVector>& u_primitive, const Rational& omega_hat,
                            const Rational& delta);

/// Structural re-check of a refutation tree in exact arithmetic (Farkas
/// sums, kernel certificates, child systems recomputed from (w, P)).
bool verify_unsat(const UnsatNode& node, const Rational& eps);

/// Number of nodes, counting shared subtrees once per reference.
std::size_t tree_size(const UnsatNode& node);

}  // namespace mibgap
