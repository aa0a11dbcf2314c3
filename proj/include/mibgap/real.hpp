#pragma once

// Certified feasibility for systems of degree-2 polynomial inequalities
// over the reals.
//
// The kernel is a branch-and-prune search over boxes. Each box is pruned
// either by an exact interval enclosure of one row or by a Farkas
// certificate for the linear relaxation obtained from McCormick envelopes.
// Weakenable rows may be relaxed by the budget delta; hard rows must be
// linear and are never relaxed.

#include "mibgap/numeric.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mibgap {

/// Product x_i * x_j with i <= j.
struct Monomial {
  std::size_t i = 0, j = 0;
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.i == b.i && a.j == b.j; }
};

struct LinearTerm {
  std::size_t var;
  Rational coef;
};

struct QuadraticTerm {
  Monomial mono;
  Rational coef;
};

/// linear + quadratic <= rhs.
struct PolyRow {
  std::vector<LinearTerm> linear;
  std::vector<QuadraticTerm> quadratic;
  Rational rhs;
  bool weakenable = true;
  std::string label;

  bool is_linear() const { return quadratic.empty(); }
  Rational evaluate(const RatVector& point) const;
};

/// Lower bound is always finite; a missing upper bound means +infinity.
struct VarBound {
  Rational lo;
  std::optional<Rational> hi;
};

struct RealProblem {
  std::vector<std::string> names;
  std::vector<VarBound> box;
  std::vector<PolyRow> rows;
  Rational delta;

  std::size_t size() const { return box.size(); }
  /// Adds a variable and returns its index.
  std::size_t add_var(std::string name, Rational lo, std::optional<Rational> hi);
};

/// Throws std::invalid_argument when a hard row is nonlinear, a term names
/// an unknown variable, a bound is inverted, or delta <= 0.
void validate(const RealProblem& p);

// Certificates ----------------------------------------------------------

/// Reference to one inequality of a box's linear relaxation.
struct RowRef {
  enum class Kind { Row, Envelope, Lower, Upper };
  Kind kind = Kind::Row;
  std::size_t index = 0;  // row, monomial (position in monomial_table) or variable
  int which = 0;          // envelope number 0..3
};

struct IntervalLeaf {
  std::size_t row;
};

struct FarkasLeaf {
  std::vector<std::pair<RowRef, Rational>> multipliers;
};

struct SplitNode;

/// A refutation of one box.
struct Certificate {
  std::variant<IntervalLeaf, FarkasLeaf, std::shared_ptr<SplitNode>> node;
};

/// The box is cut at var = at into a lower and an upper child.
struct SplitNode {
  std::size_t var;
  Rational at;
  Certificate lower, upper;
};

/// Distinct monomials of p in sorted order; envelope references index it.
std::vector<Monomial> monomial_table(const RealProblem& p);

struct Witness {
  RatVector point;
  bool weakened = false;
};

struct Refuted {
  Certificate cover;
};

/// The search hit a node cap or an unbounded variable it could not close.
struct Inconclusive {
  std::string reason;
};

using RealVerdict = std::variant<Witness, Refuted, Inconclusive>;

struct KernelOptions {
  std::size_t max_nodes = 200000;
  /// Splits of a box with an infinite upper bound allowed along one path.
  unsigned max_unbounded_splits = 48;
  /// Wall-clock limit; the search stops with Inconclusive once passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

RealVerdict decide(const RealProblem& p, const KernelOptions& options = {});

struct WitnessCheck {
  enum class Kind { ExactPass, WeakPass, Fail };
  Kind kind;
  /// For Fail: failing row, or the variable index when box_violation.
  std::size_t row = 0;
  bool box_violation = false;
};

WitnessCheck check_witness(const RealProblem& p, const RatVector& point);

/// Replays a refutation over the full domain of p in exact arithmetic.
bool verify_certificate(const RealProblem& p, const Certificate& c);

/// Number of leaves in a certificate tree.
std::size_t leaf_count(const Certificate& c);

}  // namespace mibgap
