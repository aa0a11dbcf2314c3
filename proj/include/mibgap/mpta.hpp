#pragma once

// Multi-priced timed automata: run semantics, observer splitting, bounded
// integer-time run enumeration, and the reduction of gap domination to gap
// satisfiability of bounded MIB systems.

#include "mibgap/gap.hpp"
#include "mibgap/semilinear.hpp"

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mibgap {

struct GuardAtom {
  enum class Op { Le, Ge };
  std::size_t clock;
  Op op;
  Integer bound;  // natural
};

struct MptaEdge {
  std::size_t source, target;
  std::vector<GuardAtom> guard;
  std::vector<std::size_t> resets;
};

struct Mpta {
  std::vector<std::string> locations;
  std::size_t initial = 0;
  std::vector<bool> accepting;
  std::vector<std::string> clocks;
  std::vector<std::string> observers;
  std::vector<MptaEdge> edges;
  /// rates[l][y]: derivative of observer y in location l.
  std::vector<IntVector> rates;

  /// Throws std::invalid_argument naming the first broken invariant.
  void validate() const;
};

/// One delay per edge: delays[i] is the dwell in the current location
/// before edges[i] fires. The final location contributes nothing.
struct RunValue {
  RatVector value;
  std::size_t final_location;
};
struct Rejected {
  std::size_t step;
  std::string reason;
};
using SimulateResult = std::variant<RunValue, Rejected>;

SimulateResult simulate(const Mpta& a, const std::vector<std::size_t>& edges, const std::vector<Rational>& delays);

/// Observers y become y_+ and y_- (interleaved: 2k and 2k + 1) with rates
/// max(R, 0) and max(-R, 0); phi (d x 2d) maps split values back.
struct SplitAutomaton {
  Mpta automaton;
  IntMatrix phi;
};
SplitAutomaton split_observers(const Mpta& a);

/// Values of accepting runs with at most max_steps edges and integer delays
/// summing to at most max_time, grouped by edge sequence.
struct IntegerRuns {
  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::set<std::vector<Integer>>> values;  // per path
};
IntegerRuns integer_runs(const Mpta& a, std::size_t max_steps, const Integer& max_time);

/// The union of all values of integer_runs.
std::set<std::vector<Integer>> enumerate_integer_runs(const Mpta& a, std::size_t max_steps, const Integer& max_time);

struct TimedRun {
  std::vector<std::size_t> edges;
  std::vector<Integer> delays;
};

/// An accepting integer-time run with the given value within the same
/// bounds as integer_runs, if there is one.
std::optional<TimedRun> find_integer_run(const Mpta& a, const std::vector<Integer>& value, std::size_t max_steps,
                                         const Integer& max_time);

/// (d + 1)-tuples of values along a common edge sequence, as fixed-base
/// linear sets over (Z^d)^(d+1). Along one edge sequence the reachable
/// values are convex, so every such tuple is an under-approximation.
std::vector<LinearSet> run_pieces(const IntegerRuns& runs, std::size_t d);

struct DominationQuery {
  RatVector gamma;
  Rational eps;
  std::vector<LinearSet> pieces;
  /// True when the pieces cover every accepting run (enables NotDominated).
  bool exact = false;
};

/// Master system for one piece: integer variables are the period
/// multipliers, real variables the weights lambda_1..lambda_{d+1}. Rows are
/// scaled by the lcm of gamma's denominators; slack() gives the matching
/// solver slack.
struct MasterSystem {
  MibSystem system;
  Integer scale;
  Rational slack(const Rational& eps) const { return Rational(scale) * eps; }
};
MasterSystem assemble_master(const LinearSet& piece, const RatVector& gamma, std::size_t d);

struct Dominated {
  std::size_t piece;
  std::vector<IntVector> vertices;  // gamma_1..gamma_{d+1}
  RatVector lambda;
  RatVector combination;
};
struct NotDominated {};
struct DominationUnknown {
  std::string reason;
};
using DominationVerdict = std::variant<Dominated, NotDominated, DominationUnknown>;

/// Dominated only with an exactly checked combination <= gamma - eps.
DominationVerdict gap_dominate(const Mpta& a, const DominationQuery& q, const SolveOptions& options = {});

/// Exact re-check of a Dominated payload against gamma - eps.
bool check_domination(const Dominated& w, const RatVector& gamma, const Rational& eps);

}  // namespace mibgap
