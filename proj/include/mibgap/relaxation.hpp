#pragma once

// Constants that drive the rounding and splitting steps, and the
// strengthened all-real relaxation of a standard-form MIB system.

#include "mibgap/mib.hpp"
#include "mibgap/real.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace mibgap {

struct UnboundedSystem : std::domain_error {
  UnboundedSystem() : std::domain_error("real-linear block is not a polytope") {}
};

/// Rational upper bound on the flatness constant in dimension m:
/// 1, 9/4, then 2 m^3. Throws std::invalid_argument for m < 1.
Rational flatness_bound(Eigen::Index m);

struct LedgerOptions {
  /// Replaces the default flatness table when set.
  std::optional<Rational> omega;
  /// U is listed only when its bounding box holds at most this many points.
  std::size_t u_cap = 1u << 20;
};

struct ConstantLedger {
  Rational eps;
  Eigen::Index m = 0;
  Integer height;
  Rational kappa1_upper;
  Rational r;
  Rational omega_upper;
  Rational omega_hat;
  Rational kappa2;
  Rational kappa3;
  /// Weakening budget handed to the real kernel.
  Rational delta_s;
  /// u belongs to U iff ||u||^2 < u_norm_sq_bound.
  Rational u_norm_sq_bound;
  /// Whether u lists all of U (false when U exceeds the cap).
  bool u_listed = false;
  /// Sign-normalized, ordered by squared norm then lexicographically.
  std::vector<IntVector> u;
  /// The primitive members of u, in the same order.
  std::vector<IntVector> u_primitive;
};

ConstantLedger compute_constants(const MibSystem& s, const Rational& eps, const LedgerOptions& options = {});

/// All sign-normalized nonzero u in Z^m with ||u||^2 < bound, or nothing if
/// the search box [-R, R]^m exceeds cap points.
std::optional<std::vector<IntVector>> enumerate_short_vectors(Eigen::Index m, const Rational& bound,
                                                              std::size_t cap);

bool is_primitive(const IntVector& u);

/// Per-coordinate extents of {y : E y <= f}. Throws UnboundedSystem.
std::vector<std::pair<Rational, Rational>> y_box(const MibSystem& s);

struct RelaxedProblem {
  RealProblem problem;
  std::vector<std::size_t> x_vars, y_vars;
  struct WidthPair {
    IntVector u;
    std::vector<std::size_t> p, q;
  };
  std::vector<WidthPair> pairs;
  /// Indices of the strengthened core rows inside problem.rows.
  std::vector<std::size_t> core_rows;
};

/// Width constraints are built for ledger.u_primitive only: the width of
/// P(y) along k u is k times its width along u, so long multiples add no
/// information.
RelaxedProblem build_relaxed(const MibSystem& s, const Rational& eps, const ConstantLedger& ledger,
                             const std::vector<std::optional<Integer>>& x_upper = {});

/// Same construction with an explicit y box and width data.
RelaxedProblem build_relaxed_in_box(const MibSystem& s, const Rational& eps,
                                    const std::vector<std::pair<Rational, Rational>>& ybox,
                                    const std::vector<IntVector>& u_primitive, const Rational& omega_hat,
                                    const Rational& delta, const std::vector<std::optional<Integer>>& x_upper = {});

/// x^T A y + b^T y <= rhs over the given variable indices (weakenable).
PolyRow bilinear_poly_row(const BilinearRow& row, const std::vector<std::size_t>& xs,
                          const std::vector<std::size_t>& ys, const Rational& rhs, std::string label);

/// E y <= f as hard linear rows.
void append_real_block(RealProblem& p, const LinearBlock& rb, const std::vector<std::size_t>& ys);

}  // namespace mibgap
