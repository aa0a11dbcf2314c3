#pragma once

// Mixed-integer bilinear (MIB) systems over integer x in Z^m and real
// y in R^n:
//
//   x^T A_i y + b_i^T y <= c_i     (bilinear rows, the only rows with slack)
//   C x <= d                       (integer-linear block)
//   E y <= f                       (real-linear block)
//
// A system is in standard form when its integer-linear block is exactly
// -x <= 0.

#include "mibgap/numeric.hpp"

#include <variant>
#include <vector>

namespace mibgap {

struct BilinearRow {
  IntMatrix a;  // m x n
  IntVector b;  // n
  Integer c;
};

struct LinearBlock {
  IntMatrix matrix;
  IntVector rhs;
};

struct Assignment {
  IntVector x;
  RatVector y;
};

enum class Form { General, Standard };

class MibSystem {
 public:
  MibSystem() = default;
  MibSystem(Eigen::Index m, Eigen::Index n, std::vector<BilinearRow> rows, LinearBlock integer_block,
            LinearBlock real_block);

  /// Standard-form system: the integer-linear block is set to -x <= 0.
  static MibSystem standard(Eigen::Index m, Eigen::Index n, std::vector<BilinearRow> rows,
                            LinearBlock real_block);

  Eigen::Index m() const { return m_; }
  Eigen::Index n() const { return n_; }
  const std::vector<BilinearRow>& rows() const { return rows_; }
  const LinearBlock& integer_block() const { return integer_block_; }
  const LinearBlock& real_block() const { return real_block_; }

  Form form() const;
  /// Largest absolute value of any stored constant; recomputed on each call.
  Integer height() const;

  /// Left side x^T A_i y + b_i^T y of bilinear row i.
  Rational bilinear_value(std::size_t i, const IntVector& x, const RatVector& y) const;

  friend bool operator==(const MibSystem& a, const MibSystem& b);

 private:
  Eigen::Index m_ = 0, n_ = 0;
  std::vector<BilinearRow> rows_;
  LinearBlock integer_block_;
  LinearBlock real_block_;
};

enum class Block { Bilinear, IntegerLinear, RealLinear };

struct SlackCheck {
  enum class Kind { SatWithSlack, SatNoSlack, Violated };
  Kind kind;
  /// Minimum margin c_i - lhs_i over bilinear rows (no rows: unset flag).
  Rational margin;
  bool has_bilinear_rows = false;
  Block violated_block = Block::Bilinear;
  std::size_t violated_row = 0;
};

SlackCheck check_assignment(const MibSystem& s, const Assignment& a, const Rational& eps);

struct BoundedY {
  Rational kappa1_upper;
};
struct UnboundedY {
  RatVector ray;
};
using Boundedness = std::variant<BoundedY, UnboundedY>;

/// Decides whether {y : E y <= f} is a polytope. kappa1_upper is the
/// larger of the ball-radius formula sqrt(m) H^(m^2+m) (sqrt(m) rounded up
/// to a half-integer, product rounded up) and the exact radius bound
/// obtained from the per-coordinate LP extents.
Boundedness is_bounded(const MibSystem& s);

/// The ball-radius formula alone, for given m and H.
Rational kappa1_formula(Eigen::Index m, const Integer& height);

/// A standard-form system together with the change of variables x = w + P z
/// that maps its integer solutions back to the source system.
struct StandardPiece {
  MibSystem system;
  IntVector w;
  IntMatrix p;
};

struct Unpointed : std::domain_error {
  Unpointed() : std::domain_error("integer-linear block does not imply a pointed region") {}
};

/// Rewrites a general-form system as a finite family of standard-form
/// systems whose solution sets partition-cover the input's (one-one via the
/// recorded substitution). Throws Unpointed.
std::vector<StandardPiece> to_standard_form(const MibSystem& s);

/// Maps a solution of a standard piece back to the source system.
Assignment lift(const StandardPiece& piece, const Assignment& a);

/// Removes exact duplicate rows in every block.
MibSystem without_duplicate_rows(const MibSystem& s);

}  // namespace mibgap
