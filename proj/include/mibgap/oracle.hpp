#pragma once

// Brute-force reference decision for MIB systems with bounded integer
// search: every integer x in the window is fixed in turn and the remaining
// linear program over y is solved exactly.

#include "mibgap/mib.hpp"

#include <chrono>
#include <optional>

namespace mibgap {

/// Best y for a fixed integer x: maximizes the least bilinear margin, capped
/// at `cap`. Empty when no y satisfies the rows at slack 0.
struct MarginPoint {
  RatVector y;
  Rational margin;
};
std::optional<MarginPoint> best_y(const MibSystem& s, const IntVector& x, const Rational& cap);

struct OracleResult {
  enum class Kind { SatSlack, SatNoSlack, UnsatWithinBound };
  Kind kind = Kind::UnsatWithinBound;
  /// Witness for the Sat kinds: the first x in enumeration order reaching
  /// margin eps, else the best margin found.
  std::optional<Assignment> witness;
  Rational margin;
  std::size_t points = 0;
  /// False when point_cap stopped the enumeration early.
  bool complete = true;
};

/// Standard form: x in [0, xbound]^m. General form: |x_i| <= xbound and
/// C x <= d. Coordinates are enumerated lexicographically, first
/// coordinate slowest. point_cap and deadline stop the enumeration early
/// (complete = false).
OracleResult oracle(const MibSystem& s, const Rational& eps, const Integer& xbound,
                    std::size_t point_cap = std::size_t(-1),
                    std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt);

}  // namespace mibgap
