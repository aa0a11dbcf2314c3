#pragma once

// Instance families: the Hilbert gadgets, the doubly exponential family and
// random bounded systems.

#include "mibgap/mib.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace mibgap {

/// x_i = x_j + x_k or x_i = x_j * x_k over variables x_1..x_n (1-based).
struct Equation {
  enum class Kind { Sum, Product };
  Kind kind;
  std::size_t i, j, k;
};

/// Parses "x1=x2+x3; x1=x1*x1" (';' or ',' separated, spaces ignored).
/// Throws std::invalid_argument on malformed input.
std::vector<Equation> parse_equations(std::string_view text);

/// Bounded gadget over x_0..x_n and y_1..y_n: x_0 = 1, x_i y_i = 1,
/// 0 <= y_i <= 1, sums carried over, each product x_i = x_j x_k encoded as
/// (x_j + x_k) y_i = x_0 (y_j + y_k).
MibSystem hilbert_gadget(const std::vector<Equation>& eqs);

/// Unbounded gadget over x_0..x_{n+1} and y_0..y_{n+1}, whose solutions
/// with slack 1/2 mirror positive solutions of eqs.
MibSystem hilbert_unbounded_gadget(const std::vector<Equation>& eqs);

/// x_i y_i <= 1, x_{i+1} y_i >= x_i y_0, x_1 = 2, y_0 = 1, 0 <= y_i <= 1.
MibSystem doubleexp(std::size_t n);

struct RandomSpec {
  std::uint64_t seed = 0;
  Eigen::Index m = 1, n = 1;
  long height = 3;
};

/// A bounded system with entries in [-height, height]: 1 to 3 bilinear
/// rows, y in a box, and x either free in the orthant or capped per
/// coordinate (decided by the seed).
MibSystem random_bounded(const RandomSpec& spec);

}  // namespace mibgap
