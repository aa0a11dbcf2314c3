#pragma once

// Exact scalar types and the dense Eigen containers built on them.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mibgap {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using IntVector = Vector<Integer>;
using RatMatrix = Matrix<Rational>;
using RatVector = Vector<Rational>;

/// Thrown when operand shapes disagree.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline Integer numerator(const Rational& q) { return mp::numerator(q); }
inline Integer denominator(const Rational& q) { return mp::denominator(q); }

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

inline Integer floor(const Rational& q) {
  return floor_div(numerator(q), denominator(q));
}

inline Integer ceil(const Rational& q) { return -floor(Rational(-q)); }

inline Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }
inline Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

inline Integer gcd(const Integer& a, const Integer& b) {
  return mp::gcd(a, b);
}

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return abs(Integer(a / gcd(a, b) * b));
}

inline Integer pow(const Integer& base, unsigned exponent) {
  return mp::pow(base, exponent);
}

/// Smallest integer s with s*s >= a (a >= 0).
inline Integer isqrt_ceil(const Integer& a) {
  if (a <= 0) return 0;
  Integer s = mp::sqrt(a);
  if (s * s < a) s += 1;
  return s;
}

/// Rational upper bound on sqrt(q) for q >= 0, exact when q is a perfect
/// square and otherwise within 1/scale of the true root.
inline Rational sqrt_upper(const Rational& q, const Integer& scale = 1) {
  if (q <= 0) return 0;
  Integer num = numerator(q), den = denominator(q);
  Integer sn = mp::sqrt(num), sd = mp::sqrt(den);
  if (sn * sn == num && sd * sd == den) return Rational(sn, sd);
  // sqrt(num/den) = sqrt(num*den*scale^2) / (den*scale)
  Integer radicand = num * den * scale * scale;
  return Rational(isqrt_ceil(radicand), den * scale);
}

/// Parses "p", "-p" or "p/q" into an exact rational.
Rational parse_rational(std::string_view text);
/// Parses a decimal integer string.
Integer parse_integer(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

template <typename Scalar>
bool is_zero(const Vector<Scalar>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0) return false;
  return true;
}

template <typename Scalar>
Scalar dot(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  Scalar s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RatVector to_rational(const IntVector& v) { return v.cast<Rational>(); }
inline RatMatrix to_rational(const IntMatrix& m) { return m.cast<Rational>(); }

/// Scales a rational vector to the primitive integer vector on the same ray.
IntVector primitive_direction(const RatVector& v);

/// Rank of a rational matrix by exact Gaussian elimination.
Eigen::Index rank(const RatMatrix& m);

/// Exact solve of a square nonsingular system; returns false if singular.
bool solve_square(const RatMatrix& a, const RatVector& b, RatVector& x);

template <typename Scalar>
std::vector<Scalar> to_std(const Vector<Scalar>& v) {
  return std::vector<Scalar>(v.data(), v.data() + v.size());
}

template <typename Scalar>
Vector<Scalar> from_std(const std::vector<Scalar>& v) {
  Vector<Scalar> out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace mibgap
