#include "mibgap/numeric.hpp"

#include <cctype>

namespace mibgap {

namespace {

bool is_decimal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Integer parse_integer(std::string_view text) {
  if (!is_decimal(text))
    throw std::invalid_argument("not a decimal integer: '" + std::string(text) + "'");
  std::string s(text);
  if (s[0] == '+') s.erase(0, 1);
  return Integer(s);
}

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  Integer num = parse_integer(text.substr(0, slash));
  std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
    throw std::invalid_argument("denominator must be unsigned: '" + std::string(text) + "'");
  Integer den = parse_integer(den_text);
  if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Integer& z) { return z.str(); }

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

IntVector primitive_direction(const RatVector& v) {
  Integer l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) l = lcm(l, denominator(v[i]));
  IntVector out(v.size());
  Integer g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = numerator(v[i]) * (l / denominator(v[i]));
    g = gcd(g, out[i]);
  }
  if (g > 1)
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] /= g;
  return out;
}

Eigen::Index rank(const RatMatrix& m) {
  RatMatrix a = m;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < a.cols() && r < a.rows(); ++c) {
    Eigen::Index p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    a.row(p).swap(a.row(r));
    for (Eigen::Index i = r + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      Rational f = a(i, c) / a(r, c);
      a.row(i) -= f * a.row(r);
    }
    ++r;
  }
  return r;
}

bool solve_square(const RatMatrix& a_in, const RatVector& b_in, RatVector& x) {
  const Eigen::Index n = a_in.rows();
  if (a_in.cols() != n || b_in.size() != n)
    throw DimensionMismatch("solve_square: shape mismatch");
  RatMatrix a(n, n + 1);
  a.leftCols(n) = a_in;
  a.col(n) = b_in;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return false;
    a.row(p).swap(a.row(c));
    Rational inv = Rational(1) / a(c, c);
    a.row(c) *= inv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rational f = a(i, c);
      a.row(i) -= f * a.row(c);
    }
  }
  x = a.col(n);
  return true;
}

}  // namespace mibgap
