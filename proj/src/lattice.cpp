#include "mibgap/lattice.hpp"

#include <utility>

namespace mibgap {

namespace {

// Extended gcd: g = s a + t b.
void ext_gcd(const Integer& a, const Integer& b, Integer& g, Integer& s, Integer& t) {
  Integer old_r = a, r = b, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = tmp;
    tmp = old_t - q * cur_t;
    old_t = cur_t;
    cur_t = tmp;
  }
  g = old_r;
  s = old_s;
  t = old_t;
  if (g < 0) {
    g = -g;
    s = -s;
    t = -t;
  }
}

// Replaces columns (p, j) of both matrices by the unimodular combination
// that puts gcd(h(i,p), h(i,j)) in column p and zero in column j.
void combine_columns(IntMatrix& h, IntMatrix& u, Eigen::Index i, Eigen::Index p, Eigen::Index j) {
  const Integer a = h(i, p), b = h(i, j);
  Integer g, s, t;
  ext_gcd(a, b, g, s, t);
  const Integer a_g = a / g, b_g = b / g;
  auto apply = [&](IntMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      Integer cp = m(r, p), cj = m(r, j);
      m(r, p) = s * cp + t * cj;
      m(r, j) = -b_g * cp + a_g * cj;
    }
  };
  apply(h);
  apply(u);
}

}  // namespace

ColumnHermite column_hermite(const IntMatrix& e) {
  ColumnHermite out{e, IntMatrix::Identity(e.cols(), e.cols()), 0};
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < e.rows() && p < e.cols(); ++i) {
    for (Eigen::Index j = p + 1; j < e.cols(); ++j)
      if (out.h(i, j) != 0) combine_columns(out.h, out.u, i, p, j);
    if (out.h(i, p) == 0) continue;
    if (out.h(i, p) < 0) {
      out.h.col(p) = -out.h.col(p);
      out.u.col(p) = -out.u.col(p);
    }
    ++p;
  }
  out.rank = p;
  return out;
}

std::optional<IntegerAffineLattice> solve_integer_system(const IntMatrix& e, const IntVector& f) {
  if (e.rows() != f.size()) throw DimensionMismatch("solve_integer_system: rhs length");
  const ColumnHermite ch = column_hermite(e);
  // H y = f with H in column echelon form; pivots appear in increasing rows.
  IntVector y = IntVector::Zero(e.cols());
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    Integer acc = f[i];
    for (Eigen::Index j = 0; j < p; ++j) acc -= ch.h(i, j) * y[j];
    if (p < ch.rank && ch.h(i, p) != 0) {
      if (acc % ch.h(i, p) != 0) return std::nullopt;
      y[p] = acc / ch.h(i, p);
      ++p;
    } else if (acc != 0) {
      return std::nullopt;
    }
  }
  IntegerAffineLattice out;
  out.particular = ch.u * y;
  out.kernel = ch.u.rightCols(e.cols() - ch.rank);
  return out;
}

}  // namespace mibgap
