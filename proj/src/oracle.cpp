#include "mibgap/oracle.hpp"

#include "mibgap/lp.hpp"

namespace mibgap {

std::optional<MarginPoint> best_y(const MibSystem& s, const IntVector& x, const Rational& cap) {
  const Eigen::Index n = s.n();
  const Eigen::Index rows = static_cast<Eigen::Index>(s.rows().size());
  const LinearBlock& rb = s.real_block();
  // Variables (y, t): row_i(x) . y + t <= c_i, E y <= f, t <= cap.
  RatMatrix a = RatMatrix::Zero(rows + rb.matrix.rows() + 1, n + 1);
  RatVector b(rows + rb.matrix.rows() + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const BilinearRow& r = s.rows()[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      Integer coef = r.b[k];
      for (Eigen::Index j = 0; j < s.m(); ++j) coef += x[j] * r.a(j, k);
      a(i, k) = Rational(coef);
    }
    a(i, n) = 1;
    b[i] = Rational(r.c);
  }
  for (Eigen::Index i = 0; i < rb.matrix.rows(); ++i) {
    for (Eigen::Index k = 0; k < n; ++k) a(rows + i, k) = Rational(rb.matrix(i, k));
    b[rows + i] = Rational(rb.rhs[i]);
  }
  a(rows + rb.matrix.rows(), n) = 1;
  b[rows + rb.matrix.rows()] = cap;
  RatVector obj = RatVector::Zero(n + 1);
  obj[n] = 1;
  LpOutcome o = lp_solve(Polyhedron(a, b), obj, Sense::Maximize);
  auto* f = std::get_if<LpFeasible>(&o);
  if (!f) return std::nullopt;
  if (rows > 0 && f->value < 0) return std::nullopt;
  MarginPoint out{f->point.head(n), f->value};
  if (rows > 0) {
    out.margin = Rational(s.rows()[0].c) - s.bilinear_value(0, x, out.y);
    for (std::size_t i = 1; i < s.rows().size(); ++i)
      out.margin = std::min(out.margin, Rational(Rational(s.rows()[i].c) - s.bilinear_value(i, x, out.y)));
  }
  return out;
}

OracleResult oracle(const MibSystem& s, const Rational& eps, const Integer& xbound, std::size_t point_cap,
                    std::optional<std::chrono::steady_clock::time_point> deadline) {
  if (xbound < 0) throw std::invalid_argument("oracle: xbound must be nonnegative");
  OracleResult out;
  const Eigen::Index m = s.m();
  const bool standard = s.form() == Form::Standard;
  const Integer lo = standard ? Integer(0) : Integer(-xbound);
  const LinearBlock& ib = s.integer_block();
  IntVector x = IntVector::Constant(m, lo);
  const Rational cap = std::max(eps, Rational(1));
  for (;;) {
    bool in_block = true;
    for (Eigen::Index i = 0; i < ib.matrix.rows() && in_block; ++i) {
      Integer lhs = 0;
      for (Eigen::Index j = 0; j < m; ++j) lhs += ib.matrix(i, j) * x[j];
      in_block = lhs <= ib.rhs[i];
    }
    if (in_block) {
      if (out.points >= point_cap || (deadline && std::chrono::steady_clock::now() > *deadline)) {
        out.complete = false;
        break;
      }
      ++out.points;
      if (auto best = best_y(s, x, cap)) {
        const bool better = !out.witness || best->margin > out.margin;
        if (better) {
          out.witness = Assignment{x, best->y};
          out.margin = best->margin;
        }
        if (best->margin >= eps) {
          out.kind = OracleResult::Kind::SatSlack;
          return out;
        }
        out.kind = OracleResult::Kind::SatNoSlack;
      }
    }
    // Next x: last coordinate fastest.
    Eigen::Index j = m - 1;
    while (j >= 0) {
      if (x[j] < xbound) {
        x[j] += 1;
        break;
      }
      x[j] = lo;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

}  // namespace mibgap
