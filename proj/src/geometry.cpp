#include "mibgap/geometry.hpp"

#include <algorithm>

namespace mibgap {

namespace {

Rational row_dot(const RatMatrix& m, Eigen::Index row, const IntVector& z) {
  Rational s = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    if (m(row, j) != 0 && z[j] != 0) s += m(row, j) * Rational(z[j]);
  return s;
}

// Greedy choice of rows forming a basis of the row space.
std::vector<Eigen::Index> independent_rows(const RatMatrix& m) {
  std::vector<Eigen::Index> chosen;
  RatMatrix acc(0, m.cols());
  for (Eigen::Index i = 0; i < m.rows() && static_cast<Eigen::Index>(chosen.size()) < m.cols(); ++i) {
    RatMatrix trial(acc.rows() + 1, m.cols());
    trial.topRows(acc.rows()) = acc;
    trial.row(acc.rows()) = m.row(i);
    if (rank(trial) == trial.rows()) {
      acc = trial;
      chosen.push_back(i);
    }
  }
  return chosen;
}

}  // namespace

std::vector<IntVector> cone_extreme_rays(const RatMatrix& m) {
  const Eigen::Index d = m.cols();
  std::vector<Eigen::Index> base = independent_rows(m);
  if (static_cast<Eigen::Index>(base.size()) < d) throw NotPointed();

  // Initial simplicial cone: columns of -M0^{-1}.
  RatMatrix m0(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m0.row(i) = m.row(base[static_cast<std::size_t>(i)]);
  std::vector<IntVector> rays;
  for (Eigen::Index i = 0; i < d; ++i) {
    RatVector rhs = RatVector::Zero(d);
    rhs[i] = -1;
    RatVector r;
    solve_square(m0, rhs, r);
    rays.push_back(primitive_direction(r));
  }

  std::vector<bool> processed(static_cast<std::size_t>(m.rows()), false);
  for (Eigen::Index i : base) processed[static_cast<std::size_t>(i)] = true;
  std::vector<Eigen::Index> done(base.begin(), base.end());
  std::sort(done.begin(), done.end());

  for (Eigen::Index row = 0; row < m.rows(); ++row) {
    if (processed[static_cast<std::size_t>(row)]) continue;
    std::vector<Rational> val(rays.size());
    std::vector<std::size_t> pos, neg, zero;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      val[r] = row_dot(m, row, rays[r]);
      (val[r] > 0 ? pos : val[r] < 0 ? neg : zero).push_back(r);
    }
    if (pos.empty()) {
      processed[static_cast<std::size_t>(row)] = true;
      done.insert(std::upper_bound(done.begin(), done.end(), row), row);
      continue;
    }
    // Tight-set per ray over processed rows, for the adjacency test.
    std::vector<std::vector<Eigen::Index>> tight(rays.size());
    for (std::size_t r = 0; r < rays.size(); ++r)
      for (Eigen::Index q : done)
        if (row_dot(m, q, rays[r]) == 0) tight[r].push_back(q);

    std::vector<IntVector> next;
    for (std::size_t r : neg) next.push_back(rays[r]);
    for (std::size_t r : zero) next.push_back(rays[r]);
    for (std::size_t p : pos) {
      for (std::size_t n : neg) {
        std::vector<Eigen::Index> common;
        std::set_intersection(tight[p].begin(), tight[p].end(), tight[n].begin(), tight[n].end(),
                              std::back_inserter(common));
        if (static_cast<Eigen::Index>(common.size()) < d - 2) continue;
        RatMatrix sub(static_cast<Eigen::Index>(common.size()), d);
        for (std::size_t c = 0; c < common.size(); ++c) sub.row(static_cast<Eigen::Index>(c)) = m.row(common[c]);
        if (rank(sub) != d - 2) continue;
        RatVector combo(d);
        for (Eigen::Index j = 0; j < d; ++j)
          combo[j] = val[p] * Rational(rays[n][j]) - val[n] * Rational(rays[p][j]);
        next.push_back(primitive_direction(combo));
      }
    }
    rays = std::move(next);
    processed[static_cast<std::size_t>(row)] = true;
    done.insert(std::upper_bound(done.begin(), done.end(), row), row);
  }
  std::sort(rays.begin(), rays.end(), lex_less<Integer>);
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  return rays;
}

VRep vrep(const Polyhedron& poly) {
  const Eigen::Index k = poly.dim();
  if (rank(poly.a()) < k) throw NotPointed();
  // Homogenize: {(x, t) : A x - b t <= 0, -t <= 0}.
  RatMatrix h(poly.rows() + 1, k + 1);
  h.topLeftCorner(poly.rows(), k) = poly.a();
  h.topRightCorner(poly.rows(), 1) = -poly.b();
  h.row(poly.rows()).setZero();
  h(poly.rows(), k) = -1;
  VRep out;
  for (const IntVector& r : cone_extreme_rays(h)) {
    if (r[k] > 0) {
      RatVector v(k);
      for (Eigen::Index j = 0; j < k; ++j) v[j] = Rational(r[j], r[k]);
      out.vertices.push_back(std::move(v));
    } else {
      out.rays.push_back(r.head(k));
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end(), lex_less<Rational>);
  return out;
}

std::vector<RatVector> vertices(const Polyhedron& poly) {
  if (std::holds_alternative<LpInfeasible>(lp_feasible(poly))) throw EmptyPolyhedron();
  if (rank(poly.a()) < poly.dim()) return {};
  return vrep(poly).vertices;
}

std::optional<Rational> width_along(const Polyhedron& poly, const IntVector& u) {
  if (u.size() != poly.dim()) throw DimensionMismatch("width_along: direction length");
  if (is_zero(u)) throw std::invalid_argument("width_along: zero direction");
  RatVector c = to_rational(u);
  LpOutcome hi = lp_solve(poly, c, Sense::Maximize);
  if (std::holds_alternative<LpInfeasible>(hi)) throw EmptyPolyhedron();
  if (std::holds_alternative<LpUnbounded>(hi)) return std::nullopt;
  LpOutcome lo = lp_solve(poly, c, Sense::Minimize);
  if (std::holds_alternative<LpUnbounded>(lo)) return std::nullopt;
  return std::get<LpFeasible>(hi).value - std::get<LpFeasible>(lo).value;
}

Rational operator_norm_upper(const RatMatrix& a) {
  Rational frob_sq = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) frob_sq += a(i, j) * a(i, j);
  return sqrt_upper(frob_sq, Integer(65536));
}

}  // namespace mibgap
