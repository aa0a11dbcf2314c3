#include "mibgap/semilinear.hpp"

#include "mibgap/geometry.hpp"
#include "mibgap/lattice.hpp"
#include "mibgap/lp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mibgap {

namespace {

using RaySubset = std::vector<std::size_t>;

Eigen::Index rank_of(const std::vector<IntVector>& rays, const RaySubset& subset, Eigen::Index dim) {
  if (subset.empty()) return 0;
  RatMatrix m(static_cast<Eigen::Index>(subset.size()), dim);
  for (std::size_t i = 0; i < subset.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = to_rational(rays[subset[i]]).transpose();
  return rank(m);
}

// Pulling triangulation of the pointed cone spanned by rays[subset], whose
// faces are cut out by rows of {cone_rows t <= 0}.
std::vector<RaySubset> triangulate(const std::vector<IntVector>& rays, const RatMatrix& cone_rows,
                                   const RaySubset& subset) {
  const Eigen::Index dim = cone_rows.cols();
  const Eigen::Index r = rank_of(rays, subset, dim);
  if (static_cast<Eigen::Index>(subset.size()) == r) return {subset};
  const std::size_t apex = subset.front();
  const RatVector apex_dir = to_rational(rays[apex]);
  std::set<RaySubset> facets;
  for (Eigen::Index q = 0; q < cone_rows.rows(); ++q) {
    if (RatVector(cone_rows.row(q).transpose()).dot(apex_dir) >= 0) continue;
    RaySubset face;
    for (std::size_t s : subset)
      if (RatVector(cone_rows.row(q).transpose()).dot(to_rational(rays[s])) == 0) face.push_back(s);
    if (!face.empty() && rank_of(rays, face, dim) == r - 1) facets.insert(face);
  }
  std::vector<RaySubset> out;
  for (const RaySubset& face : facets)
    for (RaySubset cone : triangulate(rays, cone_rows, face)) {
      cone.push_back(apex);
      std::sort(cone.begin(), cone.end());
      out.push_back(std::move(cone));
    }
  return out;
}

// t lies in conv(vertices) + { G mu : 0 <= mu < 1 }.
bool in_half_open_tile(const RatVector& t, const std::vector<RatVector>& verts, const RatMatrix& g) {
  const Eigen::Index k = t.size();
  const Eigen::Index nv = static_cast<Eigen::Index>(verts.size());
  const Eigen::Index s = g.cols();
  const Eigen::Index vars = nv + s + 1;  // alpha, mu, sigma
  const Eigen::Index rows = 2 * k + 2 + nv + s + s + 1;
  RatMatrix a = RatMatrix::Zero(rows, vars);
  RatVector b = RatVector::Zero(rows);
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index v = 0; v < nv; ++v) a(r, v) = verts[static_cast<std::size_t>(v)][j];
    for (Eigen::Index c = 0; c < s; ++c) a(r, nv + c) = g(j, c);
    b[r] = t[j];
    a.row(r + 1) = -a.row(r);
    b[r + 1] = -t[j];
    r += 2;
  }
  for (Eigen::Index v = 0; v < nv; ++v) {
    a(r, v) = 1;
    a(r + 1, v) = -1;
  }
  b[r] = 1;
  b[r + 1] = -1;
  r += 2;
  for (Eigen::Index v = 0; v < nv + s; ++v) a(r++, v) = -1;
  for (Eigen::Index c = 0; c < s; ++c) {
    a(r, nv + c) = 1;
    a(r, nv + s) = 1;
    b[r++] = 1;
  }
  a(r, nv + s) = 1;
  b[r] = 1;
  RatVector obj = RatVector::Zero(vars);
  obj[nv + s] = 1;
  LpOutcome o = lp_solve(Polyhedron(a, b), obj, Sense::Maximize);
  auto* f = std::get_if<LpFeasible>(&o);
  return f && f->value > 0;
}

// Calls fn on every integer vector in the box [lo, hi].
template <typename Fn>
void for_each_in_box(const IntVector& lo, const IntVector& hi, Fn&& fn) {
  const Eigen::Index k = lo.size();
  for (Eigen::Index j = 0; j < k; ++j)
    if (lo[j] > hi[j]) return;
  IntVector cur = lo;
  for (;;) {
    fn(cur);
    Eigen::Index j = 0;
    while (j < k) {
      if (cur[j] < hi[j]) {
        cur[j] += 1;
        break;
      }
      cur[j] = lo[j];
      ++j;
    }
    if (j == k) return;
  }
}

bool satisfies(const IntMatrix& c, const IntVector& d, const IntVector& x) {
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    Integer s = 0;
    for (Eigen::Index j = 0; j < c.cols(); ++j) s += c(i, j) * x[j];
    if (s > d[i]) return false;
  }
  return true;
}

}  // namespace

HybridLinearSet decompose(const IntMatrix& c, const IntVector& d) {
  if (c.rows() != d.size()) throw DimensionMismatch("decompose: C and d disagree");
  const Eigen::Index m = c.cols();
  HybridLinearSet out;
  out.dim = m;
  const Polyhedron q0(to_rational(c), to_rational(d));
  if (std::holds_alternative<LpInfeasible>(lp_feasible(q0))) return out;
  if (rank(q0.a()) < m) throw Unpointed();

  std::vector<Eigen::Index> eq_rows;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    RatVector row = q0.a().row(i).transpose();
    LpOutcome lo = lp_solve(q0, row, Sense::Minimize);
    if (auto* f = std::get_if<LpFeasible>(&lo); f && f->value == q0.b()[i]) eq_rows.push_back(i);
  }

  IntegerAffineLattice lattice{IntVector::Zero(m), IntMatrix::Identity(m, m)};
  if (!eq_rows.empty()) {
    IntMatrix e(static_cast<Eigen::Index>(eq_rows.size()), m);
    IntVector f(static_cast<Eigen::Index>(eq_rows.size()));
    for (std::size_t i = 0; i < eq_rows.size(); ++i) {
      e.row(static_cast<Eigen::Index>(i)) = c.row(eq_rows[i]);
      f[static_cast<Eigen::Index>(i)] = d[eq_rows[i]];
    }
    auto sol = solve_integer_system(e, f);
    if (!sol) return out;
    lattice = std::move(*sol);
  }
  const IntMatrix& n = lattice.kernel;
  const IntVector& x0 = lattice.particular;
  const Eigen::Index k = n.cols();
  if (k == 0) {
    if (satisfies(c, d, x0)) out.pieces.push_back({x0, IntMatrix(m, 0)});
    return out;
  }

  const IntMatrix ct = c * n;
  const IntVector rhs = d - c * x0;
  const Polyhedron qt(to_rational(ct), to_rational(rhs));
  if (std::holds_alternative<LpInfeasible>(lp_feasible(qt))) return out;
  const VRep vr = vrep(qt);

  RaySubset all(vr.rays.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::vector<RaySubset> cones = triangulate(vr.rays, qt.a(), all);

  for (const RaySubset& cone : cones) {
    RatMatrix g(k, static_cast<Eigen::Index>(cone.size()));
    IntMatrix g_int(k, static_cast<Eigen::Index>(cone.size()));
    for (std::size_t i = 0; i < cone.size(); ++i) {
      g_int.col(static_cast<Eigen::Index>(i)) = vr.rays[cone[i]];
      g.col(static_cast<Eigen::Index>(i)) = to_rational(vr.rays[cone[i]]);
    }
    IntVector lo(k), hi(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      Rational vmin = vr.vertices.front()[j], vmax = vmin;
      for (const RatVector& v : vr.vertices) {
        vmin = std::min(vmin, v[j]);
        vmax = std::max(vmax, v[j]);
      }
      for (Eigen::Index col = 0; col < g.cols(); ++col) {
        if (g(j, col) < 0) vmin += g(j, col);
        else vmax += g(j, col);
      }
      lo[j] = ceil(vmin);
      hi[j] = floor(vmax);
    }
    const IntMatrix periods = n * g_int;
    for_each_in_box(lo, hi, [&](const IntVector& t) {
      RatVector tq = to_rational(t);
      if (!qt.contains(tq)) return;
      if (g.cols() > 0 && !in_half_open_tile(tq, vr.vertices, g)) return;
      out.pieces.push_back({IntVector(x0 + n * t), periods});
    });
  }
  return out;
}

std::vector<BilinearRow> substitute_rows(const std::vector<BilinearRow>& rows, const IntVector& w,
                                         const IntMatrix& p) {
  std::vector<BilinearRow> out;
  out.reserve(rows.size());
  for (const BilinearRow& row : rows) {
    if (row.a.rows() != w.size() || p.rows() != w.size())
      throw DimensionMismatch("substitute: base/period rows do not match m");
    out.push_back({IntMatrix(p.transpose() * row.a), IntVector(row.b + row.a.transpose() * w), row.c});
  }
  return out;
}

MibSystem substitute(const MibSystem& system, const IntVector& w, const IntMatrix& p) {
  if (system.form() != Form::Standard) throw std::invalid_argument("substitute: system not in standard form");
  if (w.size() != system.m() || p.rows() != system.m())
    throw DimensionMismatch("substitute: expected base of length " + std::to_string(system.m()));
  if (p.cols() > system.m()) throw DimensionMismatch("substitute: more periods than variables");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] < 0) throw std::invalid_argument("substitute: negative base entry");
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (p(i, j) < 0) throw std::invalid_argument("substitute: negative period entry");
  return MibSystem::standard(p.cols(), system.n(), substitute_rows(system.rows(), w, p), system.real_block());
}

std::vector<IntVector> points_in_box(const LinearSet& set, const Integer& lo, const Integer& hi) {
  const Eigen::Index m = set.dim();
  const Eigen::Index k = set.period_count();
  std::vector<IntVector> out;
  auto in_box = [&](const IntVector& x) {
    for (Eigen::Index i = 0; i < m; ++i)
      if (x[i] < lo || x[i] > hi) return false;
    return true;
  };
  if (k == 0) {
    if (in_box(set.base)) out.push_back(set.base);
    return out;
  }
  // z >= 0 with lo <= w + P z <= hi.
  RatMatrix a(k + 2 * m, k);
  RatVector b(k + 2 * m);
  a.topRows(k) = -RatMatrix::Identity(k, k);
  b.head(k).setZero();
  const RatMatrix pq = to_rational(set.periods);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(k + 2 * i) = pq.row(i);
    b[k + 2 * i] = Rational(hi - set.base[i]);
    a.row(k + 2 * i + 1) = -pq.row(i);
    b[k + 2 * i + 1] = Rational(set.base[i] - lo);
  }
  const Polyhedron zpoly(a, b);
  IntVector zlo = IntVector::Zero(k), zhi(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    RatVector e = RatVector::Zero(k);
    e[j] = 1;
    LpOutcome o = lp_solve(zpoly, e, Sense::Maximize);
    if (std::holds_alternative<LpInfeasible>(o)) return out;
    if (std::holds_alternative<LpUnbounded>(o))
      throw std::logic_error("points_in_box: periods do not span a pointed cone");
    zhi[j] = floor(std::get<LpFeasible>(o).value);
  }
  for_each_in_box(zlo, zhi, [&](const IntVector& z) {
    IntVector x = set.base + set.periods * z;
    if (in_box(x)) out.push_back(std::move(x));
  });
  return out;
}

bool window_check(const HybridLinearSet& hls, const IntMatrix& c, const IntVector& d, const Integer& bound) {
  const Eigen::Index m = c.cols();
  std::set<std::vector<Integer>> denoted;
  for (const LinearSet& piece : hls.pieces) {
    if (piece.dim() != m) return false;
    for (const IntVector& x : points_in_box(piece, 0, bound)) denoted.insert(to_std(x));
  }
  bool agree = true;
  std::size_t hits = 0;
  for_each_in_box(IntVector::Zero(m), IntVector::Constant(m, bound), [&](const IntVector& x) {
    const bool in_c = satisfies(c, d, x);
    const bool in_h = denoted.count(to_std(x)) > 0;
    if (in_h) ++hits;
    if (in_c != in_h) agree = false;
  });
  return agree && hits == denoted.size();
}

Integer max_entry(const HybridLinearSet& hls) {
  Integer best = 0;
  for (const LinearSet& piece : hls.pieces) {
    for (Eigen::Index i = 0; i < piece.base.size(); ++i) best = std::max(best, abs(piece.base[i]));
    for (Eigen::Index i = 0; i < piece.periods.rows(); ++i)
      for (Eigen::Index j = 0; j < piece.periods.cols(); ++j) best = std::max(best, abs(piece.periods(i, j)));
  }
  return best;
}

Integer pottier_bound(Eigen::Index m, const Integer& height) {
  return pow(Integer(2 + (m + 1) * height), static_cast<unsigned>(m));
}

}  // namespace mibgap
