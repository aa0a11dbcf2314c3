#include "mibgap/relaxation.hpp"

#include "mibgap/geometry.hpp"
#include "mibgap/lp.hpp"

#include <algorithm>
#include <functional>

namespace mibgap {

Rational flatness_bound(Eigen::Index m) {
  if (m < 1) throw std::invalid_argument("flatness_bound: dimension must be at least 1");
  if (m == 1) return 1;
  if (m == 2) return Rational(9, 4);
  return Rational(2 * m * m * m);
}

bool is_primitive(const IntVector& u) {
  Integer g = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) g = gcd(g, abs(u[i]));
  return g == 1;
}

std::optional<std::vector<IntVector>> enumerate_short_vectors(Eigen::Index m, const Rational& bound,
                                                              std::size_t cap) {
  std::vector<IntVector> out;
  if (bound <= 1) return out;
  // ||u||^2 < bound implies |u_i| <= radius.
  const Integer radius = isqrt_ceil(ceil(bound));
  Integer side = 2 * radius + 1, points = 1;
  for (Eigen::Index i = 0; i < m; ++i) {
    points *= side;
    if (points > cap) return std::nullopt;
  }
  IntVector cur = IntVector::Zero(m);
  // Depth-first over coordinates with the partial squared norm as cutoff.
  std::function<void(Eigen::Index, const Integer&, bool)> rec = [&](Eigen::Index k, const Integer& norm, bool lead) {
    if (k == m) {
      if (!lead) out.push_back(cur);
      return;
    }
    const Integer lo = lead ? Integer(0) : Integer(-radius);
    for (Integer v = lo; v <= radius; ++v) {
      const Integer next = norm + v * v;
      if (Rational(next) >= bound) {
        if (v > 0) break;
        continue;
      }
      cur[k] = v;
      rec(k + 1, next, lead && v == 0);
    }
    cur[k] = 0;
  };
  rec(0, 0, true);
  std::sort(out.begin(), out.end(), [](const IntVector& a, const IntVector& b) {
    const Integer na = a.squaredNorm(), nb = b.squaredNorm();
    if (na != nb) return na < nb;
    return lex_less<Integer>(a, b);
  });
  return out;
}

std::vector<std::pair<Rational, Rational>> y_box(const MibSystem& s) {
  const Polyhedron ys(to_rational(s.real_block().matrix), to_rational(s.real_block().rhs));
  std::vector<std::pair<Rational, Rational>> out;
  for (Eigen::Index k = 0; k < s.n(); ++k) {
    RatVector e = RatVector::Zero(s.n());
    e[k] = 1;
    Rational ext[2];
    int idx = 0;
    for (Sense sense : {Sense::Minimize, Sense::Maximize}) {
      LpOutcome o = lp_solve(ys, e, sense);
      if (std::holds_alternative<LpUnbounded>(o)) throw UnboundedSystem();
      // An empty y-block: any box will do, every row set is infeasible.
      ext[idx++] = std::holds_alternative<LpFeasible>(o) ? std::get<LpFeasible>(o).value : Rational(0);
    }
    out.emplace_back(ext[0], ext[1]);
  }
  return out;
}

ConstantLedger compute_constants(const MibSystem& s, const Rational& eps, const LedgerOptions& options) {
  if (eps <= 0) throw std::invalid_argument("compute_constants: eps must be positive");
  if (s.rows().empty()) throw std::invalid_argument("compute_constants: no bilinear rows");
  const Boundedness bd = is_bounded(s);
  if (std::holds_alternative<UnboundedY>(bd)) throw UnboundedSystem();

  ConstantLedger l;
  l.eps = eps;
  l.m = s.m();
  l.height = s.height();
  l.kappa1_upper = std::get<BoundedY>(bd).kappa1_upper;
  l.r = 1;
  for (const BilinearRow& row : s.rows()) {
    const Rational norm = operator_norm_upper(row.a);
    if (norm == 0 || l.kappa1_upper == 0) continue;
    l.r = std::min(l.r, Rational(eps / 2 / (norm * l.kappa1_upper)));
  }
  l.omega_upper = options.omega ? *options.omega : flatness_bound(std::max<Eigen::Index>(l.m, 1));
  l.omega_hat = l.omega_upper + 1;
  const Rational sqrt_m(isqrt_ceil(Integer(4 * l.m)), 2);
  const Rational h(l.height);
  l.kappa2 = l.omega_hat * (1 + h / eps * (1 + sqrt_m * l.kappa1_upper));
  l.kappa3 = Rational(l.m) * Rational(pow(l.height, static_cast<unsigned>(l.m * l.m))) / eps;
  l.delta_s = std::min(Rational(eps / 4), Rational(1, 2));
  const Rational reach = (l.omega_upper + Rational(1, 2)) / (2 * l.r);
  l.u_norm_sq_bound = reach * reach;
  if (l.m > 0) {
    if (auto u = enumerate_short_vectors(l.m, l.u_norm_sq_bound, options.u_cap)) {
      l.u_listed = true;
      l.u = std::move(*u);
      for (const IntVector& v : l.u)
        if (is_primitive(v)) l.u_primitive.push_back(v);
    }
  }
  return l;
}

PolyRow bilinear_poly_row(const BilinearRow& row, const std::vector<std::size_t>& xs,
                          const std::vector<std::size_t>& ys, const Rational& rhs, std::string label) {
  PolyRow r;
  for (Eigen::Index k = 0; k < row.b.size(); ++k)
    if (row.b[k] != 0) r.linear.push_back({ys[static_cast<std::size_t>(k)], Rational(row.b[k])});
  for (Eigen::Index j = 0; j < row.a.rows(); ++j)
    for (Eigen::Index k = 0; k < row.a.cols(); ++k) {
      if (row.a(j, k) == 0) continue;
      const std::size_t a = xs[static_cast<std::size_t>(j)], b = ys[static_cast<std::size_t>(k)];
      r.quadratic.push_back({{std::min(a, b), std::max(a, b)}, Rational(row.a(j, k))});
    }
  r.rhs = rhs;
  r.weakenable = true;
  r.label = std::move(label);
  return r;
}

void append_real_block(RealProblem& p, const LinearBlock& rb, const std::vector<std::size_t>& ys) {
  for (Eigen::Index i = 0; i < rb.matrix.rows(); ++i) {
    PolyRow r;
    for (Eigen::Index k = 0; k < rb.matrix.cols(); ++k)
      if (rb.matrix(i, k) != 0) r.linear.push_back({ys[static_cast<std::size_t>(k)], Rational(rb.matrix(i, k))});
    r.rhs = Rational(rb.rhs[i]);
    r.weakenable = false;
    r.label = "real " + std::to_string(i + 1);
    p.rows.push_back(std::move(r));
  }
}

RelaxedProblem build_relaxed_in_box(const MibSystem& s, const Rational& eps,
                                    const std::vector<std::pair<Rational, Rational>>& ybox,
                                    const std::vector<IntVector>& u_primitive, const Rational& omega_hat,
                                    const Rational& delta, const std::vector<std::optional<Integer>>& x_upper) {
  if (!x_upper.empty() && static_cast<Eigen::Index>(x_upper.size()) != s.m())
    throw DimensionMismatch("build_relaxed: x bounds have wrong length");
  if (static_cast<Eigen::Index>(ybox.size()) != s.n()) throw DimensionMismatch("build_relaxed: y box has wrong length");
  RelaxedProblem out;
  RealProblem& p = out.problem;
  p.delta = delta;
  for (Eigen::Index j = 0; j < s.m(); ++j) {
    std::optional<Rational> hi;
    if (!x_upper.empty() && x_upper[static_cast<std::size_t>(j)]) hi = Rational(*x_upper[static_cast<std::size_t>(j)]);
    out.x_vars.push_back(p.add_var("x" + std::to_string(j + 1), 1, hi));
  }
  for (Eigen::Index k = 0; k < s.n(); ++k)
    out.y_vars.push_back(p.add_var("y" + std::to_string(k + 1), ybox[static_cast<std::size_t>(k)].first,
                                   ybox[static_cast<std::size_t>(k)].second));

  const Rational strengthened = eps * 3 / 4;
  for (std::size_t i = 0; i < s.rows().size(); ++i) {
    out.core_rows.push_back(p.rows.size());
    p.rows.push_back(bilinear_poly_row(s.rows()[i], out.x_vars, out.y_vars, Rational(s.rows()[i].c) - strengthened,
                                       "core " + std::to_string(i + 1)));
  }
  append_real_block(p, s.real_block(), out.y_vars);
  for (std::size_t j = 0; j < u_primitive.size(); ++j) {
    RelaxedProblem::WidthPair pair{u_primitive[j], {}, {}};
    const std::string tag = std::to_string(j + 1);
    for (Eigen::Index c = 0; c < s.m(); ++c) {
      pair.p.push_back(p.add_var("p" + tag + "_" + std::to_string(c + 1), 0, std::nullopt));
      pair.q.push_back(p.add_var("q" + tag + "_" + std::to_string(c + 1), 0, std::nullopt));
    }
    for (std::size_t i = 0; i < s.rows().size(); ++i) {
      const Rational c(s.rows()[i].c);
      p.rows.push_back(bilinear_poly_row(s.rows()[i], pair.p, out.y_vars, c, "p" + tag + " in P(y) " + std::to_string(i + 1)));
      p.rows.push_back(bilinear_poly_row(s.rows()[i], pair.q, out.y_vars, c, "q" + tag + " in P(y) " + std::to_string(i + 1)));
    }
    // -u^T (p - q) <= -omega_hat
    PolyRow w;
    for (Eigen::Index c = 0; c < s.m(); ++c) {
      if (pair.u[c] == 0) continue;
      w.linear.push_back({pair.p[static_cast<std::size_t>(c)], Rational(-pair.u[c])});
      w.linear.push_back({pair.q[static_cast<std::size_t>(c)], Rational(pair.u[c])});
    }
    w.rhs = -omega_hat;
    w.weakenable = false;
    w.label = "width " + tag;
    p.rows.push_back(std::move(w));
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

RelaxedProblem build_relaxed(const MibSystem& s, const Rational& eps, const ConstantLedger& ledger,
                             const std::vector<std::optional<Integer>>& x_upper) {
  return build_relaxed_in_box(s, eps, y_box(s), ledger.u_primitive, ledger.omega_hat, ledger.delta_s, x_upper);
}

}  // namespace mibgap
