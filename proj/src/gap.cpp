#include "mibgap/gap.hpp"

#include "mibgap/lp.hpp"
#include "mibgap/oracle.hpp"
#include "mibgap/semilinear.hpp"

#include <algorithm>

namespace mibgap {

namespace {

using Clock = std::chrono::steady_clock;

RatMatrix real_matrix(const MibSystem& s) { return to_rational(s.real_block().matrix); }
RatVector real_rhs(const MibSystem& s) { return to_rational(s.real_block().rhs); }

// min f^T l subject to E^T l = target, l >= 0.
std::optional<RatVector> dual_bound(const RatMatrix& e, const RatVector& f, const RatVector& target) {
  const Eigen::Index rows = e.rows(), n = e.cols();
  RatMatrix a(2 * n + rows, rows);
  RatVector b(2 * n + rows);
  a.topRows(n) = e.transpose();
  a.middleRows(n, n) = -e.transpose();
  a.bottomRows(rows) = -RatMatrix::Identity(rows, rows);
  b.head(n) = target;
  b.segment(n, n) = -target;
  b.tail(rows).setZero();
  LpOutcome o = lp_solve(Polyhedron(a, b), f, Sense::Minimize);
  if (auto* opt = std::get_if<LpFeasible>(&o)) return opt->point;
  return std::nullopt;
}

// x = w + P z with z the remaining coordinates after fixing x_i = value.
StandardPiece fix_coordinate(const MibSystem& s, std::size_t i, const Integer& value) {
  const Eigen::Index m = s.m();
  IntVector w = IntVector::Zero(m);
  w[static_cast<Eigen::Index>(i)] = value;
  IntMatrix p = IntMatrix::Zero(m, m - 1);
  for (Eigen::Index j = 0, c = 0; j < m; ++j) {
    if (j == static_cast<Eigen::Index>(i)) continue;
    p(j, c++) = 1;
  }
  return {substitute(s, w, p), w, p};
}

// Bases of {x >= 0 : u^T x = b}.
HybridLinearSet hyperplane_pieces(const IntVector& u, const Integer& b) {
  const Eigen::Index m = u.size();
  IntMatrix cm(2 + m, m);
  cm.row(0) = u.transpose();
  cm.row(1) = -u.transpose();
  cm.bottomRows(m) = -IntMatrix::Identity(m, m);
  IntVector d = IntVector::Zero(2 + m);
  d[0] = b;
  d[1] = -b;
  return decompose(cm, d);
}

bool verify_ybounds(const MibSystem& s, const YBounds& yb) {
  const std::size_t n = static_cast<std::size_t>(s.n());
  if (yb.lo.size() != n || yb.hi.size() != n || yb.lo_dual.size() != n || yb.hi_dual.size() != n) return false;
  const RatMatrix e = real_matrix(s);
  const RatVector f = real_rhs(s);
  for (std::size_t k = 0; k < n; ++k) {
    for (int side = 0; side < 2; ++side) {
      const RatVector& l = side ? yb.hi_dual[k] : yb.lo_dual[k];
      if (l.size() != e.rows()) return false;
      for (Eigen::Index i = 0; i < l.size(); ++i)
        if (l[i] < 0) return false;
      RatVector combo = e.transpose() * l;
      for (Eigen::Index j = 0; j < combo.size(); ++j) {
        Rational want = j == static_cast<Eigen::Index>(k) ? Rational(side ? 1 : -1) : Rational(0);
        if (combo[j] != want) return false;
      }
      const Rational bound = l.dot(f);
      if (side ? bound != yb.hi[k] : -bound != yb.lo[k]) return false;
    }
  }
  return true;
}

std::vector<std::pair<Rational, Rational>> as_box(const YBounds& yb) {
  std::vector<std::pair<Rational, Rational>> out;
  for (std::size_t k = 0; k < yb.lo.size(); ++k) out.emplace_back(yb.lo[k], yb.hi[k]);
  return out;
}

// Stacked rows (b_i^T y <= c_i; E y <= f) of an m = 0 system.
Polyhedron base_polyhedron(const MibSystem& s) {
  const Eigen::Index rows = static_cast<Eigen::Index>(s.rows().size());
  const Eigen::Index n = s.n();
  RatMatrix a(rows + s.real_block().matrix.rows(), n);
  RatVector b(a.rows());
  for (Eigen::Index i = 0; i < rows; ++i) {
    a.row(i) = to_rational(s.rows()[static_cast<std::size_t>(i)].b).transpose();
    b[i] = Rational(s.rows()[static_cast<std::size_t>(i)].c);
  }
  a.bottomRows(s.real_block().matrix.rows()) = real_matrix(s);
  b.tail(s.real_block().matrix.rows()) = real_rhs(s);
  return Polyhedron(a, b);
}

std::optional<Sat> sat_at(const MibSystem& s, const IntVector& x, const Rational& eps) {
  auto best = best_y(s, x, std::max(eps, Rational(1)));
  if (!best) return std::nullopt;
  Assignment a{x, best->y};
  SlackCheck c = check_assignment(s, a, eps);
  if (c.kind == SlackCheck::Kind::Violated) return std::nullopt;
  return Sat{std::move(a), c.has_bilinear_rows ? c.margin : eps};
}

Sat lift_sat(const StandardPiece& piece, const Sat& inner) { return {lift(piece, inner.assignment), inner.margin}; }

struct Engine {
  Rational eps;
  const SolveOptions& opt;
  SolveStats& stats;
  Clock::time_point deadline;

  bool exhausted() const { return Clock::now() > deadline || stats.nodes >= opt.max_nodes; }

  RealVerdict kernel(const RealProblem& p) {
    ++stats.kernel_calls;
    KernelOptions k = opt.kernel;
    k.deadline = deadline;
    return decide(p, k);
  }

  std::shared_ptr<UnsatNode> make(UnsatNode::Kind kind, const MibSystem& s) {
    auto node = std::make_shared<UnsatNode>();
    node->kind = kind;
    node->system = s;
    return node;
  }

  // Solves every child; Sat is lifted, Unsat collects links.
  GapVerdict children(std::shared_ptr<UnsatNode> parent,
                      const std::vector<std::pair<BranchEquation, StandardPiece>>& kids, unsigned depth) {
    std::vector<std::pair<const MibSystem*, UnsatPtr>> seen;
    std::optional<Unknown> unknown;
    for (const auto& [branch, piece] : kids) {
      UnsatPtr shared;
      for (const auto& [sys, node] : seen)
        if (*sys == piece.system) shared = node;
      if (!shared) {
        GapVerdict v = node(piece.system, depth + 1);
        if (auto* sat = std::get_if<Sat>(&v)) return lift_sat(piece, *sat);
        if (auto* u = std::get_if<Unknown>(&v)) {
          if (!unknown) unknown = *u;
          if (exhausted()) return *unknown;
          continue;
        }
        shared = std::get<Unsat>(v).tree;
        seen.emplace_back(&piece.system, shared);
      }
      parent->children.push_back({branch, piece.w, piece.p, shared});
    }
    if (unknown) return *unknown;
    return Unsat{parent};
  }

  GapVerdict node(const MibSystem& s, unsigned depth) {
    ++stats.nodes;
    if (exhausted()) return Unknown{"budget exhausted"};
    std::optional<YBounds> yb = certified_y_bounds(s);
    if (!yb) {
      auto leaf = make(UnsatNode::Kind::EmptyReal, s);
      leaf->farkas = std::get<LpInfeasible>(lp_feasible(Polyhedron(real_matrix(s), real_rhs(s)))).multipliers;
      return Unsat{leaf};
    }
    if (s.m() == 0) return base_case(s, eps);
    if (auto sat = sat_at(s, IntVector::Zero(s.m()), eps)) return *sat;

    const ConstantLedger ledger = compute_constants(s, eps, opt.ledger);
    if (depth == 0 && !stats.root_ledger) stats.root_ledger = ledger;
    const bool width_ok =
        ledger.u_listed && ledger.u_primitive.size() <= opt.max_width_pairs &&
        Integer(ledger.u_primitive.size()) * (2 * ceil(ledger.kappa2) + 1) <= Integer(opt.max_hyperplane_branches);

    // Continuous relaxation at slack eps. A refutation rules out every
    // slack-eps solution, so any branch list is sound; the width branches
    // keep small integer points in play.
    {
      RealVerdict v = kernel(continuous_problem(s, eps, *yb));
      if (auto* r = std::get_if<Refuted>(&v)) {
        auto split_node = make(UnsatNode::Kind::Continuous, s);
        split_node->ybounds = *yb;
        split_node->real_cert = r->cover;
        if (width_ok) {
          split_node->u_primitive = ledger.u_primitive;
          split_node->kappa2 = ledger.kappa2;
        }
        return children(split_node, split(s, split_node->u_primitive, split_node->kappa2), depth);
      }
      if (auto* w = std::get_if<Witness>(&v)) {
        const RatVector y = w->point.tail(s.n());
        if (auto x = round_point(s, y, opt.rounding_cap))
          if (auto sat = sat_at(s, *x, eps)) return *sat;
      }
    }
    if (exhausted()) return Unknown{"budget exhausted"};

    // Strengthened relaxation with width constraints.
    if (width_ok) {
      RealProblem rp = relaxed_problem(s, eps, *yb, ledger.u_primitive, ledger.omega_hat, ledger.delta_s);
      RealVerdict v = kernel(rp);
      if (auto* w = std::get_if<Witness>(&v)) {
        RatVector y(s.n());
        for (Eigen::Index k = 0; k < s.n(); ++k) y[k] = w->point[s.m() + k];
        ++stats.roundings;
        if (auto x = round_point(s, y, opt.rounding_cap))
          if (auto sat = sat_at(s, *x, eps)) return *sat;
      } else if (auto* r = std::get_if<Refuted>(&v)) {
        ++stats.relaxations_refuted;
        if (opt.on_relaxed_refuted) opt.on_relaxed_refuted(s, ledger);
        auto split_node = make(UnsatNode::Kind::RelaxSplit, s);
        split_node->ybounds = *yb;
        split_node->real_cert = r->cover;
        split_node->u_primitive = ledger.u_primitive;
        split_node->omega_hat = ledger.omega_hat;
        split_node->kappa2 = ledger.kappa2;
        return children(split_node, split(s, ledger), depth);
      }
    }
    if (exhausted()) return Unknown{"budget exhausted"};

    // Bounding split: refute x_i >= B + 1, then fix x_i = 0..B.
    for (Integer bound = 0; bound <= opt.max_split_bound; bound = 2 * bound + 1) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(s.m()); ++i) {
        RealVerdict v = kernel(continuous_problem(s, eps, *yb, std::make_pair(i, Integer(bound + 1))));
        if (auto* r = std::get_if<Refuted>(&v)) {
          auto split_node = make(UnsatNode::Kind::BoundSplit, s);
          split_node->ybounds = *yb;
          split_node->real_cert = r->cover;
          split_node->bound_var = i;
          split_node->bound = bound;
          std::vector<std::pair<BranchEquation, StandardPiece>> kids;
          for (Integer t = 0; t <= bound; ++t) {
            BranchEquation eq{BranchEquation::Kind::FixedValue, i, {}, t};
            kids.emplace_back(eq, fix_coordinate(s, i, t));
          }
          return children(split_node, kids, depth);
        }
        if (exhausted()) return Unknown{"budget exhausted"};
      }
    }
    return Unknown{"no strategy closed a node with " + std::to_string(s.m()) + " integer variables"};
  }
};

bool verify_node(const UnsatNode& n, const Rational& eps);

bool verify_children(const UnsatNode& n, const Rational& eps) {
  for (const ChildLink& link : n.children) {
    if (!link.node) return false;
    if (n.kind == UnsatNode::Kind::Root) {
      const MibSystem expect = MibSystem::standard(link.p.cols(), n.system.n(),
                                                   substitute_rows(n.system.rows(), link.w, link.p),
                                                   n.system.real_block());
      if (!(expect == link.node->system)) return false;
    } else if (!(substitute(n.system, link.w, link.p) == link.node->system)) {
      return false;
    }
    if (link.node->system.m() >= n.system.m() && n.kind != UnsatNode::Kind::Root) return false;
    if (!verify_node(*link.node, eps)) return false;
  }
  return true;
}

bool same_pieces(const std::vector<const ChildLink*>& links, const HybridLinearSet& h) {
  if (links.size() != h.pieces.size()) return false;
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i]->w != h.pieces[i].base || links[i]->p != h.pieces[i].periods) return false;
  return true;
}

// Children must list every zero component, then every (u, b) with the
// bases of {u^T x = b, x >= 0} in order.
bool verify_branches(const UnsatNode& n) {
  const MibSystem& s = n.system;
  for (const IntVector& u : n.u_primitive)
    if (u.size() != s.m() || !is_primitive(u)) return false;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.m()); ++i) {
    if (pos >= n.children.size()) return false;
    const ChildLink& c = n.children[pos++];
    if (c.branch.kind != BranchEquation::Kind::ZeroComponent || c.branch.index != i) return false;
    const StandardPiece expect = fix_coordinate(s, i, 0);
    if (c.w != expect.w || c.p != expect.p) return false;
  }
  const Integer range = ceil(n.kappa2);
  for (const IntVector& u : n.u_primitive) {
    for (Integer b = -range; b <= range; ++b) {
      std::vector<const ChildLink*> links;
      while (pos < n.children.size() && n.children[pos].branch.kind == BranchEquation::Kind::Hyperplane &&
             n.children[pos].branch.u == u && n.children[pos].branch.b == b)
        links.push_back(&n.children[pos++]);
      if (!same_pieces(links, hyperplane_pieces(u, b))) return false;
    }
  }
  return pos == n.children.size();
}

bool verify_node(const UnsatNode& n, const Rational& eps) {
  const MibSystem& s = n.system;
  switch (n.kind) {
    case UnsatNode::Kind::EmptyReal:
      return verify_farkas(real_matrix(s), real_rhs(s), n.farkas);
    case UnsatNode::Kind::Base: {
      if (s.m() != 0) return false;
      const Polyhedron p = base_polyhedron(s);
      return verify_farkas(p.a(), p.b(), n.farkas);
    }
    case UnsatNode::Kind::Continuous:
      return verify_ybounds(s, n.ybounds) &&
             verify_certificate(continuous_problem(s, eps, n.ybounds), n.real_cert) && verify_branches(n) &&
             verify_children(n, eps);
    case UnsatNode::Kind::BoundSplit: {
      if (!verify_ybounds(s, n.ybounds) || n.bound_var >= static_cast<std::size_t>(s.m()) || n.bound < 0) return false;
      if (!verify_certificate(continuous_problem(s, eps, n.ybounds, std::make_pair(n.bound_var, Integer(n.bound + 1))),
                              n.real_cert))
        return false;
      if (Integer(n.children.size()) != n.bound + 1) return false;
      for (std::size_t t = 0; t < n.children.size(); ++t) {
        const ChildLink& c = n.children[t];
        if (c.branch.kind != BranchEquation::Kind::FixedValue || c.branch.index != n.bound_var || c.branch.b != Integer(t))
          return false;
        const StandardPiece expect = fix_coordinate(s, n.bound_var, Integer(t));
        if (c.w != expect.w || c.p != expect.p) return false;
      }
      return verify_children(n, eps);
    }
    case UnsatNode::Kind::RelaxSplit: {
      if (!verify_ybounds(s, n.ybounds)) return false;
      const RealProblem rp = relaxed_problem(s, eps, n.ybounds, n.u_primitive, n.omega_hat, Rational(1, 2));
      if (!verify_certificate(rp, n.real_cert)) return false;
      return verify_branches(n) && verify_children(n, eps);
    }
    case UnsatNode::Kind::Root: {
      const std::vector<StandardPiece> pieces = to_standard_form(s);
      if (pieces.size() != n.children.size()) return false;
      for (std::size_t i = 0; i < pieces.size(); ++i)
        if (pieces[i].w != n.children[i].w || pieces[i].p != n.children[i].p) return false;
      return verify_children(n, eps);
    }
  }
  return false;
}

}  // namespace

std::optional<YBounds> certified_y_bounds(const MibSystem& s) {
  const RatMatrix e = real_matrix(s);
  const RatVector f = real_rhs(s);
  if (std::holds_alternative<LpInfeasible>(lp_feasible(Polyhedron(e, f)))) return std::nullopt;
  YBounds out;
  for (Eigen::Index k = 0; k < s.n(); ++k) {
    RatVector target = RatVector::Zero(s.n());
    target[k] = 1;
    auto hi = dual_bound(e, f, target);
    auto lo = dual_bound(e, f, RatVector(-target));
    if (!hi || !lo) throw UnboundedSystem();
    out.hi.push_back(hi->dot(f));
    out.lo.push_back(-lo->dot(f));
    out.hi_dual.push_back(std::move(*hi));
    out.lo_dual.push_back(std::move(*lo));
  }
  return out;
}

GapVerdict base_case(const MibSystem& s, const Rational& eps) {
  if (s.m() != 0) throw std::invalid_argument("base_case: system has integer variables");
  if (auto sat = sat_at(s, IntVector(0), eps)) return *sat;
  auto node = std::make_shared<UnsatNode>();
  node->kind = UnsatNode::Kind::Base;
  node->system = s;
  node->farkas = std::get<LpInfeasible>(lp_feasible(base_polyhedron(s))).multipliers;
  return Unsat{node};
}

std::optional<IntVector> round_point(const MibSystem& s, const RatVector& y, const Integer& cap) {
  const Eigen::Index m = s.m();
  const Eigen::Index rows = static_cast<Eigen::Index>(s.rows().size());
  // P(y) = {x >= 0 : (A_i y) . x <= c_i - b_i . y}.
  RatMatrix a(rows + 2 * m, m);
  RatVector b(rows + 2 * m);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const BilinearRow& r = s.rows()[static_cast<std::size_t>(i)];
    a.row(i) = (to_rational(r.a) * y).transpose();
    b[i] = Rational(r.c) - to_rational(r.b).dot(y);
  }
  a.middleRows(rows, m) = -RatMatrix::Identity(m, m);
  b.segment(rows, m).setZero();
  a.bottomRows(m) = RatMatrix::Identity(m, m);
  std::size_t budget = 20000;
  for (Integer box = 1; box <= cap; box *= 2) {
    b.tail(m).setConstant(Rational(box));
    IntVector x = IntVector::Zero(m);
    // Depth-first with exact LP bounds on each coordinate given the prefix.
    std::function<bool(Eigen::Index)> dfs = [&](Eigen::Index k) -> bool {
      if (k == m) return true;
      if (budget == 0) return false;
      --budget;
      RatMatrix ak = a;
      RatVector bk = b;
      RatMatrix fix = RatMatrix::Zero(2 * k, m);
      RatVector fixb(2 * k);
      for (Eigen::Index j = 0; j < k; ++j) {
        fix(2 * j, j) = 1;
        fixb[2 * j] = Rational(x[j]);
        fix(2 * j + 1, j) = -1;
        fixb[2 * j + 1] = Rational(-x[j]);
      }
      RatMatrix full(a.rows() + 2 * k, m);
      RatVector fullb(a.rows() + 2 * k);
      full << ak, fix;
      fullb << bk, fixb;
      const Polyhedron q(full, fullb);
      RatVector e = RatVector::Zero(m);
      e[k] = 1;
      auto lo = lp_solve(q, e, Sense::Minimize);
      if (!std::holds_alternative<LpFeasible>(lo)) return false;
      auto hi = lp_solve(q, e, Sense::Maximize);
      const Integer from = ceil(std::get<LpFeasible>(lo).value);
      const Integer to = floor(std::get<LpFeasible>(hi).value);
      for (Integer v = from; v <= to; ++v) {
        x[k] = v;
        if (dfs(k + 1)) return true;
      }
      return false;
    };
    if (dfs(0)) {
      const Assignment probe{x, y};
      if (check_assignment(s, probe, Rational(1)).kind != SlackCheck::Kind::Violated) return x;
    }
    if (budget == 0) break;
  }
  return std::nullopt;
}

std::vector<std::pair<BranchEquation, StandardPiece>> split(const MibSystem& s, const ConstantLedger& ledger) {
  return split(s, ledger.u_primitive, ledger.kappa2);
}

std::vector<std::pair<BranchEquation, StandardPiece>> split(const MibSystem& s, const std::vector<IntVector>& u,
                                                            const Rational& kappa2) {
  std::vector<std::pair<BranchEquation, StandardPiece>> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.m()); ++i)
    out.emplace_back(BranchEquation{BranchEquation::Kind::ZeroComponent, i, {}, 0}, fix_coordinate(s, i, 0));
  const Integer range = ceil(kappa2);
  for (const IntVector& dir : u)
    for (Integer b = -range; b <= range; ++b)
      for (const LinearSet& piece : hyperplane_pieces(dir, b).pieces)
        out.emplace_back(BranchEquation{BranchEquation::Kind::Hyperplane, 0, dir, b},
                         StandardPiece{substitute(s, piece.base, piece.periods), piece.base, piece.periods});
  return out;
}

RealProblem continuous_problem(const MibSystem& s, const Rational& eps, const YBounds& yb,
                               std::optional<std::pair<std::size_t, Integer>> lower) {
  RealProblem p;
  p.delta = std::min(Rational(eps / 4), Rational(1, 2));
  std::vector<std::size_t> xs, ys;
  for (Eigen::Index j = 0; j < s.m(); ++j) {
    Rational lo = 0;
    if (lower && lower->first == static_cast<std::size_t>(j)) lo = Rational(lower->second);
    xs.push_back(p.add_var("x" + std::to_string(j + 1), lo, std::nullopt));
  }
  for (Eigen::Index k = 0; k < s.n(); ++k)
    ys.push_back(p.add_var("y" + std::to_string(k + 1), yb.lo[static_cast<std::size_t>(k)], yb.hi[static_cast<std::size_t>(k)]));
  for (std::size_t i = 0; i < s.rows().size(); ++i)
    p.rows.push_back(bilinear_poly_row(s.rows()[i], xs, ys, Rational(s.rows()[i].c) - eps, "row " + std::to_string(i + 1)));
  append_real_block(p, s.real_block(), ys);
  return p;
}

RealProblem relaxed_problem(const MibSystem& s, const Rational& eps, const YBounds& yb,
                            const std::vector<IntVector>& u_primitive, const Rational& omega_hat,
                            const Rational& delta) {
  return build_relaxed_in_box(s, eps, as_box(yb), u_primitive, omega_hat, delta).problem;
}

GapVerdict solve(const MibSystem& s, const Rational& eps, const SolveOptions& options, SolveStats* stats_out) {
  if (eps <= 0) throw std::invalid_argument("solve: eps must be positive");
  if (std::holds_alternative<UnboundedY>(is_bounded(s))) throw UnboundedSystem();
  SolveStats local;
  SolveStats& stats = stats_out ? *stats_out : local;
  // The recursion gets three quarters of the budget; the rest is reserved
  // for the witness search.
  const Clock::time_point start = Clock::now(), end = start + options.budget;
  Engine engine{eps, options, stats, start + options.budget * 3 / 4};

  auto verified = [&](const Sat& sat) -> std::optional<Sat> {
    SlackCheck c = check_assignment(s, sat.assignment, eps);
    if (c.kind == SlackCheck::Kind::Violated) return std::nullopt;
    return Sat{sat.assignment, c.has_bilinear_rows ? c.margin : sat.margin};
  };
  std::size_t fallback_left = options.fallback_points;
  auto fallback = [&](const Integer& xbound) -> std::optional<Sat> {
    if (fallback_left == 0) return std::nullopt;
    OracleResult r = oracle(s, eps, xbound, fallback_left, end);
    fallback_left -= std::min(fallback_left, r.points);
    stats.fallback_points += r.points;
    if (r.kind == OracleResult::Kind::UnsatWithinBound || !r.witness) return std::nullopt;
    return verified(Sat{*r.witness, r.margin});
  };

  // Cheap witness search first: small windows while they stay small.
  Integer xbound = 1;
  for (; xbound <= 64; xbound *= 2) {
    const std::size_t before = stats.fallback_points;
    if (auto sat = fallback(xbound)) return *sat;
    if (stats.fallback_points - before > options.fallback_points / 64) {
      xbound *= 2;
      break;
    }
  }

  GapVerdict v = Unknown{};
  if (s.form() == Form::Standard) {
    v = engine.node(s, 0);
  } else {
    auto root = std::make_shared<UnsatNode>();
    root->kind = UnsatNode::Kind::Root;
    root->system = s;
    // Pieces are solved as depth-0 nodes of their own.
    std::optional<GapVerdict> found;
    for (StandardPiece& piece : to_standard_form(s)) {
      GapVerdict pv = engine.node(piece.system, 0);
      if (auto* sat = std::get_if<Sat>(&pv)) {
        found = lift_sat(piece, *sat);
        break;
      }
      if (auto* u = std::get_if<Unknown>(&pv)) {
        if (!found) found = *u;
        if (engine.exhausted()) break;
        continue;
      }
      root->children.push_back({BranchEquation{}, piece.w, piece.p, std::get<Unsat>(pv).tree});
    }
    v = found ? *found : GapVerdict(Unsat{root});
  }
  if (auto* sat = std::get_if<Sat>(&v)) {
    if (auto ok = verified(*sat)) return *ok;
    v = Unknown{"internal: candidate witness failed verification"};
  }
  if (std::holds_alternative<Unsat>(v)) return v;

  for (; Clock::now() < end && fallback_left > 0; xbound *= 2)
    if (auto sat = fallback(xbound)) return *sat;
  return v;
}

bool verify_unsat(const UnsatNode& node, const Rational& eps) { return verify_node(node, eps); }

std::size_t tree_size(const UnsatNode& node) {
  std::size_t n = 1;
  for (const ChildLink& c : node.children) n += tree_size(*c.node);
  return n;
}

}  // namespace mibgap
