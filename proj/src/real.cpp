#include "mibgap/real.hpp"

#include "mibgap/lp.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace mibgap {

namespace {

// Extended rational: inf is -1, 0 or +1.
struct Ext {
  int inf = 0;
  Rational v;
};

Ext finite(const Rational& v) { return {0, v}; }

bool less(const Ext& a, const Ext& b) {
  if (a.inf != b.inf) return a.inf < b.inf;
  return a.inf == 0 && a.v < b.v;
}

// 0 times infinity is 0: endpoints of closed intervals are attained values.
Ext mul(const Ext& a, const Ext& b) {
  if (a.inf == 0 && b.inf == 0) return finite(a.v * b.v);
  const int sa = a.inf ? a.inf : (a.v > 0) - (a.v < 0);
  const int sb = b.inf ? b.inf : (b.v > 0) - (b.v < 0);
  if (sa == 0 || sb == 0) return finite(0);
  return {sa * sb, 0};
}

Ext add(const Ext& a, const Ext& b) {
  if (a.inf != 0) return a;
  if (b.inf != 0) return b;
  return finite(a.v + b.v);
}

struct Interval {
  Ext lo, hi;
};

Interval var_interval(const VarBound& b) { return {finite(b.lo), b.hi ? finite(*b.hi) : Ext{1, 0}}; }

Interval product(const Interval& x, const Interval& y) {
  const Ext c[4] = {mul(x.lo, y.lo), mul(x.lo, y.hi), mul(x.hi, y.lo), mul(x.hi, y.hi)};
  Interval out{c[0], c[0]};
  for (const Ext& e : c) {
    if (less(e, out.lo)) out.lo = e;
    if (less(out.hi, e)) out.hi = e;
  }
  return out;
}

Interval square(const Interval& x) {
  Interval p = product(x, x);
  if (less(x.lo, finite(0)) && less(finite(0), x.hi)) p.lo = finite(0);
  return p;
}

Interval scale(const Rational& c, const Interval& x) {
  if (c >= 0) return {mul(finite(c), x.lo), mul(finite(c), x.hi)};
  return {mul(finite(c), x.hi), mul(finite(c), x.lo)};
}

using Box = std::vector<VarBound>;

Interval monomial_interval(const Box& box, const Monomial& m) {
  if (m.i == m.j) return square(var_interval(box[m.i]));
  return product(var_interval(box[m.i]), var_interval(box[m.j]));
}

// Lower end of the interval enclosure of the row's left side.
Ext row_lower(const Box& box, const PolyRow& r) {
  Ext s = finite(0);
  for (const LinearTerm& t : r.linear) s = add(s, scale(t.coef, var_interval(box[t.var])).lo);
  for (const QuadraticTerm& t : r.quadratic) s = add(s, scale(t.coef, monomial_interval(box, t.mono)).lo);
  return s;
}

bool interval_refutes(const Box& box, const PolyRow& r) {
  const Ext lo = row_lower(box, r);
  return lo.inf == 1 || (lo.inf == 0 && lo.v > r.rhs);
}

// One inequality a^T (x, w) <= b of the linear relaxation.
struct LinRow {
  std::map<std::size_t, Rational> coef;
  Rational rhs;
  RowRef ref;
};

// Envelope `which` of w = x_i x_j over the box, or nothing if it needs an
// infinite bound.
std::optional<LinRow> envelope(const Box& box, const Monomial& m, std::size_t w, int which) {
  const Rational& a = box[m.i].lo;
  const Rational& b = box[m.j].lo;
  const std::optional<Rational>& ah = box[m.i].hi;
  const std::optional<Rational>& bh = box[m.j].hi;
  LinRow r;
  // Coefficients on x_i, x_j; w gets sign s.
  Rational ci, cj;
  int s = 0;
  switch (which) {
    case 0:  // w >= b x_i + a x_j - a b
      s = -1, ci = b, cj = a, r.rhs = a * b;
      break;
    case 1:  // w >= B x_i + A x_j - A B
      if (!ah || !bh) return std::nullopt;
      s = -1, ci = *bh, cj = *ah, r.rhs = *ah * *bh;
      break;
    case 2:  // w <= b x_i + A x_j - A b
      if (!ah) return std::nullopt;
      s = 1, ci = -b, cj = -*ah, r.rhs = -(*ah * b);
      break;
    default:  // w <= B x_i + a x_j - a B
      if (!bh) return std::nullopt;
      s = 1, ci = -*bh, cj = -a, r.rhs = -(a * *bh);
      break;
  }
  r.coef[w] = Rational(s);
  r.coef[m.i] += ci;
  r.coef[m.j] += cj;
  return r;
}

struct Relaxation {
  std::vector<LinRow> rows;
  std::size_t vars;
};

Relaxation relax(const RealProblem& p, const std::vector<Monomial>& monos, const Box& box) {
  const std::size_t n = p.size();
  Relaxation out{{}, n + monos.size()};
  auto mono_index = [&](const Monomial& m) {
    return static_cast<std::size_t>(std::lower_bound(monos.begin(), monos.end(), m) - monos.begin());
  };
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    LinRow row;
    for (const LinearTerm& t : p.rows[r].linear) row.coef[t.var] += t.coef;
    for (const QuadraticTerm& t : p.rows[r].quadratic) row.coef[n + mono_index(t.mono)] += t.coef;
    row.rhs = p.rows[r].rhs;
    row.ref = {RowRef::Kind::Row, r, 0};
    out.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < monos.size(); ++k)
    for (int which = 0; which < 4; ++which)
      if (auto e = envelope(box, monos[k], n + k, which)) {
        e->ref = {RowRef::Kind::Envelope, k, which};
        out.rows.push_back(std::move(*e));
      }
  for (std::size_t v = 0; v < n; ++v) {
    LinRow lo;
    lo.coef[v] = -1;
    lo.rhs = -box[v].lo;
    lo.ref = {RowRef::Kind::Lower, v, 0};
    out.rows.push_back(std::move(lo));
    if (box[v].hi) {
      LinRow hi;
      hi.coef[v] = 1;
      hi.rhs = *box[v].hi;
      hi.ref = {RowRef::Kind::Upper, v, 0};
      out.rows.push_back(std::move(hi));
    }
  }
  return out;
}

Polyhedron to_polyhedron(const Relaxation& rel) {
  RatMatrix a = RatMatrix::Zero(static_cast<Eigen::Index>(rel.rows.size()), static_cast<Eigen::Index>(rel.vars));
  RatVector b(static_cast<Eigen::Index>(rel.rows.size()));
  for (std::size_t r = 0; r < rel.rows.size(); ++r) {
    for (const auto& [v, c] : rel.rows[r].coef) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(v)) = c;
    b[static_cast<Eigen::Index>(r)] = rel.rows[r].rhs;
  }
  return Polyhedron(std::move(a), std::move(b));
}

bool same_ref(const RowRef& a, const RowRef& b) {
  return a.kind == b.kind && a.index == b.index && a.which == b.which;
}

Rational width(const VarBound& b) { return *b.hi - b.lo; }

struct Search {
  const RealProblem& p;
  const KernelOptions& opt;
  std::vector<Monomial> monos;
  std::size_t nodes = 0;

  using Result = std::variant<Witness, Certificate, Inconclusive>;

  std::optional<Witness> try_point(const RatVector& x) const {
    WitnessCheck c = check_witness(p, x);
    if (c.kind == WitnessCheck::Kind::Fail) return std::nullopt;
    return Witness{x, c.kind == WitnessCheck::Kind::WeakPass};
  }

  // finite_turn: the previous split cut an infinite coordinate and this box
  // is its tail, so a bounded factor of an unbounded product goes next.
  Result run(const Box& box, unsigned unbounded_splits, bool finite_turn = false) {
    if (++nodes > opt.max_nodes) return Inconclusive{"node limit reached"};
    if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline) return Inconclusive{"deadline passed"};
    for (std::size_t r = 0; r < p.rows.size(); ++r)
      if (interval_refutes(box, p.rows[r])) return Certificate{IntervalLeaf{r}};

    const Relaxation rel = relax(p, monos, box);
    auto lp = lp_feasible(to_polyhedron(rel));
    if (auto* inf = std::get_if<LpInfeasible>(&lp)) {
      FarkasLeaf leaf;
      for (std::size_t r = 0; r < rel.rows.size(); ++r)
        if (inf->multipliers[static_cast<Eigen::Index>(r)] != 0)
          leaf.multipliers.emplace_back(rel.rows[r].ref, inf->multipliers[static_cast<Eigen::Index>(r)]);
      return Certificate{std::move(leaf)};
    }
    const RatVector lp_point = std::get<RatVector>(lp).head(static_cast<Eigen::Index>(p.size()));

    std::optional<Witness> weak;
    bool bounded = true;
    for (const VarBound& b : box) bounded = bounded && b.hi.has_value();
    if (bounded) {
      RatVector center(static_cast<Eigen::Index>(p.size()));
      for (std::size_t v = 0; v < p.size(); ++v) center[static_cast<Eigen::Index>(v)] = (box[v].lo + *box[v].hi) / 2;
      if (auto w = try_point(center)) {
        if (!w->weakened) return *w;
        weak = w;
      }
    }
    if (auto w = try_point(lp_point)) {
      if (!w->weakened) return *w;
      if (!weak) weak = w;
    }
    if (weak) return *weak;

    // Pick the monomial with the largest envelope error among weakenable
    // rows whose error still exceeds delta.
    std::optional<std::size_t> split_var;
    bool split_infinite = false;
    Rational best = -1;
    for (const PolyRow& row : p.rows) {
      if (!row.weakenable || row.is_linear()) continue;
      Rational err = 0;
      bool infinite = false;
      for (const QuadraticTerm& t : row.quadratic) {
        const VarBound& bi = box[t.mono.i];
        const VarBound& bj = box[t.mono.j];
        if (!bi.hi || !bj.hi) {
          if (t.coef != 0) infinite = true;
          continue;
        }
        err += abs(t.coef) * width(bi) * width(bj) / 4;
      }
      if (!infinite && err <= p.delta) continue;
      for (const QuadraticTerm& t : row.quadratic) {
        const VarBound& bi = box[t.mono.i];
        const VarBound& bj = box[t.mono.j];
        if (t.coef == 0) continue;
        if (!bi.hi || !bj.hi) {
          if (!split_infinite) {
            split_infinite = true;
            split_var = !bi.hi ? t.mono.i : t.mono.j;
          }
          continue;
        }
        if (split_infinite) continue;
        const Rational score = abs(t.coef) * width(bi) * width(bj);
        if (score > best) {
          best = score;
          split_var = width(bi) >= width(bj) ? t.mono.i : t.mono.j;
        }
      }
    }
    if (!split_var) return Inconclusive{"relaxation point failed verification"};

    if (split_infinite && finite_turn) {
      Rational widest = 0;
      for (const PolyRow& row : p.rows) {
        if (!row.weakenable) continue;
        for (const QuadraticTerm& t : row.quadratic) {
          const VarBound& bi = box[t.mono.i];
          const VarBound& bj = box[t.mono.j];
          if (t.coef == 0 || (!bi.hi && !bj.hi) || (bi.hi && bj.hi)) continue;
          const std::size_t f = bi.hi ? t.mono.i : t.mono.j;
          const Rational score = abs(t.coef) * width(box[f]);
          if (score > widest) {
            widest = score;
            split_var = f;
          }
        }
      }
    }

    const std::size_t v = *split_var;
    Rational at;
    unsigned next_unbounded = unbounded_splits;
    if (!box[v].hi) {
      if (unbounded_splits >= opt.max_unbounded_splits) {
        return Inconclusive{"unbounded variable " + p.names[v] + " not closed"};
      }
      ++next_unbounded;
      at = std::max(Rational(2 * box[v].lo + 1), Rational(lp_point[static_cast<Eigen::Index>(v)] + 1));
    } else {
      at = (box[v].lo + *box[v].hi) / 2;
    }
    Box lower = box, upper = box;
    lower[v].hi = at;
    upper[v].lo = at;
    const bool tail = !box[v].hi;
    Result lo_res = run(lower, next_unbounded);
    if (std::holds_alternative<Witness>(lo_res)) return lo_res;
    Result hi_res = run(upper, next_unbounded, tail);
    if (std::holds_alternative<Witness>(hi_res)) return hi_res;
    if (auto* i = std::get_if<Inconclusive>(&lo_res)) return *i;
    if (auto* i = std::get_if<Inconclusive>(&hi_res)) return *i;
    auto node = std::make_shared<SplitNode>();
    node->var = v;
    node->at = at;
    node->lower = std::get<Certificate>(std::move(lo_res));
    node->upper = std::get<Certificate>(std::move(hi_res));
    return Certificate{std::move(node)};
  }
};

bool verify_box(const RealProblem& p, const std::vector<Monomial>& monos, const Box& box, const Certificate& c) {
  if (auto* leaf = std::get_if<IntervalLeaf>(&c.node)) {
    return leaf->row < p.rows.size() && interval_refutes(box, p.rows[leaf->row]);
  }
  if (auto* leaf = std::get_if<FarkasLeaf>(&c.node)) {
    const Relaxation rel = relax(p, monos, box);
    std::map<std::size_t, Rational> combo;
    Rational rhs = 0;
    for (const auto& [ref, lambda] : leaf->multipliers) {
      if (lambda < 0) return false;
      auto it = std::find_if(rel.rows.begin(), rel.rows.end(), [&](const LinRow& r) { return same_ref(r.ref, ref); });
      if (it == rel.rows.end()) return false;
      for (const auto& [v, coef] : it->coef) combo[v] += lambda * coef;
      rhs += lambda * it->rhs;
    }
    for (const auto& entry : combo)
      if (entry.second != 0) return false;
    return rhs < 0;
  }
  const SplitNode& s = *std::get<std::shared_ptr<SplitNode>>(c.node);
  if (s.var >= p.size()) return false;
  const VarBound& b = box[s.var];
  if (s.at < b.lo || (b.hi && s.at > *b.hi)) return false;
  Box lower = box, upper = box;
  lower[s.var].hi = s.at;
  upper[s.var].lo = s.at;
  return verify_box(p, monos, lower, s.lower) && verify_box(p, monos, upper, s.upper);
}

}  // namespace

Rational PolyRow::evaluate(const RatVector& x) const {
  Rational s = 0;
  for (const LinearTerm& t : linear) s += t.coef * x[static_cast<Eigen::Index>(t.var)];
  for (const QuadraticTerm& t : quadratic)
    s += t.coef * x[static_cast<Eigen::Index>(t.mono.i)] * x[static_cast<Eigen::Index>(t.mono.j)];
  return s;
}

std::size_t RealProblem::add_var(std::string name, Rational lo, std::optional<Rational> hi) {
  names.push_back(std::move(name));
  box.push_back({std::move(lo), std::move(hi)});
  return box.size() - 1;
}

void validate(const RealProblem& p) {
  if (p.delta <= 0) throw std::invalid_argument("real problem: weakening budget must be positive");
  if (p.names.size() != p.box.size()) throw std::invalid_argument("real problem: names and box disagree");
  for (std::size_t v = 0; v < p.size(); ++v)
    if (p.box[v].hi && *p.box[v].hi < p.box[v].lo)
      throw std::invalid_argument("real problem: empty bound on " + p.names[v]);
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    const PolyRow& row = p.rows[r];
    if (!row.weakenable && !row.is_linear())
      throw std::invalid_argument("real problem: hard row " + std::to_string(r) + " is nonlinear");
    for (const LinearTerm& t : row.linear)
      if (t.var >= p.size()) throw std::invalid_argument("real problem: unknown variable in row " + std::to_string(r));
    for (const QuadraticTerm& t : row.quadratic)
      if (t.mono.j >= p.size() || t.mono.i > t.mono.j)
        throw std::invalid_argument("real problem: malformed monomial in row " + std::to_string(r));
  }
}

std::vector<Monomial> monomial_table(const RealProblem& p) {
  std::vector<Monomial> out;
  for (const PolyRow& r : p.rows)
    for (const QuadraticTerm& t : r.quadratic) out.push_back(t.mono);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RealVerdict decide(const RealProblem& p, const KernelOptions& options) {
  validate(p);
  Search search{p, options, monomial_table(p)};
  Search::Result r = search.run(p.box, 0);
  if (auto* w = std::get_if<Witness>(&r)) return *w;
  if (auto* i = std::get_if<Inconclusive>(&r)) return *i;
  return Refuted{std::get<Certificate>(std::move(r))};
}

WitnessCheck check_witness(const RealProblem& p, const RatVector& x) {
  if (static_cast<std::size_t>(x.size()) != p.size()) throw DimensionMismatch("check_witness: point has wrong length");
  for (std::size_t v = 0; v < p.size(); ++v) {
    const Rational& xv = x[static_cast<Eigen::Index>(v)];
    if (xv < p.box[v].lo || (p.box[v].hi && xv > *p.box[v].hi))
      return {WitnessCheck::Kind::Fail, v, true};
  }
  bool weakened = false;
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    const Rational lhs = p.rows[r].evaluate(x);
    if (lhs <= p.rows[r].rhs) continue;
    if (p.rows[r].weakenable && lhs <= p.rows[r].rhs + p.delta) {
      weakened = true;
      continue;
    }
    return {WitnessCheck::Kind::Fail, r, false};
  }
  return {weakened ? WitnessCheck::Kind::WeakPass : WitnessCheck::Kind::ExactPass};
}

bool verify_certificate(const RealProblem& p, const Certificate& c) {
  validate(p);
  return verify_box(p, monomial_table(p), p.box, c);
}

std::size_t leaf_count(const Certificate& c) {
  if (auto* s = std::get_if<std::shared_ptr<SplitNode>>(&c.node)) return leaf_count((*s)->lower) + leaf_count((*s)->upper);
  return 1;
}

}  // namespace mibgap
