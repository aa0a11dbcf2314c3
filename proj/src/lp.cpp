#include "mibgap/lp.hpp"

#include <vector>

namespace mibgap {

Polyhedron::Polyhedron(RatMatrix a, RatVector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size())
    throw DimensionMismatch("Polyhedron: A has " + std::to_string(a_.rows()) +
                            " rows but b has " + std::to_string(b_.size()));
}

bool Polyhedron::contains(const RatVector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("Polyhedron::contains");
  for (Eigen::Index i = 0; i < rows(); ++i) {
    Rational s = 0;
    for (Eigen::Index j = 0; j < dim(); ++j)
      if (a_(i, j) != 0) s += a_(i, j) * x[j];
    if (s > b_[i]) return false;
  }
  return true;
}

Polyhedron Polyhedron::with_row(const RatVector& row, const Rational& rhs) const {
  if (row.size() != dim()) throw DimensionMismatch("Polyhedron::with_row");
  RatMatrix a(rows() + 1, dim());
  RatVector b(rows() + 1);
  a.topRows(rows()) = a_;
  a.row(rows()) = row.transpose();
  b.head(rows()) = b_;
  b[rows()] = rhs;
  return Polyhedron(std::move(a), std::move(b));
}

bool verify_farkas(const RatMatrix& a, const RatVector& b, const RatVector& y) {
  if (y.size() != a.rows() || b.size() != a.rows()) return false;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] < 0) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Rational s = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (y[i] != 0 && a(i, j) != 0) s += y[i] * a(i, j);
    if (s != 0) return false;
  }
  Rational rhs = 0;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (y[i] != 0) rhs += y[i] * b[i];
  return rhs < 0;
}

namespace {

// Dense tableau over z = (x+, x-, s, artificial) >= 0 with one row per
// constraint of the polyhedron, each row scaled so its right side is >= 0.
class Tableau {
 public:
  explicit Tableau(const Polyhedron& poly)
      : m_(poly.rows()), k_(poly.dim()), sign_(static_cast<std::size_t>(m_), 1) {
    for (Eigen::Index i = 0; i < m_; ++i)
      if (poly.b()[i] < 0) {
        sign_[static_cast<std::size_t>(i)] = -1;
        art_col_.push_back(i);
      }
    art_begin_ = 2 * k_ + m_;
    cols_ = art_begin_ + static_cast<Eigen::Index>(art_col_.size());
    width_ = cols_ + 1;
    t_.assign(static_cast<std::size_t>(m_ * width_), Rational(0));
    basis_.assign(static_cast<std::size_t>(m_), 0);
    live_.assign(static_cast<std::size_t>(m_), true);
    identity_col_.assign(static_cast<std::size_t>(m_), 0);

    Eigen::Index next_art = art_begin_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const int s = sign_[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < k_; ++j) {
        const Rational& v = poly.a()(i, j);
        if (v == 0) continue;
        at(i, j) = s > 0 ? v : Rational(-v);
        at(i, k_ + j) = s > 0 ? Rational(-v) : v;
      }
      at(i, 2 * k_ + i) = s;
      at(i, cols_) = s > 0 ? poly.b()[i] : Rational(-poly.b()[i]);
      if (s > 0) {
        basis_[static_cast<std::size_t>(i)] = 2 * k_ + i;
      } else {
        at(i, next_art) = 1;
        basis_[static_cast<std::size_t>(i)] = next_art++;
      }
      identity_col_[static_cast<std::size_t>(i)] = basis_[static_cast<std::size_t>(i)];
    }
  }

  // Phase 1. Returns Farkas multipliers if infeasible.
  std::optional<RatVector> phase_one() {
    if (art_col_.empty()) return std::nullopt;
    std::vector<Rational> cost(static_cast<std::size_t>(cols_), Rational(0));
    for (Eigen::Index j = art_begin_; j < cols_; ++j) cost[static_cast<std::size_t>(j)] = 1;
    set_objective(cost);
    run(cols_);
    if (objective_value() > 0) {
      RatVector pi = RatVector::Zero(m_);
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (basis(r) < art_begin_) continue;
        for (Eigen::Index i = 0; i < m_; ++i) pi[i] += at(r, identity_col_[static_cast<std::size_t>(i)]);
      }
      RatVector y(m_);
      for (Eigen::Index i = 0; i < m_; ++i)
        y[i] = sign_[static_cast<std::size_t>(i)] > 0 ? Rational(-pi[i]) : pi[i];
      return y;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis(r) < art_begin_) continue;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < art_begin_; ++j)
        if (at(r, j) != 0) {
          enter = j;
          break;
        }
      if (enter < 0)
        live_[static_cast<std::size_t>(r)] = false;
      else
        pivot(r, enter);
    }
    return std::nullopt;
  }

  // Phase 2: minimize cost over x+/x-/slack columns. Returns the entering
  // column of an unbounded direction, or -1 at optimality.
  Eigen::Index phase_two(const RatVector& min_cost) {
    std::vector<Rational> cost(static_cast<std::size_t>(cols_), Rational(0));
    for (Eigen::Index j = 0; j < k_; ++j) {
      cost[static_cast<std::size_t>(j)] = min_cost[j];
      cost[static_cast<std::size_t>(k_ + j)] = -min_cost[j];
    }
    set_objective(cost);
    return run(art_begin_);
  }

  RatVector point() const {
    RatVector x = RatVector::Zero(k_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (!live_[static_cast<std::size_t>(r)]) continue;
      const Eigen::Index b = basis(r);
      if (b < k_) x[b] += at(r, cols_);
      else if (b < 2 * k_) x[b - k_] -= at(r, cols_);
    }
    return x;
  }

  RatVector ray(Eigen::Index enter) const {
    RatVector d = RatVector::Zero(k_);
    auto add = [&](Eigen::Index col, const Rational& v) {
      if (col < k_) d[col] += v;
      else if (col < 2 * k_) d[col - k_] -= v;
    };
    add(enter, Rational(1));
    for (Eigen::Index r = 0; r < m_; ++r)
      if (live_[static_cast<std::size_t>(r)] && at(r, enter) != 0) add(basis(r), Rational(-at(r, enter)));
    return d;
  }

  Rational objective_value() const { return -obj_[static_cast<std::size_t>(cols_)]; }

 private:
  Rational& at(Eigen::Index r, Eigen::Index c) { return t_[static_cast<std::size_t>(r * width_ + c)]; }
  const Rational& at(Eigen::Index r, Eigen::Index c) const {
    return t_[static_cast<std::size_t>(r * width_ + c)];
  }
  Eigen::Index basis(Eigen::Index r) const { return basis_[static_cast<std::size_t>(r)]; }

  // obj_ holds reduced costs; obj_[cols_] holds minus the objective value.
  void set_objective(const std::vector<Rational>& cost) {
    obj_.assign(static_cast<std::size_t>(width_), Rational(0));
    for (Eigen::Index j = 0; j < cols_; ++j) obj_[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)];
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (!live_[static_cast<std::size_t>(r)]) continue;
      const Rational& cb = cost[static_cast<std::size_t>(basis(r))];
      if (cb == 0) continue;
      for (Eigen::Index j = 0; j < width_; ++j)
        if (at(r, j) != 0) obj_[static_cast<std::size_t>(j)] -= cb * at(r, j);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const Rational inv = Rational(1) / at(r, c);
    std::vector<Eigen::Index> nz;
    for (Eigen::Index j = 0; j < width_; ++j)
      if (at(r, j) != 0) {
        at(r, j) *= inv;
        nz.push_back(j);
      }
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r || at(i, c) == 0) continue;
      const Rational f = at(i, c);
      for (Eigen::Index j : nz) at(i, j) -= f * at(r, j);
    }
    if (!obj_.empty() && obj_[static_cast<std::size_t>(c)] != 0) {
      const Rational f = obj_[static_cast<std::size_t>(c)];
      for (Eigen::Index j : nz) obj_[static_cast<std::size_t>(j)] -= f * at(r, j);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule over columns [0, allowed).
  Eigen::Index run(Eigen::Index allowed) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j)
        if (obj_[static_cast<std::size_t>(j)] < 0) {
          enter = j;
          break;
        }
      if (enter < 0) return -1;
      Eigen::Index leave = -1;
      Rational best;
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (!live_[static_cast<std::size_t>(r)] || at(r, enter) <= 0) continue;
        Rational ratio = at(r, cols_) / at(r, enter);
        if (leave < 0 || ratio < best || (ratio == best && basis(r) < basis(leave))) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return enter;
      pivot(leave, enter);
    }
  }

  Eigen::Index m_, k_;
  Eigen::Index art_begin_ = 0, cols_ = 0, width_ = 0;
  std::vector<int> sign_;
  std::vector<Eigen::Index> art_col_;
  std::vector<Rational> t_;
  std::vector<Rational> obj_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> live_;
  std::vector<Eigen::Index> identity_col_;
};

// Scales multipliers so that y^T b = -1.
RatVector normalized(const Polyhedron& poly, RatVector y) {
  Rational rhs = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0) rhs += y[i] * poly.b()[i];
  if (rhs < 0) {
    const Rational f = Rational(-1) / rhs;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= f;
  }
  return y;
}

}  // namespace

LpOutcome lp_solve(const Polyhedron& poly, const RatVector& objective, Sense sense) {
  if (objective.size() != poly.dim())
    throw DimensionMismatch("lp_solve: objective has length " + std::to_string(objective.size()) +
                            ", polyhedron dimension is " + std::to_string(poly.dim()));
  Tableau tab(poly);
  if (auto farkas = tab.phase_one()) return LpInfeasible{normalized(poly, std::move(*farkas))};
  RatVector cost = sense == Sense::Maximize ? RatVector(-objective) : objective;
  const Eigen::Index enter = tab.phase_two(cost);
  RatVector x = tab.point();
  if (enter >= 0) return LpUnbounded{std::move(x), tab.ray(enter)};
  Rational value = dot(objective, x);
  return LpFeasible{std::move(x), std::move(value)};
}

std::variant<RatVector, LpInfeasible> lp_feasible(const Polyhedron& poly) {
  Tableau tab(poly);
  if (auto farkas = tab.phase_one()) return LpInfeasible{normalized(poly, std::move(*farkas))};
  return tab.point();
}

}  // namespace mibgap
