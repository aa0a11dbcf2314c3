#include "mibgap/mib.hpp"

#include "mibgap/lp.hpp"
#include "mibgap/semilinear.hpp"

#include <algorithm>
#include <set>

namespace mibgap {

namespace {

template <typename M>
bool same(const M& a, const M& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

void check_block(const LinearBlock& block, Eigen::Index cols, const char* what) {
  if (block.matrix.cols() != cols || block.matrix.rows() != block.rhs.size())
    throw DimensionMismatch(std::string(what) + ": block shape disagrees with system dimensions");
}

template <typename M>
void raise_height(Integer& h, const M& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) h = std::max(h, abs(m(i, j)));
}

std::vector<Integer> flatten_row(const IntMatrix& m, const IntVector& rhs, Eigen::Index i) {
  std::vector<Integer> v;
  for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  v.push_back(rhs[i]);
  return v;
}

LinearBlock unique_rows(const LinearBlock& block) {
  std::set<std::vector<Integer>> seen;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < block.matrix.rows(); ++i)
    if (seen.insert(flatten_row(block.matrix, block.rhs, i)).second) keep.push_back(i);
  LinearBlock out{IntMatrix(static_cast<Eigen::Index>(keep.size()), block.matrix.cols()),
                  IntVector(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.matrix.row(static_cast<Eigen::Index>(r)) = block.matrix.row(keep[r]);
    out.rhs[static_cast<Eigen::Index>(r)] = block.rhs[keep[r]];
  }
  return out;
}

}  // namespace

MibSystem::MibSystem(Eigen::Index m, Eigen::Index n, std::vector<BilinearRow> rows, LinearBlock integer_block,
                     LinearBlock real_block)
    : m_(m), n_(n), rows_(std::move(rows)), integer_block_(std::move(integer_block)),
      real_block_(std::move(real_block)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const BilinearRow& r = rows_[i];
    if (r.a.rows() != m_ || r.a.cols() != n_ || r.b.size() != n_)
      throw DimensionMismatch("bilinear row " + std::to_string(i) + " has wrong shape");
  }
  check_block(integer_block_, m_, "integer-linear");
  check_block(real_block_, n_, "real-linear");
}

MibSystem MibSystem::standard(Eigen::Index m, Eigen::Index n, std::vector<BilinearRow> rows,
                              LinearBlock real_block) {
  LinearBlock nonneg{IntMatrix(-IntMatrix::Identity(m, m)), IntVector::Zero(m)};
  return MibSystem(m, n, std::move(rows), std::move(nonneg), std::move(real_block));
}

Form MibSystem::form() const {
  const IntMatrix neg_id = -IntMatrix::Identity(m_, m_);
  if (same(integer_block_.matrix, neg_id) && is_zero(integer_block_.rhs)) return Form::Standard;
  return Form::General;
}

Integer MibSystem::height() const {
  Integer h = 0;
  for (const BilinearRow& r : rows_) {
    raise_height(h, r.a);
    raise_height(h, r.b);
    h = std::max(h, abs(r.c));
  }
  raise_height(h, integer_block_.matrix);
  raise_height(h, integer_block_.rhs);
  raise_height(h, real_block_.matrix);
  raise_height(h, real_block_.rhs);
  return h;
}

Rational MibSystem::bilinear_value(std::size_t i, const IntVector& x, const RatVector& y) const {
  const BilinearRow& r = rows_.at(i);
  Rational s = 0;
  for (Eigen::Index k = 0; k < n_; ++k) {
    if (y[k] == 0) continue;
    Integer coef = r.b[k];
    for (Eigen::Index j = 0; j < m_; ++j) coef += x[j] * r.a(j, k);
    if (coef != 0) s += Rational(coef) * y[k];
  }
  return s;
}

bool operator==(const MibSystem& a, const MibSystem& b) {
  if (a.m_ != b.m_ || a.n_ != b.n_ || a.rows_.size() != b.rows_.size()) return false;
  for (std::size_t i = 0; i < a.rows_.size(); ++i)
    if (!same(a.rows_[i].a, b.rows_[i].a) || !same(a.rows_[i].b, b.rows_[i].b) || a.rows_[i].c != b.rows_[i].c)
      return false;
  return same(a.integer_block_.matrix, b.integer_block_.matrix) && same(a.integer_block_.rhs, b.integer_block_.rhs) &&
         same(a.real_block_.matrix, b.real_block_.matrix) && same(a.real_block_.rhs, b.real_block_.rhs);
}

SlackCheck check_assignment(const MibSystem& s, const Assignment& a, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("check_assignment: eps must be positive");
  if (a.x.size() != s.m() || a.y.size() != s.n())
    throw DimensionMismatch("check_assignment: assignment has shape (" + std::to_string(a.x.size()) + ", " +
                            std::to_string(a.y.size()) + "), system expects (" + std::to_string(s.m()) + ", " +
                            std::to_string(s.n()) + ")");
  SlackCheck out{SlackCheck::Kind::SatWithSlack, Rational(0)};
  auto violated = [&](Block block, std::size_t row) {
    out.kind = SlackCheck::Kind::Violated;
    out.violated_block = block;
    out.violated_row = row;
    return out;
  };
  for (std::size_t i = 0; i < s.rows().size(); ++i) {
    Rational margin = Rational(s.rows()[i].c) - s.bilinear_value(i, a.x, a.y);
    if (!out.has_bilinear_rows || margin < out.margin) out.margin = margin;
    out.has_bilinear_rows = true;
    if (margin < 0) return violated(Block::Bilinear, i);
  }
  const LinearBlock& ib = s.integer_block();
  for (Eigen::Index i = 0; i < ib.matrix.rows(); ++i) {
    Integer lhs = 0;
    for (Eigen::Index j = 0; j < s.m(); ++j) lhs += ib.matrix(i, j) * a.x[j];
    if (lhs > ib.rhs[i]) return violated(Block::IntegerLinear, static_cast<std::size_t>(i));
  }
  const LinearBlock& rb = s.real_block();
  for (Eigen::Index i = 0; i < rb.matrix.rows(); ++i) {
    Rational lhs = 0;
    for (Eigen::Index j = 0; j < s.n(); ++j)
      if (rb.matrix(i, j) != 0) lhs += Rational(rb.matrix(i, j)) * a.y[j];
    if (lhs > Rational(rb.rhs[i])) return violated(Block::RealLinear, static_cast<std::size_t>(i));
  }
  if (out.has_bilinear_rows && out.margin < eps) out.kind = SlackCheck::Kind::SatNoSlack;
  return out;
}

Rational kappa1_formula(Eigen::Index m, const Integer& height) {
  if (m == 0) return 0;
  const Rational sqrt_m = Rational(isqrt_ceil(Integer(4 * m)), 2);
  const unsigned exponent = static_cast<unsigned>(m * m + m);
  return Rational(ceil(sqrt_m * Rational(pow(height, exponent))));
}

Boundedness is_bounded(const MibSystem& s) {
  const LinearBlock& rb = s.real_block();
  const Polyhedron ys(to_rational(rb.matrix), to_rational(rb.rhs));
  Rational radius_sq = 0;
  bool empty = false;
  for (Eigen::Index k = 0; k < s.n() && !empty; ++k) {
    RatVector e = RatVector::Zero(s.n());
    e[k] = 1;
    Rational extent = 0;
    for (Sense sense : {Sense::Maximize, Sense::Minimize}) {
      LpOutcome o = lp_solve(ys, e, sense);
      if (auto* u = std::get_if<LpUnbounded>(&o)) return UnboundedY{to_rational(primitive_direction(u->ray))};
      if (std::holds_alternative<LpInfeasible>(o)) {
        empty = true;
        break;
      }
      extent = std::max(extent, abs(std::get<LpFeasible>(o).value));
    }
    radius_sq += extent * extent;
  }
  if (empty) radius_sq = 0;
  return BoundedY{std::max(kappa1_formula(s.m(), s.height()), sqrt_upper(radius_sq))};
}

std::vector<StandardPiece> to_standard_form(const MibSystem& s) {
  if (s.form() == Form::Standard) return {{s, IntVector::Zero(s.m()), IntMatrix::Identity(s.m(), s.m())}};
  const HybridLinearSet hls = decompose(s.integer_block().matrix, s.integer_block().rhs);
  std::vector<StandardPiece> out;
  for (const LinearSet& piece : hls.pieces) {
    MibSystem sys = MibSystem::standard(piece.period_count(), s.n(), substitute_rows(s.rows(), piece.base, piece.periods),
                                        s.real_block());
    out.push_back({std::move(sys), piece.base, piece.periods});
  }
  return out;
}

Assignment lift(const StandardPiece& piece, const Assignment& a) {
  return {IntVector(piece.w + piece.p * a.x), a.y};
}

MibSystem without_duplicate_rows(const MibSystem& s) {
  std::vector<BilinearRow> rows;
  std::set<std::vector<Integer>> seen;
  for (const BilinearRow& r : s.rows()) {
    std::vector<Integer> key(r.a.data(), r.a.data() + r.a.size());
    key.insert(key.end(), r.b.data(), r.b.data() + r.b.size());
    key.push_back(r.c);
    if (seen.insert(key).second) rows.push_back(r);
  }
  return MibSystem(s.m(), s.n(), std::move(rows), unique_rows(s.integer_block()), unique_rows(s.real_block()));
}

}  // namespace mibgap
