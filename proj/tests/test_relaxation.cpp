#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mibgap/geometry.hpp"
#include "mibgap/relaxation.hpp"

#include <random>

using namespace mibgap;

namespace {

IntMatrix imat(std::initializer_list<std::initializer_list<long>> rows) {
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index k = m ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  IntMatrix a(m, k);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (long v : r) a(i, j++) = v;
    ++i;
  }
  return a;
}

IntVector ivec(std::initializer_list<long> v) {
  IntVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (long x : v) out[i++] = x;
  return out;
}

// 2 x y <= 1 with 0 <= y <= 1: m = 1, n = 1, H = 2.
MibSystem reference() {
  return MibSystem::standard(1, 1, {{imat({{2}}), ivec({0}), 1}}, {imat({{1}, {-1}}), ivec({1, 0})});
}

// doubly exponential family, n = 2, after fixing x1 = 2.
MibSystem doubleexp_two_fixed() {
  std::vector<BilinearRow> rows;
  rows.push_back({imat({{0, 0, 0}}), ivec({0, 2, 0}), 1});
  rows.push_back({imat({{0, 0, 1}}), ivec({0, 0, 0}), 1});
  rows.push_back({imat({{0, -1, 0}}), ivec({2, 0, 0}), 0});
  LinearBlock real{imat({{1, 0, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}, {0, 1, 0}, {0, 0, 1}}),
                   ivec({1, -1, 0, 0, 1, 1})};
  return MibSystem::standard(1, 3, rows, real);
}

// Naive oracle: every sign-normalized u in the full box with ||u||^2 < bound.
std::set<std::vector<Integer>> naive_u(Eigen::Index m, const Rational& bound) {
  std::set<std::vector<Integer>> out;
  const long radius = static_cast<long>(ceil(bound));
  std::vector<Integer> cur(static_cast<std::size_t>(m));
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index k) {
    if (k == m) {
      Integer norm = 0;
      Eigen::Index lead = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        norm += cur[static_cast<std::size_t>(i)] * cur[static_cast<std::size_t>(i)];
        if (lead < 0 && cur[static_cast<std::size_t>(i)] != 0) lead = i;
      }
      if (lead >= 0 && cur[static_cast<std::size_t>(lead)] > 0 && Rational(norm) < bound) out.insert(cur);
      return;
    }
    for (long v = -radius; v <= radius; ++v) {
      cur[static_cast<std::size_t>(k)] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_CASE("compute_constants on the reference instance") {
  ConstantLedger l = compute_constants(reference(), Rational(1, 2));
  CHECK(l.height == 2);
  CHECK(l.kappa1_upper == 4);
  CHECK(l.r == Rational(1, 32));
  CHECK(l.omega_upper == 1);
  CHECK(l.omega_hat == 2);
  REQUIRE(l.u_listed);
  REQUIRE(l.u.size() == 23);
  CHECK(l.u.front() == ivec({1}));
  CHECK(l.u.back() == ivec({23}));
  REQUIRE(l.u_primitive.size() == 1);
  CHECK(l.kappa2 == 42);
  CHECK(l.kappa3 == 4);
  CHECK(l.delta_s == Rational(1, 8));
}

TEST_CASE("short vectors: threshold cases") {
  // r = 1, omega_hat = 2: 2 |u| < 3/2 has no solutions.
  const Rational reach = (Rational(1) + Rational(1, 2)) / 2;
  CHECK(enumerate_short_vectors(1, reach * reach, 1000)->empty());
  // m = 2, r = 1/4, Omega = 9/4: ||u|| < 11/2.
  const Rational reach2 = (Rational(9, 4) + Rational(1, 2)) / Rational(1, 2);
  auto u = enumerate_short_vectors(2, reach2 * reach2, 1000);
  REQUIRE(u);
  const auto naive = naive_u(2, reach2 * reach2);
  CHECK(u->size() == naive.size());
  for (const IntVector& v : *u) CHECK(naive.count(to_std(v)) == 1);
  CHECK_FALSE(enumerate_short_vectors(3, Rational(1000000), 1000).has_value());
}

TEST_CASE("short vectors agree with the naive box enumeration") {
  for (Eigen::Index m = 1; m <= 3; ++m)
    for (int b = 1; b <= 30; b += 7) {
      const Rational bound(b * 3, 2);
      auto u = enumerate_short_vectors(m, bound, 1u << 16);
      REQUIRE(u);
      const auto naive = naive_u(m, bound);
      CHECK(u->size() == naive.size());
      for (std::size_t i = 0; i + 1 < u->size(); ++i) CHECK((*u)[i].squaredNorm() <= (*u)[i + 1].squaredNorm());
    }
}

TEST_CASE("flatness_bound defaults") {
  CHECK(flatness_bound(1) == 1);
  CHECK(flatness_bound(2) == Rational(9, 4));
  CHECK(flatness_bound(3) == 54);
  CHECK_THROWS(flatness_bound(0));
  // 9/4 bounds 1 + 2/sqrt(3) from above: (5/4)^2 > 4/3.
  CHECK(Rational(25, 16) > Rational(4, 3));
}

TEST_CASE("ledger monotonicity") {
  ConstantLedger base = compute_constants(reference(), Rational(1, 2));
  ConstantLedger finer = compute_constants(reference(), Rational(1, 4));
  CHECK(finer.kappa2 > base.kappa2);
  CHECK(finer.kappa3 > base.kappa3);
  CHECK(finer.u.size() >= base.u.size());
  MibSystem taller = MibSystem::standard(1, 1, {{imat({{3}}), ivec({0}), 1}}, {imat({{1}, {-1}}), ivec({1, 0})});
  CHECK(compute_constants(taller, Rational(1, 2)).kappa2 > base.kappa2);
  CHECK_THROWS_AS(compute_constants(MibSystem::standard(1, 1, {{imat({{1}}), ivec({0}), 1}}, {imat({{-1}}), ivec({0})}),
                                    Rational(1, 2)),
                  UnboundedSystem);
}

TEST_CASE("build_relaxed: no width rows when U is empty") {
  ConstantLedger l = compute_constants(reference(), Rational(1, 2));
  l.u.clear();
  l.u_primitive.clear();
  RelaxedProblem r = build_relaxed(reference(), Rational(1, 2), l);
  CHECK(r.pairs.empty());
  CHECK(r.problem.size() == 2);
  CHECK(r.problem.rows.size() == 3);
  CHECK(r.problem.box[r.x_vars[0]].lo == 1);
  CHECK_FALSE(r.problem.box[r.x_vars[0]].hi.has_value());
}

TEST_CASE("build_relaxed: single u adds a point pair") {
  ConstantLedger l = compute_constants(reference(), Rational(1, 2));
  RelaxedProblem r = build_relaxed(reference(), Rational(1, 2), l);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].u == ivec({1}));
  CHECK(r.problem.size() == 4);
  const PolyRow& width = r.problem.rows.back();
  CHECK_FALSE(width.weakenable);
  CHECK(width.rhs == -2);
  RatVector pt(4);
  pt << 1, 0, 5, 3;  // x, y, p, q: p - q = 2
  CHECK(width.evaluate(pt) == -2);
}

TEST_CASE("build_relaxed: doubly exponential rows carry slack 3/32") {
  const Rational eps(1, 8);
  const MibSystem s = doubleexp_two_fixed();
  ConstantLedger l = compute_constants(s, eps);
  RelaxedProblem r = build_relaxed(s, eps, l);
  REQUIRE(r.core_rows.size() == s.rows().size());
  RatVector pt = RatVector::Zero(static_cast<Eigen::Index>(r.problem.size()));
  // Known witness x2 = 5, y = (1, 7/16, 1/8).
  pt[static_cast<Eigen::Index>(r.x_vars[0])] = 5;
  pt[static_cast<Eigen::Index>(r.y_vars[0])] = 1;
  pt[static_cast<Eigen::Index>(r.y_vars[1])] = Rational(7, 16);
  pt[static_cast<Eigen::Index>(r.y_vars[2])] = Rational(1, 8);
  for (std::size_t i = 0; i < r.core_rows.size(); ++i) {
    const PolyRow& row = r.problem.rows[r.core_rows[i]];
    CHECK(row.rhs == Rational(s.rows()[i].c) - Rational(3, 32));
    const Rational lhs = row.evaluate(pt);
    CHECK(lhs == s.bilinear_value(i, ivec({5}), RatVector(pt.segment(1, 3))));
    CHECK(lhs <= row.rhs);
  }
}

TEST_CASE("ball of radius r around a margin-eps/2 point stays inside P(y)") {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> coef(-2, 2), num(0, 8);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    BilinearRow row{imat({{coef(rng), coef(rng)}, {coef(rng), coef(rng)}}), ivec({coef(rng), coef(rng)}), coef(rng) + 6};
    MibSystem s = MibSystem::standard(2, 2, {row}, {imat({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}), ivec({1, 1, 0, 0})});
    const Rational eps(1, 2);
    ConstantLedger l = compute_constants(s, eps, {std::nullopt, 16});
    RatVector y(2);
    y << Rational(num(rng), 8), Rational(num(rng), 8);
    IntVector xt(2);
    xt << 1 + num(rng) % 4, 1 + num(rng) % 4;
    if (s.bilinear_value(0, xt, y) > Rational(row.c) - eps / 2) continue;
    ++checked;
    // Ball boundary samples with rational coordinates: axis points and
    // (3/5, 4/5) directions scaled by r.
    const Rational dirs[][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {Rational(3, 5), Rational(4, 5)},
                                {Rational(-3, 5), Rational(4, 5)}, {Rational(4, 5), Rational(-3, 5)},
                                {Rational(-4, 5), Rational(-3, 5)}};
    for (const auto& d : dirs) {
      Rational lhs = 0;
      const Rational px = Rational(xt[0]) + l.r * d[0], py = Rational(xt[1]) + l.r * d[1];
      CHECK(px >= 0);
      CHECK(py >= 0);
      for (Eigen::Index k = 0; k < 2; ++k)
        lhs += (px * Rational(row.a(0, k)) + py * Rational(row.a(1, k)) + Rational(row.b[k])) * y[k];
      CHECK(lhs <= Rational(row.c));
    }
  }
  CHECK(checked >= 20);
}
