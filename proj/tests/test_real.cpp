#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mibgap/real.hpp"

#include <chrono>
#include <random>

using namespace mibgap;

namespace {

// x*y >= 1 and x + y <= 1 on [0,10]^2.
RealProblem am_gm() {
  RealProblem p;
  p.add_var("x", 0, Rational(10));
  p.add_var("y", 0, Rational(10));
  p.rows.push_back({{}, {{{0, 1}, -1}}, -1, true, "xy>=1"});
  p.rows.push_back({{{0, 1}, {1, 1}}, {}, 1, false, "x+y<=1"});
  p.delta = Rational(1, 8);
  return p;
}

RealProblem xy_ge_one() {
  RealProblem p;
  p.add_var("x", 0, Rational(2));
  p.add_var("y", 0, Rational(2));
  p.rows.push_back({{}, {{{0, 1}, -1}}, -1, true, "xy>=1"});
  p.delta = Rational(1, 4);
  return p;
}

RatVector point(std::initializer_list<Rational> v) {
  RatVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const Rational& x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("decide: product bound refutation") {
  const auto start = std::chrono::steady_clock::now();
  RealProblem p = am_gm();
  RealVerdict v = decide(p);
  REQUIRE(std::holds_alternative<Refuted>(v));
  CHECK(verify_certificate(p, std::get<Refuted>(v).cover));
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("decide: refutation survives shrinking the domain") {
  RealProblem p = am_gm();
  p.box[0].hi = Rational(3);
  p.box[1].lo = Rational(1, 5);
  RealVerdict v = decide(p);
  REQUIRE(std::holds_alternative<Refuted>(v));
  CHECK(verify_certificate(p, std::get<Refuted>(v).cover));
}

TEST_CASE("decide: product witness without weakening") {
  RealProblem p = xy_ge_one();
  RealVerdict v = decide(p);
  REQUIRE(std::holds_alternative<Witness>(v));
  const Witness& w = std::get<Witness>(v);
  CHECK_FALSE(w.weakened);
  CHECK(check_witness(p, w.point).kind == WitnessCheck::Kind::ExactPass);
}

TEST_CASE("decide: pinned variable via hard rows") {
  RealProblem p;
  p.add_var("y", 0, Rational(2));
  p.rows.push_back({{{0, -1}}, {}, -1, false, "y>=1"});
  p.rows.push_back({{{0, 1}}, {}, 1, false, "y<=1"});
  p.delta = Rational(1, 4);
  RealVerdict v = decide(p);
  REQUIRE(std::holds_alternative<Witness>(v));
  CHECK(std::get<Witness>(v).point == point({1}));
  CHECK_FALSE(std::get<Witness>(v).weakened);
}

TEST_CASE("check_witness classifications") {
  RealProblem p = xy_ge_one();
  CHECK(check_witness(p, point({Rational(3, 2), 1})).kind == WitnessCheck::Kind::ExactPass);
  CHECK(check_witness(p, point({1, 1})).kind == WitnessCheck::Kind::ExactPass);
  WitnessCheck f = check_witness(p, point({Rational(1, 2), 1}));
  CHECK(f.kind == WitnessCheck::Kind::Fail);
  CHECK(f.row == 0);
  CHECK(check_witness(p, point({Rational(7, 8), 1})).kind == WitnessCheck::Kind::WeakPass);
  CHECK(check_witness(p, point({3, 1})).box_violation);
}

TEST_CASE("validate rejects nonlinear hard rows and bad deltas") {
  RealProblem p = xy_ge_one();
  p.rows[0].weakenable = false;
  CHECK_THROWS_AS(decide(p), std::invalid_argument);
  RealProblem q = xy_ge_one();
  q.delta = 0;
  CHECK_THROWS_AS(decide(q), std::invalid_argument);
}

TEST_CASE("decide: half-infinite domain") {
  // x*y <= 1, x - 4 y >= 0 ... with x in [1, inf), y in [1/8, 1]: needs x >= 4y, xy <= 1.
  RealProblem p;
  p.add_var("x", 1, std::nullopt);
  p.add_var("y", Rational(1, 2), Rational(1));
  p.rows.push_back({{}, {{{0, 1}, 1}}, 1, true, "xy<=1"});
  p.rows.push_back({{{0, -1}}, {}, -3, false, "x>=3"});
  p.delta = Rational(1, 8);
  RealVerdict v = decide(p);
  REQUIRE(std::holds_alternative<Refuted>(v));
  CHECK(verify_certificate(p, std::get<Refuted>(v).cover));

  p.rows[1].rhs = -2;
  RealVerdict w = decide(p);
  REQUIRE(std::holds_alternative<Witness>(w));
  CHECK(check_witness(p, std::get<Witness>(w).point).kind != WitnessCheck::Kind::Fail);
}

TEST_CASE("decide: tampered certificates are rejected") {
  RealProblem p = am_gm();
  Refuted r = std::get<Refuted>(decide(p));
  RealProblem looser = p;
  looser.rows[1].rhs = 3;
  CHECK_FALSE(verify_certificate(looser, r.cover));
}

TEST_CASE("decide: randomized bilinear suite") {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> coef(-3, 3);
  int refuted = 0, witnessed = 0;
  for (int trial = 0; trial < 80; ++trial) {
    RealProblem p;
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
    for (std::size_t v = 0; v < n; ++v) {
      const int lo = coef(rng);
      p.add_var("v" + std::to_string(v), lo, Rational(lo + 1 + std::abs(coef(rng))));
    }
    for (int r = 0; r < 3; ++r) {
      PolyRow row;
      for (std::size_t v = 0; v < n; ++v) row.linear.push_back({v, coef(rng)});
      const std::size_t i = static_cast<std::size_t>(rng() % n), j = static_cast<std::size_t>(rng() % n);
      row.quadratic.push_back({{std::min(i, j), std::max(i, j)}, coef(rng)});
      row.rhs = coef(rng);
      row.weakenable = true;
      p.rows.push_back(row);
    }
    p.delta = Rational(1, 4);
    RealVerdict v = decide(p);
    REQUIRE_FALSE(std::holds_alternative<Inconclusive>(v));
    if (auto* w = std::get_if<Witness>(&v)) {
      ++witnessed;
      CHECK(check_witness(p, w->point).kind != WitnessCheck::Kind::Fail);
    } else {
      ++refuted;
      CHECK(verify_certificate(p, std::get<Refuted>(v).cover));
      // Independent grid oracle: no grid point may satisfy all rows exactly.
      std::vector<Rational> cur(n);
      bool found = false;
      std::function<void(std::size_t)> walk = [&](std::size_t k) {
        if (found) return;
        if (k == n) {
          RatVector x(static_cast<Eigen::Index>(n));
          for (std::size_t t = 0; t < n; ++t) x[static_cast<Eigen::Index>(t)] = cur[t];
          RealProblem exact = p;
          if (check_witness(exact, x).kind == WitnessCheck::Kind::ExactPass) found = true;
          return;
        }
        const Rational lo = p.box[k].lo, hi = *p.box[k].hi;
        for (int s = 0; s <= 8; ++s) {
          cur[k] = lo + (hi - lo) * s / 8;
          walk(k + 1);
        }
      };
      walk(0);
      CHECK_FALSE(found);
    }
  }
  CHECK(refuted > 5);
  CHECK(witnessed > 5);
}
