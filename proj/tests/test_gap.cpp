#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mibgap/gap.hpp"
#include "mibgap/generators.hpp"
#include "mibgap/oracle.hpp"

#include <algorithm>
#include <set>

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

RatVector rvec(std::initializer_list<Rational> v) {
  RatVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const Rational& x : v) out[i++] = x;
  return out;
}

LinearBlock unit_interval() { return {imat({{1}, {-1}}), ivec({1, 0})}; }

// x y <= 1, 0 <= y <= 1.
MibSystem product_at_most_one() { return MibSystem::standard(1, 1, {{imat({{1}}), ivec({0}), 1}}, unit_interval()); }

// x y <= 1 and x y >= 2.
MibSystem product_conflict() {
  return MibSystem::standard(1, 1, {{imat({{1}}), ivec({0}), 1}, {imat({{-1}}), ivec({0}), -2}}, unit_interval());
}

// 2 x y <= 1, 0 <= y <= 1.
MibSystem reference() { return MibSystem::standard(1, 1, {{imat({{2}}), ivec({0}), 1}}, unit_interval()); }

// m = 0: rows b^T y <= c only.
MibSystem linear_rows(std::vector<std::pair<long, long>> rows) {
  std::vector<BilinearRow> out;
  for (auto [b, c] : rows) out.push_back({IntMatrix(0, 1), ivec({b}), c});
  return MibSystem::standard(0, 1, out, {imat({{1}, {-1}}), ivec({5, 5})});
}

// Every leaf is exact: Farkas multipliers, or a root without pieces.
bool leaves_exact(const UnsatNode& n) {
  if (n.children.empty())
    return n.kind == UnsatNode::Kind::Base || n.kind == UnsatNode::Kind::EmptyReal || n.kind == UnsatNode::Kind::Root;
  return std::all_of(n.children.begin(), n.children.end(), [](const ChildLink& l) { return leaves_exact(*l.node); });
}

bool fewer_integer_variables(const UnsatNode& n) {
  for (const ChildLink& l : n.children) {
    if (n.kind != UnsatNode::Kind::Root && l.node->system.m() >= n.system.m()) return false;
    if (!fewer_integer_variables(*l.node)) return false;
  }
  return true;
}

SolveOptions quick() {
  SolveOptions o;
  o.budget = std::chrono::milliseconds(20000);
  return o;
}

}  // namespace

TEST_CASE("solve: x y <= 1 is satisfiable with margin 1 at the origin") {
  GapVerdict v = solve(product_at_most_one(), Rational(1, 2), quick());
  REQUIRE(std::holds_alternative<Sat>(v));
  const Sat& sat = std::get<Sat>(v);
  CHECK(check_assignment(product_at_most_one(), sat.assignment, Rational(1, 2)).kind == SlackCheck::Kind::SatWithSlack);
  CHECK(sat.margin == 1);
}

TEST_CASE("solve: x y <= 1 together with x y >= 2 is refuted") {
  GapVerdict v = solve(product_conflict(), Rational(1, 4), quick());
  REQUIRE(std::holds_alternative<Unsat>(v));
  const UnsatNode& tree = *std::get<Unsat>(v).tree;
  CHECK(verify_unsat(tree, Rational(1, 4)));
  CHECK(fewer_integer_variables(tree));
  CHECK(tree_size(tree) >= 1);
}

TEST_CASE("solve: doubly exponential family with n = 2 needs x2 >= 4") {
  const MibSystem s = doubleexp(2);
  const auto start = std::chrono::steady_clock::now();
  GapVerdict v = solve(s, Rational(1, 8));
  const auto elapsed = std::chrono::steady_clock::now() - start;
  REQUIRE(std::holds_alternative<Sat>(v));
  const Assignment& a = std::get<Sat>(v).assignment;
  CHECK(a.x[0] == 2);
  CHECK(a.x[1] >= 4);
  CHECK(check_assignment(s, a, Rational(1)).kind != SlackCheck::Kind::Violated);
  CHECK(elapsed < std::chrono::seconds(120));
}

TEST_CASE("doubly exponential family: the hand witness has margin 1/8") {
  const MibSystem s = doubleexp(2);
  const Assignment a{ivec({2, 5}), rvec({1, Rational(7, 16), Rational(1, 8)})};
  SlackCheck c = check_assignment(s, a, Rational(1, 16));
  CHECK(c.kind == SlackCheck::Kind::SatWithSlack);
  // Rows: x1 y1 = 7/8, x2 y2 = 5/8, x1 y0 - x2 y1 = -3/16.
  CHECK(c.margin == Rational(1, 8));
}

TEST_CASE("oracle: examples") {
  CHECK(oracle(product_at_most_one(), Rational(1, 2), 3).kind == OracleResult::Kind::SatSlack);
  CHECK(oracle(product_conflict(), Rational(1, 4), 10).kind == OracleResult::Kind::UnsatWithinBound);
  OracleResult r = oracle(doubleexp(2), Rational(1, 8), 8);
  REQUIRE(r.kind == OracleResult::Kind::SatSlack);
  CHECK(r.witness->x == ivec({2, 5}));
}

TEST_CASE("oracle: best margin along the doubly exponential family matches the closed form") {
  // With x1 = 2 the best margin at x2 = t balances 1 - 2 y1 against
  // t y1 - 2 and 1 - t y2, giving 1 - 6 / (t + 2) for t >= 4.
  const MibSystem s = doubleexp(2);
  for (long t = 4; t <= 12; ++t) {
    auto best = best_y(s, ivec({2, t}), Rational(1));
    REQUIRE(best);
    CHECK(best->margin == Rational(1) - Rational(6, t + 2));
  }
  CHECK(!best_y(s, ivec({2, 3}), Rational(1)));
}

TEST_CASE("base_case: linear rows") {
  CHECK(std::holds_alternative<Sat>(base_case(linear_rows({{1, 1}, {-1, 0}}), Rational(1, 4))));
  GapVerdict v = base_case(linear_rows({{1, 0}, {-1, -1}}), Rational(1, 4));
  REQUIRE(std::holds_alternative<Unsat>(v));
  CHECK(std::get<Unsat>(v).tree->kind == UnsatNode::Kind::Base);
  CHECK(verify_unsat(*std::get<Unsat>(v).tree, Rational(1, 4)));
  CHECK_THROWS_AS(base_case(product_at_most_one(), Rational(1, 2)), std::invalid_argument);
}

TEST_CASE("base_case: substituted pieces agree with a direct check") {
  // Rows x1 y <= 1, x2 y - x1 y <= -1 over x1 + x2 = 2, x >= 0.
  const MibSystem s(2, 1, {{imat({{1}, {0}}), ivec({0}), 1}, {imat({{-1}, {1}}), ivec({0}), -1}},
                    {imat({{1, 1}, {-1, -1}, {-1, 0}, {0, -1}}), ivec({2, -2, 0, 0})}, unit_interval());
  for (const StandardPiece& piece : to_standard_form(s)) {
    REQUIRE(piece.system.m() == 0);
    const bool direct = best_y(s, piece.w, Rational(1)).has_value();
    GapVerdict v = base_case(piece.system, Rational(1, 8));
    CHECK(std::holds_alternative<Sat>(v) == direct);
    if (auto* u = std::get_if<Unsat>(&v)) CHECK(verify_unsat(*u->tree, Rational(1, 8)));
  }
}

TEST_CASE("round_point: examples") {
  // 2 x y <= 5 at y = 1: P = [0, 5/2].
  const MibSystem half = MibSystem::standard(1, 1, {{imat({{2}}), ivec({0}), 5}}, unit_interval());
  CHECK(*round_point(half, rvec({1}), 8) == ivec({0}));

  // 1 <= x_i <= 5/2 at y = 1.
  const MibSystem box = MibSystem::standard(
      2, 1,
      {{imat({{-1}, {0}}), ivec({0}), -1}, {imat({{0}, {-1}}), ivec({0}), -1}, {imat({{2}, {0}}), ivec({0}), 5},
       {imat({{0}, {2}}), ivec({0}), 5}},
      unit_interval());
  auto x = round_point(box, rvec({1}), 8);
  REQUIRE(x);
  for (Eigen::Index j = 0; j < 2; ++j) CHECK(((*x)[j] == 1 || (*x)[j] == 2));

  // The x1 = 2 piece of the doubly exponential family at y = (1, 7/16, 1/8).
  const MibSystem piece = to_standard_form(doubleexp(2)).front().system;
  auto r = round_point(piece, rvec({1, Rational(7, 16), Rational(1, 8)}), 64);
  REQUIRE(r);
  CHECK((*r)[0] >= 5);

  // An empty P(y) is never rounded.
  CHECK(!round_point(product_conflict(), rvec({1}), 64));
}

TEST_CASE("split: one variable with kappa2 = 42") {
  const ConstantLedger ledger = compute_constants(reference(), Rational(1, 2));
  REQUIRE(ledger.kappa2 == 42);
  auto kids = split(reference(), ledger);
  // x = 0, then x = b for b = 0..42 along the single primitive direction.
  CHECK(kids.size() == 44);
  CHECK(kids.front().first.kind == BranchEquation::Kind::ZeroComponent);

  // With every u in 1..23 listed, each (u, b) with b / u a nonnegative integer survives.
  std::vector<IntVector> all;
  std::size_t expected = 1;
  for (long u = 1; u <= 23; ++u) {
    all.push_back(ivec({u}));
    expected += 42 / u + 1;
  }
  auto full = split(reference(), all, Rational(42));
  CHECK(full.size() == expected);
  for (const auto& [branch, piece] : full) CHECK(piece.system.m() == 0);
}

TEST_CASE("split: u = (1, 1), b = 2 gives three bases") {
  const MibSystem s = MibSystem::standard(2, 1, {{imat({{1}, {1}}), ivec({0}), 3}}, unit_interval());
  auto kids = split(s, std::vector<IntVector>{ivec({1, 1})}, Rational(2));
  std::set<std::vector<long>> bases;
  for (const auto& [branch, piece] : kids)
    if (branch.kind == BranchEquation::Kind::Hyperplane && branch.b == 2) {
      CHECK(piece.p.cols() == 0);
      bases.insert({static_cast<long>(piece.w[0]), static_cast<long>(piece.w[1])});
    }
  CHECK(bases == std::set<std::vector<long>>{{0, 2}, {1, 1}, {2, 0}});

  auto zero_only = split(s, std::vector<IntVector>{}, Rational(2));
  REQUIRE(zero_only.size() == 2);
  for (const auto& [branch, piece] : zero_only) {
    CHECK(branch.kind == BranchEquation::Kind::ZeroComponent);
    CHECK(piece.system.m() == 1);
  }
}

TEST_CASE("certified y bounds carry exact duals") {
  const MibSystem s = doubleexp(2);
  auto yb = certified_y_bounds(s);
  REQUIRE(yb);
  CHECK(yb->lo == std::vector<Rational>{1, 0, 0});
  CHECK(yb->hi == std::vector<Rational>{1, 1, 1});
  const MibSystem empty = MibSystem::standard(1, 1, {}, {imat({{1}, {-1}}), ivec({0, -1})});
  CHECK(!certified_y_bounds(empty));
  GapVerdict v = solve(empty, Rational(1, 2), quick());
  REQUIRE(std::holds_alternative<Unsat>(v));
  CHECK(std::get<Unsat>(v).tree->kind == UnsatNode::Kind::EmptyReal);
  CHECK(verify_unsat(*std::get<Unsat>(v).tree, Rational(1, 2)));
}

TEST_CASE("solve: rejects unbounded systems and nonpositive eps") {
  CHECK_THROWS_AS(solve(hilbert_unbounded_gadget(parse_equations("x1=x1+x1")), Rational(1, 2)), UnboundedSystem);
  CHECK_THROWS_AS(solve(product_at_most_one(), Rational(0)), std::invalid_argument);
}

TEST_CASE("Hilbert gadget: x1 = x1 + x1 is refuted, x1 = x1 * x1 is never refuted") {
  const MibSystem sum = hilbert_gadget(parse_equations("x1=x1+x1"));
  GapVerdict v = solve(sum, Rational(1, 2), quick());
  REQUIRE(std::holds_alternative<Unsat>(v));
  CHECK(verify_unsat(*std::get<Unsat>(v).tree, Rational(1, 2)));

  const MibSystem prod = hilbert_gadget(parse_equations("x1 = x1 * x1"));
  CHECK(check_assignment(prod, {ivec({1, 1}), rvec({1})}, Rational(1)).kind == SlackCheck::Kind::SatNoSlack);
  GapVerdict w = solve(prod, Rational(1, 2), quick());
  CHECK(!std::holds_alternative<Unsat>(w));
}

TEST_CASE("parse_equations rejects malformed input") {
  CHECK(parse_equations("x1=x2+x3; x2 = x1*x1").size() == 2);
  CHECK_THROWS_AS(parse_equations("x1=x2-x3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_equations("x0=x1+x1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_equations(""), std::invalid_argument);
}

TEST_CASE("property: random instances against the oracle") {
  std::size_t sat = 0, unsat = 0, unknown = 0, captured = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const RandomSpec spec{seed, static_cast<Eigen::Index>(1 + seed % 2), static_cast<Eigen::Index>(1 + seed % 3 / 2), 2};
    const MibSystem s = random_bounded(spec);
    const Rational eps(1, 2);
    SolveOptions opt = quick();
    opt.budget = std::chrono::milliseconds(10000);
    opt.on_relaxed_refuted = [&](const MibSystem& node, const ConstantLedger& ledger) {
      // Every slack-eps point of the node has a zero component or a short |u^T x|.
      OracleResult r = oracle(node, eps, 12, 20000);
      if (r.kind != OracleResult::Kind::SatSlack) return;
      const IntVector& x = r.witness->x;
      bool ok = (x.array() == 0).any();
      for (const IntVector& u : ledger.u) ok = ok || Rational(abs(Integer(u.dot(x)))) <= ledger.kappa2;
      CHECK(ok);
      ++captured;
    };
    GapVerdict v = solve(s, eps, opt);
    OracleResult ref = oracle(s, eps, 12);
    CAPTURE(seed);
    if (auto* a = std::get_if<Sat>(&v)) {
      ++sat;
      CHECK(check_assignment(s, a->assignment, Rational(1)).kind != SlackCheck::Kind::Violated);
      if (s.form() == Form::General && ref.complete) CHECK(ref.kind != OracleResult::Kind::UnsatWithinBound);
    } else if (auto* u = std::get_if<Unsat>(&v)) {
      ++unsat;
      CHECK(ref.kind != OracleResult::Kind::SatSlack);
      CHECK(verify_unsat(*u->tree, eps));
      CHECK(fewer_integer_variables(*u->tree));
      CHECK(leaves_exact(*u->tree));
    } else {
      ++unknown;
    }
  }
  MESSAGE("sat " << sat << ", unsat " << unsat << ", unknown " << unknown << ", capture checks " << captured);
  CHECK(unknown <= 8);
}

TEST_CASE("property: solve is deterministic") {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    const MibSystem s = random_bounded({seed, 2, 1, 2});
    GapVerdict a = solve(s, Rational(1, 2), quick());
    GapVerdict b = solve(s, Rational(1, 2), quick());
    REQUIRE(a.index() == b.index());
    if (auto* sa = std::get_if<Sat>(&a)) {
      CHECK(sa->assignment.x == std::get<Sat>(b).assignment.x);
      CHECK(sa->assignment.y == std::get<Sat>(b).assignment.y);
    }
    if (auto* ua = std::get_if<Unsat>(&a)) CHECK(tree_size(*ua->tree) == tree_size(*std::get<Unsat>(b).tree));
  }
}
