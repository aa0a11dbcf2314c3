#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mibgap/mib.hpp"
#include "mibgap/semilinear.hpp"

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

RatVector rvec(std::initializer_list<Rational> v) {
  RatVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const Rational& x : v) out[i++] = x;
  return out;
}

// x*y <= 1, 0 <= y <= 1.
MibSystem xy_le_one() {
  return MibSystem::standard(1, 1, {{imat({{1}}), ivec({0}), 1}}, {imat({{1}, {-1}}), ivec({1, 0})});
}

Integer naive_height(const MibSystem& s) {
  Integer h = 0;
  auto scan = [&](const IntMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      Integer v = m.data()[i];
      if (v < 0) v = -v;
      if (v > h) h = v;
    }
  };
  for (const BilinearRow& r : s.rows()) {
    scan(r.a);
    scan(r.b);
    scan(IntMatrix::Constant(1, 1, r.c));
  }
  scan(s.integer_block().matrix);
  scan(s.integer_block().rhs);
  scan(s.real_block().matrix);
  scan(s.real_block().rhs);
  return h;
}

}  // namespace

TEST_CASE("check_assignment on x*y <= 1") {
  const MibSystem s = xy_le_one();
  SlackCheck a = check_assignment(s, {ivec({1}), rvec({1})}, Rational(1, 2));
  CHECK(a.kind == SlackCheck::Kind::SatNoSlack);
  CHECK(a.margin == 0);
  SlackCheck b = check_assignment(s, {ivec({1}), rvec({Rational(1, 4)})}, Rational(1, 2));
  CHECK(b.kind == SlackCheck::Kind::SatWithSlack);
  CHECK(b.margin == Rational(3, 4));
  SlackCheck c = check_assignment(s, {ivec({2}), rvec({1})}, Rational(1, 2));
  CHECK(c.kind == SlackCheck::Kind::Violated);
  CHECK(c.violated_block == Block::Bilinear);
  CHECK(c.violated_row == 0);
}

TEST_CASE("check_assignment: linear rows never need slack; errors") {
  const MibSystem s = xy_le_one();
  SlackCheck out = check_assignment(s, {ivec({0}), rvec({1})}, Rational(1, 2));
  CHECK(out.kind == SlackCheck::Kind::SatWithSlack);
  CHECK(check_assignment(s, {ivec({-1}), rvec({0})}, 1).violated_block == Block::IntegerLinear);
  CHECK(check_assignment(s, {ivec({0}), rvec({2})}, 1).violated_block == Block::RealLinear);
  CHECK_THROWS_AS(check_assignment(s, {ivec({0, 1}), rvec({0})}, 1), DimensionMismatch);
  CHECK_THROWS(check_assignment(s, {ivec({0}), rvec({0})}, 0));
}

TEST_CASE("check_assignment is monotone in eps") {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> xs(0, 3), num(0, 8), den(1, 8);
  const MibSystem s = xy_le_one();
  for (int k = 0; k < 100; ++k) {
    Assignment a{ivec({xs(rng)}), rvec({Rational(num(rng), den(rng))})};
    const Rational eps(num(rng) + 1, den(rng));
    if (check_assignment(s, a, eps).kind != SlackCheck::Kind::SatWithSlack) continue;
    for (int d = 2; d < 6; ++d) CHECK(check_assignment(s, a, eps / d).kind == SlackCheck::Kind::SatWithSlack);
  }
}

TEST_CASE("height matches a naive rescan") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> coef(-9, 9);
  for (int k = 0; k < 30; ++k) {
    BilinearRow r{imat({{coef(rng), coef(rng)}}), ivec({coef(rng), coef(rng)}), coef(rng)};
    MibSystem s(1, 2, {r}, {imat({{coef(rng)}}), ivec({coef(rng)})},
                {imat({{coef(rng), coef(rng)}}), ivec({coef(rng)})});
    CHECK(s.height() == naive_height(s));
  }
}

TEST_CASE("is_bounded and kappa1") {
  Boundedness b = is_bounded(xy_le_one());
  REQUIRE(std::holds_alternative<BoundedY>(b));
  CHECK(std::get<BoundedY>(b).kappa1_upper == 1);
  CHECK(kappa1_formula(1, 1) == 1);
  CHECK(kappa1_formula(2, 3) == 1094);

  MibSystem ray = MibSystem::standard(1, 1, {{imat({{1}}), ivec({0}), 1}}, {imat({{-1}}), ivec({0})});
  Boundedness u = is_bounded(ray);
  REQUIRE(std::holds_alternative<UnboundedY>(u));
  CHECK(std::get<UnboundedY>(u).ray == rvec({1}));
}

TEST_CASE("is_bounded: m=2, H=3 system") {
  MibSystem s = MibSystem::standard(2, 1, {{imat({{3}, {1}}), ivec({0}), 2}}, {imat({{1}, {-1}}), ivec({1, 0})});
  REQUIRE(s.height() == 3);
  CHECK(std::get<BoundedY>(is_bounded(s)).kappa1_upper == 1094);
}

TEST_CASE("is_bounded: LP radius can exceed the formula") {
  // 0 <= y <= 5 with m = 1, H = 5: formula gives 5, LP radius 5.
  MibSystem s = MibSystem::standard(1, 2, {{imat({{1, 0}}), ivec({0, 0}), 1}},
                                    {imat({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), ivec({5, 0, 5, 0})});
  const Rational k1 = std::get<BoundedY>(is_bounded(s)).kappa1_upper;
  CHECK(k1 * k1 >= 50);
  CHECK(k1 >= kappa1_formula(1, 5));
}

TEST_CASE("to_standard_form: already standard") {
  const MibSystem s = xy_le_one();
  auto pieces = to_standard_form(s);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].system == s);
}

TEST_CASE("to_standard_form: x >= 2") {
  MibSystem s(1, 1, {{imat({{1}}), ivec({0}), 3}}, {imat({{-1}}), ivec({-2})}, {imat({{1}, {-1}}), ivec({1, 0})});
  CHECK(s.form() == Form::General);
  auto pieces = to_standard_form(s);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].w == ivec({2}));
  CHECK(pieces[0].p == imat({{1}}));
  CHECK(pieces[0].system.form() == Form::Standard);
  CHECK(pieces[0].system.rows()[0].b == ivec({2}));
}

TEST_CASE("to_standard_form: x1 + x2 = 2 gives three zero-variable systems") {
  MibSystem s(2, 1, {{imat({{1}, {1}}), ivec({0}), 3}},
              {imat({{1, 1}, {-1, -1}, {-1, 0}, {0, -1}}), ivec({2, -2, 0, 0})}, {imat({{1}, {-1}}), ivec({1, 0})});
  auto pieces = to_standard_form(s);
  REQUIRE(pieces.size() == 3);
  for (const StandardPiece& p : pieces) {
    CHECK(p.system.m() == 0);
    CHECK(p.system.form() == Form::Standard);
  }
}

TEST_CASE("to_standard_form: unpointed input is rejected") {
  MibSystem s(2, 1, {{imat({{1}, {1}}), ivec({0}), 3}}, {imat({{1, 1}}), ivec({2})}, {imat({{1}, {-1}}), ivec({1, 0})});
  CHECK_THROWS_AS(to_standard_form(s), Unpointed);
}

TEST_CASE("to_standard_form: round trip keeps every margin") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> coef(-3, 3), num(0, 6);
  for (int trial = 0; trial < 25; ++trial) {
    BilinearRow r1{imat({{coef(rng)}, {coef(rng)}}), ivec({0}), coef(rng) + 4};
    BilinearRow r2{imat({{coef(rng)}, {coef(rng)}}), ivec({0}), coef(rng) + 4};
    MibSystem s(2, 1, {r1, r2},
                {imat({{coef(rng), coef(rng)}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}}), ivec({coef(rng), 0, 0, 6, 6})},
                {imat({{1}, {-1}}), ivec({1, 0})});
    for (const StandardPiece& piece : to_standard_form(s)) {
      for (int k = 0; k < 4; ++k) {
        IntVector z(piece.system.m());
        for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = num(rng) % 3;
        RatVector y = rvec({Rational(num(rng), 6)});
        Assignment lifted = lift(piece, {z, y});
        if (check_assignment(s, lifted, 1).violated_block == Block::IntegerLinear &&
            check_assignment(s, lifted, 1).kind == SlackCheck::Kind::Violated)
          continue;  // the box bound x <= 6 is not part of the piece parametrization
        for (std::size_t i = 0; i < s.rows().size(); ++i)
          CHECK(piece.system.bilinear_value(i, z, y) == s.bilinear_value(i, lifted.x, y));
      }
    }
  }
}

TEST_CASE("without_duplicate_rows") {
  MibSystem s = MibSystem::standard(1, 1, {{imat({{1}}), ivec({0}), 1}, {imat({{1}}), ivec({0}), 1}},
                                    {imat({{1}, {1}, {-1}}), ivec({1, 1, 0})});
  MibSystem t = without_duplicate_rows(s);
  CHECK(t.rows().size() == 1);
  CHECK(t.real_block().matrix.rows() == 2);
}
