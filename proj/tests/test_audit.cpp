#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "audit.hpp"
#include "mibgap/generators.hpp"
#include "mibgap/io.hpp"

using namespace mibgap;
using io::Json;

namespace {

struct Case {
  MibSystem system;
  GapVerdict verdict;
};

std::vector<Case> solved(std::size_t want_unsat) {
  std::vector<Case> out;
  std::size_t unsat = 0;
  std::vector<MibSystem> systems{hilbert_gadget(parse_equations("x1 = x1 + x1"))};
  for (std::uint64_t seed = 0; seed < 400 && unsat < want_unsat; ++seed) {
    const MibSystem s = random_bounded({seed, 1 + static_cast<Eigen::Index>(seed % 3), 1 + static_cast<Eigen::Index>(seed / 3 % 3), 3});
    systems.push_back(s);
    SolveOptions o;
    o.budget = std::chrono::milliseconds(3000);
    GapVerdict v = solve(s, Rational(1, 2), o);
    if (std::holds_alternative<Unsat>(v)) ++unsat;
    out.push_back({s, std::move(v)});
  }
  SolveOptions o;
  out.push_back({systems[0], solve(systems[0], Rational(1, 2), o)});
  return out;
}

const std::vector<Case>& corpus() {
  static const std::vector<Case> c = solved(12);
  return c;
}

}  // namespace

TEST_CASE("every solver artifact passes the independent checker") {
  std::size_t sat = 0, unsat = 0;
  for (const Case& c : corpus()) {
    const Json instance = io::to_json(c.system);
    if (const auto* s = std::get_if<Sat>(&c.verdict)) {
      ++sat;
      const audit::Verdict v = audit::check(instance, io::witness_to_json(s->assignment));
      CHECK_MESSAGE(v.ok, v.message);
    } else if (const auto* u = std::get_if<Unsat>(&c.verdict)) {
      ++unsat;
      const audit::Verdict v = audit::check(instance, io::refutation_to_json(*u->tree, Rational(1, 2)));
      CHECK_MESSAGE(v.ok, v.message);
    }
  }
  CHECK(sat >= 20);
  CHECK(unsat >= 10);
}

TEST_CASE("tampered refutations are rejected") {
  std::size_t tampered = 0;
  for (const Case& c : corpus()) {
    const auto* u = std::get_if<Unsat>(&c.verdict);
    if (!u) continue;
    const Json instance = io::to_json(c.system);
    const Json good = io::refutation_to_json(*u->tree, Rational(1, 2));
    const Json& nodes = good.at("nodes");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Json& n = nodes[k];
      Json bad = good;
      Json& b = bad["nodes"][k];
      if (n.contains("farkas") && !n["farkas"].empty()) {
        // A negative multiplier is never allowed.
        for (auto& f : b["farkas"])
          if (f != "0") {
            f = "-1";
            break;
          }
        CHECK(!audit::check(instance, bad).ok);
        ++tampered;
      } else if (n.contains("ybounds") && !n["ybounds"]["hi"].empty()) {
        const Rational hi = io::rational_from(n["ybounds"]["hi"][0]);
        b["ybounds"]["hi"][0] = io::to_json(Rational(hi - 1));
        CHECK(!audit::check(instance, bad).ok);
        ++tampered;
      }
      if (!n["children"].empty()) {
        Json dropped = good;
        dropped["nodes"][k]["children"].erase(0);
        if (n["kind"] != "root") CHECK(!audit::check(instance, dropped).ok);
      }
    }
    Json wrong_instance = instance;
    wrong_instance["rows"][0]["c"] = io::to_json(Integer(io::integer_from(instance["rows"][0]["c"]) + 1));
    CHECK(!audit::check(wrong_instance, good).ok);
  }
  CHECK(tampered >= 10);
}

TEST_CASE("real certificates: a forged interval leaf is rejected") {
  for (const Case& c : corpus()) {
    const auto* u = std::get_if<Unsat>(&c.verdict);
    if (!u) continue;
    Json good = io::refutation_to_json(*u->tree, Rational(1, 2));
    for (Json& n : good["nodes"]) {
      if (!n.contains("real_certificate")) continue;
      const Json saved = n["real_certificate"];
      // The real block rows alone never refute a nonempty y box.
      const std::size_t rows = n["system"]["rows"].size();
      n["real_certificate"] = {{"interval", rows}};
      CHECK(!audit::check(io::to_json(c.system), good).ok);
      n["real_certificate"] = saved;
      return;
    }
  }
}

TEST_CASE("witness checks") {
  const MibSystem s = doubleexp(2);
  const Json instance = io::to_json(s);
  IntVector x(2);
  x << 2, 5;
  RatVector y(3);
  y << 1, Rational(7, 16), Rational(1, 8);
  CHECK(audit::check(instance, io::witness_to_json({x, y})).ok);
  y[1] = Rational(1, 4);
  CHECK(!audit::check(instance, io::witness_to_json({x, y})).ok);
  y[1] = Rational(1, 2);
  x[1] = 4;
  CHECK(audit::check(instance, io::witness_to_json({x, y})).ok);
  x[0] = 1;
  CHECK(!audit::check(instance, io::witness_to_json({x, y})).ok);
  Json bad = io::witness_to_json({x, y});
  bad["y"].erase(0);
  const audit::Verdict v = audit::check(instance, bad);
  CHECK(!v.ok);
  CHECK(v.message.rfind("malformed", 0) == 0);
}
