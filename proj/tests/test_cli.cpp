#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = MIBGAP_DATA_DIR;
const std::string cli = MIBGAP_CLI;

struct Run {
  int code;
  std::string out;
  Json json() const { return Json::parse(out); }
};

Run run(const std::string& args) {
  const std::string cmd = cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const char* name) { return (data_dir / name).string(); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mibgap_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("solve: trivial satisfiable and unsatisfiable instances") {
  const Run sat = run("solve " + data("trivial_sat.json"));
  CHECK(sat.code == 0);
  CHECK(sat.json()["verdict"] == "sat");
  CHECK(sat.json()["witness"]["kind"] == "witness");
  write(scratch("sat.json"), sat.out);
  CHECK(run("check " + data("trivial_sat.json") + " " + scratch("sat.json").string()).code == 0);

  const Run unsat = run("solve " + data("trivial_unsat.json") + " --certificates");
  CHECK(unsat.code == 1);
  CHECK(unsat.json()["verdict"] == "unsat");
  CHECK(unsat.json()["refutation"]["kind"] == "refutation");
  write(scratch("unsat.json"), unsat.out);
  CHECK(run("check " + data("trivial_unsat.json") + " " + scratch("unsat.json").string()).code == 0);
  // The same refutation does not prove the satisfiable instance.
  CHECK(run("check " + data("trivial_sat.json") + " " + scratch("unsat.json").string()).code == 1);
}

TEST_CASE("solve: doubly exponential family, n = 2 at eps 1/8") {
  const Run r = run("solve " + data("doubleexp2.json") + " --epsilon 1/8 --budget-ms 120000");
  REQUIRE(r.code == 0);
  const Json x = r.json()["witness"]["x"];
  CHECK(std::stol(x[1].get<std::string>()) >= 4);
  write(scratch("de2.json"), r.out);
  CHECK(run("check " + data("doubleexp2.json") + " " + scratch("de2.json").string()).code == 0);
}

TEST_CASE("check: golden witness passes, perturbed witness fails") {
  CHECK(run("check " + data("doubleexp2.json") + " " + data("doubleexp2_witness.json")).code == 0);
  Json w = Json::parse(slurp(data("doubleexp2_witness.json")));
  w["x"][0] = "3";
  write(scratch("perturbed.json"), w.dump());
  const Run r = run("check " + data("doubleexp2.json") + " " + scratch("perturbed.json").string());
  CHECK(r.code == 1);
  CHECK(r.json()["ok"] == false);
  w["x"][0] = "two";
  write(scratch("garbled.json"), w.dump());
  CHECK(run("check " + data("doubleexp2.json") + " " + scratch("garbled.json").string()).code == 3);
}

TEST_CASE("gen: Hilbert gadgets") {
  const Run sum = run("gen hilbert --equations \"x1 = x1 + x1\"");
  REQUIRE(sum.code == 0);
  CHECK(sum.out == slurp(data("hilbert_sum.json")));
  const Run square = run("gen hilbert --equations \"x1 = x1 * x1\"");
  CHECK(square.out == slurp(data("hilbert_square.json")));

  const Run refuted = run("solve " + data("hilbert_sum.json") + " --budget-ms 120000 --certificates");
  CHECK(refuted.code == 1);
  write(scratch("hsum.json"), refuted.out);
  CHECK(run("check " + data("hilbert_sum.json") + " " + scratch("hsum.json").string()).code == 0);

  const Run never = run("solve " + data("hilbert_square.json") + " --budget-ms 30000");
  CHECK(never.code != 1);
  CHECK(never.code != 3);

  CHECK(run("gen hilbert --equations \"x1 = x2 - x3\"").code == 3);
  CHECK(run("gen hilbert-unbounded --equations \"x1 = x1 * x1\"").code == 0);
  CHECK(run("gen nonsense").code == 3);
}

TEST_CASE("gen: doubly exponential family, n = 3 needs x3 >= 16") {
  const Run g = run("gen doubleexp --n 3 --out " + scratch("de3.json").string());
  REQUIRE(g.code == 0);
  CHECK(run("oracle " + scratch("de3.json").string() + " --epsilon 1/1000 --xbound 15").code == 1);
  const Run found = run("oracle " + scratch("de3.json").string() + " --epsilon 1/1000 --xbound 16");
  CHECK(found.code == 0);
  CHECK(found.json()["witness"]["x"][2] == "16");
}

TEST_CASE("gen and solve are deterministic") {
  CHECK(run("gen random --seed 5 --m 2 --n 2").out == run("gen random --seed 5 --m 2 --n 2").out);
  CHECK(run("solve " + data("trivial_unsat.json") + " --certificates").out ==
        run("solve " + data("trivial_unsat.json") + " --certificates").out);
}

TEST_CASE("solve --explain dumps the constant ledger") {
  const Json r = run("solve " + data("reference.json") + " --epsilon 1/2 --explain").json();
  const Json& l = r["ledger"];
  CHECK(l["kappa1_upper"] == "4");
  CHECK(l["r"] == "1/32");
  CHECK(l["u_size"] == 23);
  CHECK(l["kappa2"] == "42");
  CHECK(l["kappa3"] == "4");
}

TEST_CASE("dominate: the example automaton") {
  const std::string fig = data("example_mpta_negated.json");
  const Run yes = run("dominate " + fig + " --gamma=-3/4,-7/4 --epsilon 1/4 --enumerate 7,3");
  REQUIRE(yes.code == 0);
  CHECK(yes.json()["verdict"] == "dominated");
  CHECK(yes.json()["domination"]["runs"].size() == 3);
  write(scratch("dom.json"), yes.out);
  CHECK(run("check " + fig + " " + scratch("dom.json").string()).code == 0);
  // Against gamma - eps = (-2, -3) the same payload fails.
  Json tampered = yes.json();
  tampered["domination"]["gamma"] = {"-7/4", "-11/4"};
  write(scratch("dom_bad.json"), tampered.dump());
  CHECK(run("check " + fig + " " + scratch("dom_bad.json").string()).code == 1);

  CHECK(run("dominate " + fig + " --gamma=-5/4,-9/4 --epsilon 1/4 --enumerate 7,3").code == 2);
  CHECK(run("dominate " + fig + " --gamma=1 --epsilon 1/4 --enumerate 7,3").code == 3);
  CHECK(run("dominate " + fig + " --gamma=1,1 --epsilon 1/4").code == 3);
}

TEST_CASE("dominate: pieces files") {
  const std::string fig = data("example_mpta_negated.json");
  // S = {(-1, -2)} exactly: dominated at (-3/4, -7/4), not at (-5/4, -9/4).
  Json p{{"kind", "pieces"}, {"dim", 2}, {"exact", true}, {"pieces", {{{"base", {"-1", "-2"}}, {"periods", {Json::array(), Json::array()}}}}}};
  write(scratch("pieces.json"), p.dump());
  const std::string file = scratch("pieces.json").string();
  CHECK(run("dominate " + fig + " --gamma=-3/4,-7/4 --epsilon 1/4 --pieces " + file).code == 0);
  CHECK(run("dominate " + fig + " --gamma=-5/4,-9/4 --epsilon 1/4 --pieces " + file).code == 1);
  p["exact"] = false;
  write(scratch("pieces.json"), p.dump());
  CHECK(run("dominate " + fig + " --gamma=-5/4,-9/4 --epsilon 1/4 --pieces " + file).code == 2);
  p["dim"] = 3;
  write(scratch("pieces.json"), p.dump());
  CHECK(run("dominate " + fig + " --gamma=-5/4,-9/4 --epsilon 1/4 --pieces " + file).code == 3);
}

TEST_CASE("usage and parse errors exit 3 with a JSON diagnostic") {
  const Run missing = run("solve /nonexistent.json");
  CHECK(missing.code == 3);
  CHECK(missing.json()["kind"] == "error");
  CHECK(run("solve " + data("trivial_sat.json") + " --epsilon 0").code == 3);
  CHECK(run("solve " + data("trivial_sat.json") + " --epsilon x").code == 3);
  write(scratch("broken.json"), "{\"kind\": \"mib\", ");
  CHECK(run("solve " + scratch("broken.json").string()).code == 3);
  CHECK(run("solve " + data("example_mpta.json")).code == 3);
  CHECK(run("frobnicate").code == 3);
  CHECK(run("").code == 3);
}

TEST_CASE("MIBGAP_THREADS is accepted as the thread count") {
  const std::string cmd = "MIBGAP_THREADS=2 " + cli + " solve " + data("trivial_sat.json") + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 0);
}
