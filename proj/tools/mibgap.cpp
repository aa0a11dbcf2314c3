// mibgap: command-line front end.
//
// Exit codes: 0 SAT / dominated / check passed, 1 UNSAT / not dominated /
// check failed, 2 UNKNOWN, 3 usage or input error.

#include "audit.hpp"
#include "mibgap/generators.hpp"
#include "mibgap/io.hpp"
#include "mibgap/oracle.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace mibgap;
using io::Json;

namespace {

constexpr int kSat = 0, kUnsat = 1, kUnknown = 2, kError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw UsageError("cannot write '" + out_path + "'");
    out << text;
  }
}

Rational positive_rational(const std::string& text, const char* what) {
  Rational q;
  try {
    q = parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
  if (q <= 0) throw UsageError(std::string(what) + " must be positive");
  return q;
}

RatVector rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    try {
      out.push_back(parse_rational(text.substr(start, end - start)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--gamma: ") + e.what());
    }
    start = end + 1;
  }
  return from_std(out);
}

unsigned thread_count(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("MIBGAP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

Json stats_json(const SolveStats& s) {
  return {{"nodes", s.nodes},
          {"kernel_calls", s.kernel_calls},
          {"relaxations_refuted", s.relaxations_refuted},
          {"roundings", s.roundings},
          {"fallback_points", s.fallback_points}};
}

std::size_t depth(const UnsatNode& n) {
  std::size_t d = 0;
  for (const ChildLink& c : n.children) d = std::max(d, depth(*c.node));
  return d + 1;
}

// solve -------------------------------------------------------------------

struct SolveArgs {
  std::string file, out, epsilon = "1/2";
  long budget_ms = 60000;
  std::size_t max_nodes = 20000;
  int threads = 0;
  bool explain = false, certificates = false;
};

int cmd_solve(const SolveArgs& a) {
  const MibSystem s = io::mib_from_json(io::read_file(a.file));
  const Rational eps = positive_rational(a.epsilon, "--epsilon");
  if (a.budget_ms <= 0) throw UsageError("--budget-ms must be positive");
  SolveOptions o;
  o.budget = std::chrono::milliseconds(a.budget_ms);
  o.max_nodes = a.max_nodes;
  o.threads = thread_count(a.threads);
  SolveStats stats;
  GapVerdict v;
  try {
    v = solve(s, eps, o, &stats);
  } catch (const UnboundedSystem& e) {
    throw UsageError(std::string("system is not bounded: ") + e.what());
  }
  Json report{{"kind", "report"}, {"command", "solve"}, {"eps", io::to_json(eps)}, {"stats", stats_json(stats)}};
  if (a.explain) report["ledger"] = io::to_json(stats.root_ledger ? *stats.root_ledger : compute_constants(s, eps, o.ledger));
  int code = kUnknown;
  if (const auto* sat = std::get_if<Sat>(&v)) {
    report["verdict"] = "sat";
    report["witness"] = io::witness_to_json(sat->assignment);
    report["margin"] = io::to_json(sat->margin);
    code = kSat;
  } else if (const auto* unsat = std::get_if<Unsat>(&v)) {
    report["verdict"] = "unsat";
    report["tree"] = {{"nodes", tree_size(*unsat->tree)}, {"depth", depth(*unsat->tree)}};
    if (a.certificates) report["refutation"] = io::refutation_to_json(*unsat->tree, eps);
    code = kUnsat;
  } else {
    report["verdict"] = "unknown";
    report["reason"] = std::get<Unknown>(v).reason;
  }
  emit(report, a.out);
  return code;
}

// dominate ----------------------------------------------------------------

struct DominateArgs {
  std::string file, out, gamma, epsilon = "1/4", pieces, enumerate;
  long budget_ms = 60000;
  int threads = 0;
};

std::pair<std::size_t, Integer> enumerate_bounds(const std::string& text) {
  const std::size_t comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("expected steps,time");
    const Integer steps = parse_integer(text.substr(0, comma));
    const Integer time = parse_integer(text.substr(comma + 1));
    if (steps < 0 || time < 0 || steps > 64) throw std::invalid_argument("steps must be in [0, 64] and time nonnegative");
    return {static_cast<std::size_t>(steps), time};
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--enumerate: ") + e.what());
  }
}

// (d + 1)-fold products of pieces of a set in Z^d, as linear sets in the
// master space.
std::vector<LinearSet> tuple_pieces(const std::vector<LinearSet>& pieces, std::size_t d) {
  std::vector<LinearSet> out;
  if (pieces.empty()) return out;
  std::vector<std::size_t> idx(d + 1, 0);
  while (true) {
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::Index k = 0;
    for (std::size_t i : idx) k += pieces[i].period_count();
    LinearSet t{IntVector((dd + 1) * dd), IntMatrix::Zero((dd + 1) * dd, k)};
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j <= dd; ++j) {
      const LinearSet& p = pieces[idx[static_cast<std::size_t>(j)]];
      t.base.segment(j * dd, dd) = p.base;
      t.periods.block(j * dd, col, dd, p.period_count()) = p.periods;
      col += p.period_count();
    }
    out.push_back(std::move(t));
    std::size_t i = d + 1;
    while (i > 0 && idx[i - 1] + 1 == pieces.size()) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j <= d; ++j) idx[j] = idx[i - 1];
  }
  return out;
}

int cmd_dominate(const DominateArgs& a) {
  const Json automaton_json = io::read_file(a.file);
  const Mpta automaton = io::mpta_from_json(automaton_json);
  const std::size_t d = automaton.observers.size();
  DominationQuery q;
  q.gamma = rational_list(a.gamma);
  if (q.gamma.size() != static_cast<Eigen::Index>(d))
    throw UsageError("--gamma has " + std::to_string(q.gamma.size()) + " entries, the automaton has " +
                     std::to_string(d) + " observers");
  q.eps = positive_rational(a.epsilon, "--epsilon");
  if (a.pieces.empty() == a.enumerate.empty()) throw UsageError("give exactly one of --pieces and --enumerate");
  std::pair<std::size_t, Integer> decode_bounds{8, 8};
  if (!a.enumerate.empty()) {
    decode_bounds = enumerate_bounds(a.enumerate);
    q.pieces = run_pieces(integer_runs(automaton, decode_bounds.first, decode_bounds.second), d);
    q.exact = false;
  } else {
    const io::PieceFile f = io::pieces_from_json(io::read_file(a.pieces));
    const auto dd = static_cast<Eigen::Index>(d);
    if (f.dim == dd) q.pieces = tuple_pieces(f.pieces, d);
    else if (f.dim == (dd + 1) * dd) q.pieces = f.pieces;
    else throw UsageError("pieces have dimension " + std::to_string(f.dim) + ", expected d or (d + 1) d");
    q.exact = f.exact;
  }
  if (a.budget_ms <= 0) throw UsageError("--budget-ms must be positive");
  SolveOptions o;
  o.budget = std::chrono::milliseconds(a.budget_ms);
  o.threads = thread_count(a.threads);
  const DominationVerdict v = gap_dominate(automaton, q, o);
  Json report{{"kind", "report"}, {"command", "dominate"}, {"pieces", q.pieces.size()}, {"exact", q.exact}};
  int code = kUnknown;
  if (const auto* w = std::get_if<Dominated>(&v)) {
    Json dom = io::to_json(*w);
    dom["kind"] = "domination";
    dom["gamma"] = io::to_json(q.gamma);
    dom["eps"] = io::to_json(q.eps);
    Json runs = Json::array();
    for (const IntVector& vertex : w->vertices) {
      const auto run = find_integer_run(automaton, to_std(vertex), decode_bounds.first, decode_bounds.second);
      if (!run) {
        runs = nullptr;
        break;
      }
      Json delays = Json::array();
      for (const Integer& t : run->delays) delays.push_back(io::to_json(t));
      runs.push_back({{"edges", run->edges}, {"delays", delays}});
    }
    dom["runs"] = runs;
    report["verdict"] = "dominated";
    report["domination"] = dom;
    code = kSat;
  } else if (std::holds_alternative<NotDominated>(v)) {
    report["verdict"] = "not_dominated";
    code = kUnsat;
  } else {
    report["verdict"] = "unknown";
    report["reason"] = std::get<DominationUnknown>(v).reason;
  }
  emit(report, a.out);
  return code;
}

// oracle ------------------------------------------------------------------

int cmd_oracle(const std::string& file, const std::string& epsilon, long xbound, const std::string& out) {
  const MibSystem s = io::mib_from_json(io::read_file(file));
  const Rational eps = positive_rational(epsilon, "--epsilon");
  if (xbound < 0) throw UsageError("--xbound must be nonnegative");
  const OracleResult r = oracle(s, eps, Integer(xbound));
  Json report{{"kind", "report"}, {"command", "oracle"}, {"eps", io::to_json(eps)}, {"xbound", xbound}, {"points", r.points}};
  int code = kUnsat;
  switch (r.kind) {
    case OracleResult::Kind::SatSlack: report["verdict"] = "sat_slack", code = kSat; break;
    case OracleResult::Kind::SatNoSlack: report["verdict"] = "sat_no_slack", code = kSat; break;
    case OracleResult::Kind::UnsatWithinBound: report["verdict"] = "unsat_within_bound"; break;
  }
  if (r.witness) {
    report["witness"] = io::witness_to_json(*r.witness);
    report["margin"] = io::to_json(r.margin);
  }
  emit(report, out);
  return code;
}

// gen ---------------------------------------------------------------------

struct GenArgs {
  std::string kind, equations, out;
  long n = 2, m = 2, height = 3;
  std::uint64_t seed = 0;
};

int cmd_gen(const GenArgs& a) {
  MibSystem s;
  try {
    if (a.kind == "hilbert") s = hilbert_gadget(parse_equations(a.equations));
    else if (a.kind == "hilbert-unbounded") s = hilbert_unbounded_gadget(parse_equations(a.equations));
    else if (a.kind == "doubleexp") {
      if (a.n < 1) throw std::invalid_argument("doubleexp: --n must be at least 1");
      s = doubleexp(static_cast<std::size_t>(a.n));
    } else if (a.kind == "random") s = random_bounded({a.seed, a.m, a.n, a.height});
    else throw std::invalid_argument("unknown generator '" + a.kind + "'");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit(io::to_json(s), a.out);
  return kSat;
}

// check -------------------------------------------------------------------

int cmd_check(const std::string& instance_file, const std::string& artifact_file) {
  const Json instance = io::read_file(instance_file);
  Json artifact = io::read_file(artifact_file);
  if (artifact.is_object() && artifact.value("kind", "") == "report") {
    for (const char* key : {"witness", "refutation", "domination"})
      if (artifact.contains(key)) {
        artifact = artifact.at(key);
        break;
      }
    if (artifact.value("kind", "") == "report") throw UsageError("report carries no checkable artifact");
  }
  const audit::Verdict v = audit::check(instance, artifact);
  if (v.message.rfind("malformed", 0) == 0) throw UsageError(v.message);
  std::cout << Json{{"kind", "check"}, {"ok", v.ok}, {"message", v.message}}.dump(2) << "\n";
  return v.ok ? kSat : kUnsat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap satisfiability for bounded mixed integer bilinear systems"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Decide an MIB instance up to the slack gap");
  solve_cmd->add_option("file", sa.file, "Instance (JSON)")->required();
  solve_cmd->add_option("--epsilon", sa.epsilon, "Slack gap p/q")->capture_default_str();
  solve_cmd->add_option("--budget-ms", sa.budget_ms, "Wall-clock budget")->capture_default_str();
  solve_cmd->add_option("--max-nodes", sa.max_nodes, "Recursion node cap")->capture_default_str();
  solve_cmd->add_option("--threads", sa.threads, "Worker threads (default MIBGAP_THREADS or 1)");
  solve_cmd->add_flag("--explain", sa.explain, "Include the constant ledger");
  solve_cmd->add_flag("--certificates", sa.certificates, "Include the refutation tree");
  solve_cmd->add_option("--out", sa.out, "Also write the report here");

  DominateArgs da;
  auto* dom_cmd = app.add_subcommand("dominate", "Gap domination for an MPTA");
  dom_cmd->add_option("file", da.file, "Automaton (JSON)")->required();
  dom_cmd->add_option("--gamma", da.gamma, "Target vector, comma separated")->required()->allow_extra_args(false);
  dom_cmd->add_option("--epsilon", da.epsilon, "Slack gap p/q")->capture_default_str();
  dom_cmd->add_option("--pieces", da.pieces, "Semilinear pieces (JSON)");
  dom_cmd->add_option("--enumerate", da.enumerate, "Integer-time runs: steps,time");
  dom_cmd->add_option("--budget-ms", da.budget_ms, "Wall-clock budget")->capture_default_str();
  dom_cmd->add_option("--threads", da.threads, "Worker threads (default MIBGAP_THREADS or 1)");
  dom_cmd->add_option("--out", da.out, "Also write the report here");

  std::string oracle_file, oracle_eps = "1/2", oracle_out;
  long xbound = 25;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force reference decision over a bounded x window");
  oracle_cmd->add_option("file", oracle_file, "Instance (JSON)")->required();
  oracle_cmd->add_option("--epsilon", oracle_eps, "Slack gap p/q")->capture_default_str();
  oracle_cmd->add_option("--xbound", xbound, "Window bound")->capture_default_str();
  oracle_cmd->add_option("--out", oracle_out, "Also write the report here");

  GenArgs ga;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance");
  gen_cmd->add_option("kind", ga.kind, "hilbert | hilbert-unbounded | doubleexp | random")->required();
  gen_cmd->add_option("--equations", ga.equations, "e.g. \"x1 = x1 + x1; x2 = x1 * x1\"");
  gen_cmd->add_option("--n", ga.n, "doubleexp length, or y dimension for random")->capture_default_str();
  gen_cmd->add_option("--m", ga.m, "x dimension for random")->capture_default_str();
  gen_cmd->add_option("--height", ga.height, "Entry bound for random")->capture_default_str();
  gen_cmd->add_option("--seed", ga.seed, "Seed for random")->capture_default_str();
  gen_cmd->add_option("--out", ga.out, "Also write the instance here");

  std::string check_instance, check_artifact;
  auto* check_cmd = app.add_subcommand("check", "Independently re-verify a witness, refutation or domination report");
  check_cmd->add_option("instance", check_instance, "Instance or automaton (JSON)")->required();
  check_cmd->add_option("artifact", check_artifact, "Witness, refutation, domination or report (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa);
    if (*dom_cmd) return cmd_dominate(da);
    if (*oracle_cmd) return cmd_oracle(oracle_file, oracle_eps, xbound, oracle_out);
    if (*gen_cmd) return cmd_gen(ga);
    if (*check_cmd) return cmd_check(check_instance, check_artifact);
  } catch (const UsageError& e) {
    std::cout << Json{{"kind", "error"}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "mibgap: " << e.what() << "\n";
    return kError;
  } catch (const io::FormatError& e) {
    std::cout << Json{{"kind", "error"}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "mibgap: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cout << Json{{"kind", "error"}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "mibgap: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
