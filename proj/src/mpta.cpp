#include "mibgap/mpta.hpp"

#include "mibgap/oracle.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace mibgap {

namespace {

template <typename Clock>
bool guard_holds(const MptaEdge& e, const std::vector<Clock>& nu) {
  for (const GuardAtom& g : e.guard) {
    const bool ok = g.op == GuardAtom::Op::Le ? nu[g.clock] <= Clock(g.bound) : nu[g.clock] >= Clock(g.bound);
    if (!ok) return false;
  }
  return true;
}

std::string describe(const GuardAtom& g, const Mpta& a) {
  return a.clocks[g.clock] + (g.op == GuardAtom::Op::Le ? " <= " : " >= ") + to_string(g.bound);
}

}  // namespace

void Mpta::validate() const {
  if (locations.empty()) throw std::invalid_argument("mpta: no locations");
  if (initial >= locations.size()) throw std::invalid_argument("mpta: initial location does not exist");
  if (accepting.size() != locations.size()) throw std::invalid_argument("mpta: accepting flags do not match locations");
  if (rates.size() != locations.size()) throw std::invalid_argument("mpta: rates do not match locations");
  for (const IntVector& r : rates)
    if (r.size() != static_cast<Eigen::Index>(observers.size()))
      throw std::invalid_argument("mpta: rate vector length differs from observer count");
  for (const MptaEdge& e : edges) {
    if (e.source >= locations.size() || e.target >= locations.size())
      throw std::invalid_argument("mpta: edge endpoint does not exist");
    for (const GuardAtom& g : e.guard) {
      if (g.clock >= clocks.size()) throw std::invalid_argument("mpta: guard names an unknown clock");
      if (g.bound < 0) throw std::invalid_argument("mpta: guard constants must be natural");
    }
    for (std::size_t c : e.resets)
      if (c >= clocks.size()) throw std::invalid_argument("mpta: reset names an unknown clock");
  }
}

SimulateResult simulate(const Mpta& a, const std::vector<std::size_t>& edges, const std::vector<Rational>& delays) {
  if (edges.size() != delays.size()) throw std::invalid_argument("simulate: one delay per edge expected");
  std::size_t loc = a.initial;
  std::vector<Rational> nu(a.clocks.size(), Rational(0));
  RatVector value = RatVector::Zero(static_cast<Eigen::Index>(a.observers.size()));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] >= a.edges.size()) throw std::invalid_argument("simulate: unknown edge " + std::to_string(edges[i]));
    const MptaEdge& e = a.edges[edges[i]];
    if (delays[i] < 0) return Rejected{i, "negative delay"};
    if (e.source != loc)
      return Rejected{i, "edge leaves " + a.locations[e.source] + " but the run is in " + a.locations[loc]};
    for (Rational& c : nu) c += delays[i];
    value += delays[i] * to_rational(a.rates[loc]);
    for (const GuardAtom& g : e.guard) {
      const bool ok = g.op == GuardAtom::Op::Le ? nu[g.clock] <= Rational(g.bound) : nu[g.clock] >= Rational(g.bound);
      if (!ok) return Rejected{i, "guard " + describe(g, a) + " fails with " + a.clocks[g.clock] + " = " + to_string(nu[g.clock])};
    }
    for (std::size_t c : e.resets) nu[c] = 0;
    loc = e.target;
  }
  return RunValue{value, loc};
}

SplitAutomaton split_observers(const Mpta& a) {
  SplitAutomaton out{a, IntMatrix::Zero(static_cast<Eigen::Index>(a.observers.size()),
                                        static_cast<Eigen::Index>(2 * a.observers.size()))};
  out.automaton.observers.clear();
  for (std::size_t y = 0; y < a.observers.size(); ++y) {
    out.automaton.observers.push_back(a.observers[y] + "+");
    out.automaton.observers.push_back(a.observers[y] + "-");
    out.phi(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(2 * y)) = 1;
    out.phi(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(2 * y + 1)) = -1;
  }
  for (std::size_t l = 0; l < a.rates.size(); ++l) {
    IntVector r(static_cast<Eigen::Index>(2 * a.observers.size()));
    for (Eigen::Index y = 0; y < a.rates[l].size(); ++y) {
      const Integer& v = a.rates[l][y];
      r[2 * y] = v > 0 ? v : Integer(0);
      r[2 * y + 1] = v < 0 ? Integer(-v) : Integer(0);
    }
    out.automaton.rates[l] = r;
  }
  return out;
}

IntegerRuns integer_runs(const Mpta& a, std::size_t max_steps, const Integer& max_time) {
  if (max_time < 0) throw std::invalid_argument("integer_runs: max_time must be nonnegative");
  a.validate();
  std::map<std::vector<std::size_t>, std::set<std::vector<Integer>>> found;
  const std::size_t d = a.observers.size();
  std::vector<std::size_t> path;
  std::vector<Integer> nu(a.clocks.size(), Integer(0));
  std::vector<Integer> value(d, Integer(0));
  if (a.accepting[a.initial]) found[path].insert(value);

  std::function<void(std::size_t, const Integer&)> dfs = [&](std::size_t loc, const Integer& time) {
    if (path.size() == max_steps) return;
    for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
      const MptaEdge& e = a.edges[ei];
      if (e.source != loc) continue;
      for (Integer t = 0; time + t <= max_time; ++t) {
        const std::vector<Integer> saved_nu = nu, saved_value = value;
        for (Integer& c : nu) c += t;
        for (std::size_t y = 0; y < d; ++y) value[y] += t * a.rates[loc][static_cast<Eigen::Index>(y)];
        if (guard_holds(e, nu)) {
          for (std::size_t c : e.resets) nu[c] = 0;
          path.push_back(ei);
          if (a.accepting[e.target]) found[path].insert(value);
          dfs(e.target, time + t);
          path.pop_back();
        }
        nu = saved_nu;
        value = saved_value;
      }
    }
  };
  dfs(a.initial, Integer(0));

  IntegerRuns out;
  for (auto& [p, vals] : found) {
    out.paths.push_back(p);
    out.values.push_back(std::move(vals));
  }
  return out;
}

std::set<std::vector<Integer>> enumerate_integer_runs(const Mpta& a, std::size_t max_steps, const Integer& max_time) {
  std::set<std::vector<Integer>> out;
  for (const auto& vals : integer_runs(a, max_steps, max_time).values) out.insert(vals.begin(), vals.end());
  return out;
}

std::optional<TimedRun> find_integer_run(const Mpta& a, const std::vector<Integer>& target, std::size_t max_steps,
                                         const Integer& max_time) {
  a.validate();
  const std::size_t d = a.observers.size();
  if (target.size() != d) throw DimensionMismatch("find_integer_run: value length differs from observer count");
  TimedRun run;
  std::vector<Integer> nu(a.clocks.size(), Integer(0));
  std::vector<Integer> value(d, Integer(0));
  if (a.accepting[a.initial] && value == target) return run;

  std::function<bool(std::size_t, const Integer&)> dfs = [&](std::size_t loc, const Integer& time) {
    if (run.edges.size() == max_steps) return false;
    for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
      const MptaEdge& e = a.edges[ei];
      if (e.source != loc) continue;
      for (Integer t = 0; time + t <= max_time; ++t) {
        const std::vector<Integer> saved_nu = nu, saved_value = value;
        for (Integer& c : nu) c += t;
        for (std::size_t y = 0; y < d; ++y) value[y] += t * a.rates[loc][static_cast<Eigen::Index>(y)];
        if (guard_holds(e, nu)) {
          for (std::size_t c : e.resets) nu[c] = 0;
          run.edges.push_back(ei);
          run.delays.push_back(t);
          if ((a.accepting[e.target] && value == target) || dfs(e.target, time + t)) return true;
          run.edges.pop_back();
          run.delays.pop_back();
        }
        nu = saved_nu;
        value = saved_value;
      }
    }
    return false;
  };
  if (dfs(a.initial, Integer(0))) return run;
  return std::nullopt;
}

std::vector<LinearSet> run_pieces(const IntegerRuns& runs, std::size_t d) {
  std::vector<LinearSet> out;
  const Eigen::Index dim = static_cast<Eigen::Index>((d + 1) * d);
  for (const auto& vals : runs.values) {
    const std::vector<std::vector<Integer>> v(vals.begin(), vals.end());
    // Multisets of size d + 1, as nondecreasing index tuples.
    std::vector<std::size_t> idx(d + 1, 0);
    for (;;) {
      LinearSet piece{IntVector(dim), IntMatrix(dim, 0)};
      for (std::size_t i = 0; i <= d; ++i)
        for (std::size_t y = 0; y < d; ++y) piece.base[static_cast<Eigen::Index>(i * d + y)] = v[idx[i]][y];
      out.push_back(std::move(piece));
      std::size_t k = d + 1;
      while (k > 0 && idx[k - 1] + 1 == v.size()) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j <= d; ++j) idx[j] = idx[k - 1];
    }
  }
  return out;
}

MasterSystem assemble_master(const LinearSet& piece, const RatVector& gamma, std::size_t d) {
  const Eigen::Index dd = static_cast<Eigen::Index>(d);
  if (gamma.size() != dd) throw DimensionMismatch("assemble_master: target length differs from observer count");
  if (piece.dim() != (dd + 1) * dd) throw DimensionMismatch("assemble_master: piece dimension is not (d + 1) d");
  Integer scale = 1;
  for (Eigen::Index y = 0; y < dd; ++y) scale = lcm(scale, denominator(gamma[y]));
  const Eigen::Index m = piece.period_count(), n = dd + 1;
  std::vector<BilinearRow> rows;
  for (Eigen::Index y = 0; y < dd; ++y) {
    BilinearRow row{IntMatrix::Zero(m, n), IntVector::Zero(n), numerator(Rational(Rational(scale) * gamma[y]))};
    for (Eigen::Index i = 0; i < n; ++i) {
      row.b[i] = scale * piece.base[i * dd + y];
      for (Eigen::Index j = 0; j < m; ++j) row.a(j, i) = scale * piece.periods(i * dd + y, j);
    }
    rows.push_back(std::move(row));
  }
  LinearBlock simplex{IntMatrix::Zero(n + 2, n), IntVector::Zero(n + 2)};
  simplex.matrix.row(0).setOnes();
  simplex.rhs[0] = 1;
  simplex.matrix.row(1).setConstant(-1);
  simplex.rhs[1] = -1;
  simplex.matrix.bottomRows(n) = -IntMatrix::Identity(n, n);
  return {MibSystem::standard(m, n, std::move(rows), std::move(simplex)), scale};
}

bool check_domination(const Dominated& w, const RatVector& gamma, const Rational& eps) {
  const Eigen::Index d = gamma.size();
  if (w.lambda.size() != d + 1 || static_cast<Eigen::Index>(w.vertices.size()) != d + 1 || w.combination.size() != d)
    return false;
  Rational total = 0;
  RatVector combo = RatVector::Zero(d);
  for (Eigen::Index i = 0; i <= d; ++i) {
    if (w.lambda[i] < 0 || w.vertices[static_cast<std::size_t>(i)].size() != d) return false;
    total += w.lambda[i];
    combo += w.lambda[i] * to_rational(w.vertices[static_cast<std::size_t>(i)]);
  }
  if (total != 1 || combo != w.combination) return false;
  for (Eigen::Index y = 0; y < d; ++y)
    if (combo[y] > gamma[y] - eps) return false;
  return true;
}

DominationVerdict gap_dominate(const Mpta& a, const DominationQuery& q, const SolveOptions& options) {
  a.validate();
  const std::size_t d = a.observers.size();
  if (q.gamma.size() != static_cast<Eigen::Index>(d)) throw DimensionMismatch("gap_dominate: target length differs from observer count");
  if (q.eps <= 0) throw std::invalid_argument("gap_dominate: eps must be positive");
  const auto end = std::chrono::steady_clock::now() + options.budget;
  std::string unsettled;
  for (std::size_t k = 0; k < q.pieces.size(); ++k) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= end) return DominationUnknown{"budget exhausted after " + std::to_string(k) + " pieces"};
    SolveOptions local = options;
    local.budget = std::chrono::duration_cast<std::chrono::milliseconds>(end - now);
    const MasterSystem master = assemble_master(q.pieces[k], q.gamma, d);
    const Rational slack = master.slack(q.eps);
    GapVerdict v = solve(master.system, slack, local);
    if (auto* u = std::get_if<Unknown>(&v)) {
      if (unsettled.empty()) unsettled = "piece " + std::to_string(k) + ": " + u->reason;
      continue;
    }
    auto* sat = std::get_if<Sat>(&v);
    if (!sat) continue;
    // Best weights for these vertices; the solver only promises slack 0.
    const IntVector& z = sat->assignment.x;
    auto best = best_y(master.system, z, std::max(slack, Rational(1)));
    if (!best || best->margin < slack) {
      if (unsettled.empty()) unsettled = "piece " + std::to_string(k) + " dominates gamma only within the slack";
      continue;
    }
    Dominated w{k, {}, best->y, RatVector::Zero(static_cast<Eigen::Index>(d))};
    const IntVector point = q.pieces[k].base + q.pieces[k].periods * z;
    for (std::size_t i = 0; i <= d; ++i) {
      w.vertices.push_back(point.segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)));
      w.combination += w.lambda[static_cast<Eigen::Index>(i)] * to_rational(w.vertices.back());
    }
    if (check_domination(w, q.gamma, q.eps)) return w;
    if (unsettled.empty()) unsettled = "internal: piece " + std::to_string(k) + " failed the domination re-check";
  }
  if (unsettled.empty() && q.exact) return NotDominated{};
  if (unsettled.empty()) unsettled = "every piece is refuted, but the pieces under-approximate the runs";
  return DominationUnknown{unsettled};
}

}  // namespace mibgap
