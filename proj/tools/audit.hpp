#pragma once

// Independent checker for solver artifacts. It reads the JSON documents
// directly and re-verifies them with GMP rationals, sharing no code with
// the solver library.
//
// Trusted inputs: the width directions, omega_hat and kappa2 recorded in a
// refutation node. Everything else is recomputed here.

#include <json.hpp>

#include <string>

namespace audit {

using Json = nlohmann::json;

struct Verdict {
  bool ok = false;
  std::string message;
};

/// Exact satisfaction of every row; message reports the smallest bilinear
/// margin.
Verdict check_witness(const Json& instance, const Json& witness);

/// Full re-verification of a refutation tree against the instance.
Verdict check_refutation(const Json& instance, const Json& refutation);

/// Domination report: every vertex is replayed as a run of the automaton,
/// and the convex combination is checked against gamma - eps.
Verdict check_domination(const Json& automaton, const Json& report);

/// Dispatches on the artifact's kind.
Verdict check(const Json& instance, const Json& artifact);

}  // namespace audit
