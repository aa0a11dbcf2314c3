#pragma once

// JSON formats. Integers and rationals are decimal / "p/q" strings;
// dimensions and indices are JSON integers. Objects use sorted keys, so
// serialization is canonical.

#include "mibgap/gap.hpp"
#include "mibgap/mpta.hpp"
#include "mibgap/semilinear.hpp"

#include <json.hpp>

namespace mibgap::io {

using Json = nlohmann::json;

/// Malformed or inconsistent document.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json to_json(const Integer& z);
Json to_json(const Rational& q);
Json to_json(const IntVector& v);
Json to_json(const RatVector& v);
Json to_json(const IntMatrix& m);

Integer integer_from(const Json& j);
Rational rational_from(const Json& j);
IntVector int_vector_from(const Json& j);
RatVector rat_vector_from(const Json& j);
/// rows x cols matrix; cols is needed when rows == 0.
IntMatrix int_matrix_from(const Json& j, Eigen::Index cols);

Json to_json(const MibSystem& s);
MibSystem mib_from_json(const Json& j);

Json to_json(const Mpta& a);
Mpta mpta_from_json(const Json& j);

Json witness_to_json(const Assignment& a);
Assignment witness_from_json(const Json& j);

Json to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

/// Flat node list; shared subtrees are written once. The root has id 0.
Json refutation_to_json(const UnsatNode& root, const Rational& eps);
/// Returns the tree and its eps.
std::pair<UnsatPtr, Rational> refutation_from_json(const Json& j);

Json pieces_to_json(const std::vector<LinearSet>& pieces, Eigen::Index dim, bool exact);
struct PieceFile {
  Eigen::Index dim = 0;
  bool exact = false;
  std::vector<LinearSet> pieces;
};
PieceFile pieces_from_json(const Json& j);

Json to_json(const ConstantLedger& l);
Json to_json(const Dominated& d);

/// Reads a file and parses it, raising FormatError on failure.
Json read_file(const std::string& path);

}  // namespace mibgap::io
