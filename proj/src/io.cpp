#include "mibgap/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace mibgap::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw FormatError(std::string("field '") + key + "' must be an array");
  return a;
}

std::size_t index_from(const Json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw FormatError("expected a non-negative integer index");
  return j.get<std::size_t>();
}

void expect_kind(const Json& j, const char* kind) {
  const Json& k = field(j, "kind");
  if (!k.is_string() || k.get<std::string>() != kind) throw FormatError(std::string("expected kind '") + kind + "'");
}

std::string text(const Json& j) {
  if (!j.is_string()) throw FormatError("expected a string");
  return j.get<std::string>();
}

std::size_t lookup(const std::map<std::string, std::size_t>& names, const Json& j, const char* what) {
  const auto it = names.find(text(j));
  if (it == names.end()) throw FormatError(std::string("unknown ") + what + " '" + text(j) + "'");
  return it->second;
}

std::map<std::string, std::size_t> name_index(const std::vector<std::string>& names, const char* what) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!out.emplace(names[i], i).second) throw FormatError(std::string("duplicate ") + what + " '" + names[i] + "'");
  return out;
}

std::vector<std::string> names_from(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of names");
  std::vector<std::string> out;
  for (const Json& e : j) out.push_back(text(e));
  return out;
}

Json ybounds_json(const YBounds& y) {
  Json lo = Json::array(), hi = Json::array(), lod = Json::array(), hid = Json::array();
  for (std::size_t k = 0; k < y.lo.size(); ++k) {
    lo.push_back(to_json(y.lo[k]));
    hi.push_back(to_json(y.hi[k]));
    lod.push_back(to_json(y.lo_dual[k]));
    hid.push_back(to_json(y.hi_dual[k]));
  }
  return {{"lo", lo}, {"hi", hi}, {"lo_dual", lod}, {"hi_dual", hid}};
}

YBounds ybounds_from(const Json& j) {
  YBounds y;
  for (const Json& e : array_field(j, "lo")) y.lo.push_back(rational_from(e));
  for (const Json& e : array_field(j, "hi")) y.hi.push_back(rational_from(e));
  for (const Json& e : array_field(j, "lo_dual")) y.lo_dual.push_back(rat_vector_from(e));
  for (const Json& e : array_field(j, "hi_dual")) y.hi_dual.push_back(rat_vector_from(e));
  const std::size_t n = y.lo.size();
  if (y.hi.size() != n || y.lo_dual.size() != n || y.hi_dual.size() != n) throw FormatError("ybounds: length mismatch");
  return y;
}

const char* node_kind_name(UnsatNode::Kind k) {
  switch (k) {
    case UnsatNode::Kind::Root: return "root";
    case UnsatNode::Kind::EmptyReal: return "empty_real";
    case UnsatNode::Kind::Base: return "base";
    case UnsatNode::Kind::Continuous: return "continuous";
    case UnsatNode::Kind::RelaxSplit: return "relax_split";
    case UnsatNode::Kind::BoundSplit: return "bound_split";
  }
  return "";
}

UnsatNode::Kind node_kind_from(const std::string& s) {
  for (auto k : {UnsatNode::Kind::Root, UnsatNode::Kind::EmptyReal, UnsatNode::Kind::Base, UnsatNode::Kind::Continuous,
                 UnsatNode::Kind::RelaxSplit, UnsatNode::Kind::BoundSplit})
    if (s == node_kind_name(k)) return k;
  throw FormatError("unknown node kind '" + s + "'");
}

const char* branch_name(BranchEquation::Kind k) {
  switch (k) {
    case BranchEquation::Kind::ZeroComponent: return "zero";
    case BranchEquation::Kind::Hyperplane: return "hyperplane";
    case BranchEquation::Kind::FixedValue: return "fixed";
  }
  return "";
}

Json branch_json(const BranchEquation& b) {
  Json j{{"kind", branch_name(b.kind)}};
  if (b.kind == BranchEquation::Kind::Hyperplane) {
    j["u"] = to_json(b.u);
    j["b"] = to_json(b.b);
  } else {
    j["index"] = b.index;
    if (b.kind == BranchEquation::Kind::FixedValue) j["b"] = to_json(b.b);
  }
  return j;
}

BranchEquation branch_from(const Json& j) {
  BranchEquation b;
  const std::string k = text(field(j, "kind"));
  if (k == "zero") {
    b.kind = BranchEquation::Kind::ZeroComponent;
    b.index = index_from(field(j, "index"));
  } else if (k == "fixed") {
    b.kind = BranchEquation::Kind::FixedValue;
    b.index = index_from(field(j, "index"));
    b.b = integer_from(field(j, "b"));
  } else if (k == "hyperplane") {
    b.kind = BranchEquation::Kind::Hyperplane;
    b.u = int_vector_from(field(j, "u"));
    b.b = integer_from(field(j, "b"));
  } else {
    throw FormatError("unknown branch kind '" + k + "'");
  }
  return b;
}

const char* ref_name(RowRef::Kind k) {
  switch (k) {
    case RowRef::Kind::Row: return "row";
    case RowRef::Kind::Envelope: return "envelope";
    case RowRef::Kind::Lower: return "lower";
    case RowRef::Kind::Upper: return "upper";
  }
  return "";
}

RowRef ref_from(const Json& j) {
  RowRef r;
  const std::string k = text(field(j, "kind"));
  if (k == "row") r.kind = RowRef::Kind::Row;
  else if (k == "envelope") r.kind = RowRef::Kind::Envelope;
  else if (k == "lower") r.kind = RowRef::Kind::Lower;
  else if (k == "upper") r.kind = RowRef::Kind::Upper;
  else throw FormatError("unknown reference kind '" + k + "'");
  r.index = index_from(field(j, "index"));
  if (r.kind == RowRef::Kind::Envelope) {
    r.which = static_cast<int>(index_from(field(j, "which")));
    if (r.which > 3) throw FormatError("envelope number out of range");
  }
  return r;
}

}  // namespace

Json to_json(const Integer& z) { return to_string(z); }
Json to_json(const Rational& q) { return to_string(q); }

Json to_json(const IntVector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(to_string(v[i]));
  return j;
}

Json to_json(const RatVector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(to_string(v[i]));
  return j;
}

Json to_json(const IntMatrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(IntVector(m.row(r).transpose())));
  return j;
}

Integer integer_from(const Json& j) {
  try {
    return parse_integer(text(j));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Rational rational_from(const Json& j) {
  try {
    return parse_rational(text(j));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

IntVector int_vector_from(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of integers");
  IntVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = integer_from(j[i]);
  return v;
}

RatVector rat_vector_from(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of rationals");
  RatVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = rational_from(j[i]);
  return v;
}

IntMatrix int_matrix_from(const Json& j, Eigen::Index cols) {
  if (!j.is_array()) throw FormatError("expected a matrix (array of rows)");
  IntMatrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const IntVector row = int_vector_from(j[r]);
    if (row.size() != cols) throw FormatError("matrix row has the wrong length");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Json to_json(const MibSystem& s) {
  Json rows = Json::array();
  for (const BilinearRow& r : s.rows()) rows.push_back({{"A", to_json(r.a)}, {"b", to_json(r.b)}, {"c", to_json(r.c)}});
  return {{"kind", "mib"},
          {"m", s.m()},
          {"n", s.n()},
          {"rows", rows},
          {"C", to_json(s.integer_block().matrix)},
          {"d", to_json(s.integer_block().rhs)},
          {"E", to_json(s.real_block().matrix)},
          {"f", to_json(s.real_block().rhs)}};
}

MibSystem mib_from_json(const Json& j) {
  expect_kind(j, "mib");
  const auto m = static_cast<Eigen::Index>(index_from(field(j, "m")));
  const auto n = static_cast<Eigen::Index>(index_from(field(j, "n")));
  std::vector<BilinearRow> rows;
  for (const Json& r : array_field(j, "rows")) {
    BilinearRow row{int_matrix_from(field(r, "A"), n), int_vector_from(field(r, "b")), integer_from(field(r, "c"))};
    if (row.a.rows() != m || row.b.size() != n) throw FormatError("bilinear row has the wrong shape");
    rows.push_back(std::move(row));
  }
  LinearBlock ib{int_matrix_from(field(j, "C"), m), int_vector_from(field(j, "d"))};
  LinearBlock rb{int_matrix_from(field(j, "E"), n), int_vector_from(field(j, "f"))};
  try {
    return MibSystem(m, n, std::move(rows), std::move(ib), std::move(rb));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const Mpta& a) {
  Json rates = Json::object();
  for (std::size_t l = 0; l < a.locations.size(); ++l) rates[a.locations[l]] = to_json(a.rates[l]);
  Json accepting = Json::array();
  for (std::size_t l = 0; l < a.locations.size(); ++l)
    if (a.accepting[l]) accepting.push_back(a.locations[l]);
  Json edges = Json::array();
  for (const MptaEdge& e : a.edges) {
    Json guard = Json::array(), reset = Json::array();
    for (const GuardAtom& g : e.guard)
      guard.push_back({a.clocks[g.clock], g.op == GuardAtom::Op::Le ? "<=" : ">=", to_json(g.bound)});
    for (std::size_t c : e.resets) reset.push_back(a.clocks[c]);
    edges.push_back({{"from", a.locations[e.source]}, {"to", a.locations[e.target]}, {"guard", guard}, {"reset", reset}});
  }
  return {{"kind", "mpta"},
          {"locations", a.locations},
          {"initial", a.locations[a.initial]},
          {"accepting", accepting},
          {"clocks", a.clocks},
          {"observers", a.observers},
          {"rates", rates},
          {"edges", edges}};
}

Mpta mpta_from_json(const Json& j) {
  expect_kind(j, "mpta");
  Mpta a;
  a.locations = names_from(field(j, "locations"));
  a.clocks = names_from(field(j, "clocks"));
  a.observers = names_from(field(j, "observers"));
  const auto locs = name_index(a.locations, "location");
  const auto clocks = name_index(a.clocks, "clock");
  name_index(a.observers, "observer");
  a.initial = lookup(locs, field(j, "initial"), "location");
  a.accepting.assign(a.locations.size(), false);
  for (const Json& l : array_field(j, "accepting")) a.accepting[lookup(locs, l, "location")] = true;
  const auto d = static_cast<Eigen::Index>(a.observers.size());
  a.rates.assign(a.locations.size(), IntVector::Zero(d));
  const Json& rates = field(j, "rates");
  if (!rates.is_object()) throw FormatError("rates must map location names to vectors");
  for (const auto& [name, v] : rates.items()) {
    const auto it = locs.find(name);
    if (it == locs.end()) throw FormatError("rates: unknown location '" + name + "'");
    a.rates[it->second] = int_vector_from(v);
    if (a.rates[it->second].size() != d) throw FormatError("rates: vector length differs from the observer count");
  }
  for (const Json& e : array_field(j, "edges")) {
    MptaEdge edge{lookup(locs, field(e, "from"), "location"), lookup(locs, field(e, "to"), "location"), {}, {}};
    for (const Json& g : array_field(e, "guard")) {
      if (!g.is_array() || g.size() != 3) throw FormatError("guard atom must be [clock, op, bound]");
      const std::string op = text(g[1]);
      if (op != "<=" && op != ">=") throw FormatError("guard operator must be \"<=\" or \">=\"");
      edge.guard.push_back({lookup(clocks, g[0], "clock"), op == "<=" ? GuardAtom::Op::Le : GuardAtom::Op::Ge,
                            integer_from(g[2])});
    }
    for (const Json& c : array_field(e, "reset")) edge.resets.push_back(lookup(clocks, c, "clock"));
    a.edges.push_back(std::move(edge));
  }
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return a;
}

Json witness_to_json(const Assignment& a) { return {{"kind", "witness"}, {"x", to_json(a.x)}, {"y", to_json(a.y)}}; }

Assignment witness_from_json(const Json& j) {
  expect_kind(j, "witness");
  return {int_vector_from(field(j, "x")), rat_vector_from(field(j, "y"))};
}

Json to_json(const Certificate& c) {
  if (const auto* leaf = std::get_if<IntervalLeaf>(&c.node)) return {{"interval", leaf->row}};
  if (const auto* leaf = std::get_if<FarkasLeaf>(&c.node)) {
    Json terms = Json::array();
    for (const auto& [ref, coef] : leaf->multipliers) {
      Json r{{"kind", ref_name(ref.kind)}, {"index", ref.index}};
      if (ref.kind == RowRef::Kind::Envelope) r["which"] = ref.which;
      terms.push_back({{"ref", r}, {"coef", to_json(coef)}});
    }
    return {{"farkas", terms}};
  }
  const SplitNode& s = *std::get<std::shared_ptr<SplitNode>>(c.node);
  return {{"split", {{"var", s.var}, {"at", to_json(s.at)}, {"lower", to_json(s.lower)}, {"upper", to_json(s.upper)}}}};
}

Certificate certificate_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1) throw FormatError("certificate must have exactly one of interval, farkas, split");
  if (j.contains("interval")) return {IntervalLeaf{index_from(j.at("interval"))}};
  if (j.contains("farkas")) {
    FarkasLeaf leaf;
    for (const Json& t : array_field(j, "farkas")) leaf.multipliers.emplace_back(ref_from(field(t, "ref")), rational_from(field(t, "coef")));
    return {leaf};
  }
  const Json& s = field(j, "split");
  auto node = std::make_shared<SplitNode>(SplitNode{index_from(field(s, "var")), rational_from(field(s, "at")),
                                                    certificate_from_json(field(s, "lower")),
                                                    certificate_from_json(field(s, "upper"))});
  return {node};
}

Json refutation_to_json(const UnsatNode& root, const Rational& eps) {
  std::map<const UnsatNode*, std::size_t> ids;
  std::vector<const UnsatNode*> order{&root};
  ids[&root] = 0;
  Json nodes = Json::array();
  for (std::size_t k = 0; k < order.size(); ++k) {
    const UnsatNode& n = *order[k];
    Json j{{"id", k}, {"kind", node_kind_name(n.kind)}, {"system", to_json(n.system)}};
    switch (n.kind) {
      case UnsatNode::Kind::Root: break;
      case UnsatNode::Kind::EmptyReal:
      case UnsatNode::Kind::Base: j["farkas"] = to_json(n.farkas); break;
      case UnsatNode::Kind::BoundSplit:
        j["bound_var"] = n.bound_var;
        j["bound"] = to_json(n.bound);
        [[fallthrough]];
      case UnsatNode::Kind::Continuous:
      case UnsatNode::Kind::RelaxSplit: {
        j["ybounds"] = ybounds_json(n.ybounds);
        j["real_certificate"] = to_json(n.real_cert);
        if (n.kind != UnsatNode::Kind::BoundSplit) {
          Json us = Json::array();
          for (const IntVector& u : n.u_primitive) us.push_back(to_json(u));
          j["u_primitive"] = us;
          j["omega_hat"] = to_json(n.omega_hat);
          j["kappa2"] = to_json(n.kappa2);
        }
        break;
      }
    }
    Json children = Json::array();
    for (const ChildLink& c : n.children) {
      auto [it, fresh] = ids.emplace(c.node.get(), order.size());
      if (fresh) order.push_back(c.node.get());
      children.push_back({{"branch", branch_json(c.branch)}, {"w", to_json(c.w)}, {"P", to_json(c.p)}, {"node", it->second}});
    }
    j["children"] = children;
    nodes.push_back(std::move(j));
  }
  return {{"kind", "refutation"}, {"eps", to_json(eps)}, {"nodes", nodes}};
}

std::pair<UnsatPtr, Rational> refutation_from_json(const Json& j) {
  expect_kind(j, "refutation");
  const Rational eps = rational_from(field(j, "eps"));
  const Json& list = array_field(j, "nodes");
  if (list.empty()) throw FormatError("refutation has no nodes");
  std::vector<std::shared_ptr<UnsatNode>> nodes(list.size());
  for (auto& p : nodes) p = std::make_shared<UnsatNode>();
  for (std::size_t k = 0; k < list.size(); ++k) {
    const Json& e = list[k];
    if (index_from(field(e, "id")) != k) throw FormatError("node ids must be 0, 1, 2, ... in order");
    UnsatNode& n = *nodes[k];
    n.kind = node_kind_from(text(field(e, "kind")));
    n.system = mib_from_json(field(e, "system"));
    if (e.contains("farkas")) n.farkas = rat_vector_from(e.at("farkas"));
    if (e.contains("ybounds")) n.ybounds = ybounds_from(e.at("ybounds"));
    if (e.contains("real_certificate")) n.real_cert = certificate_from_json(e.at("real_certificate"));
    if (e.contains("bound_var")) n.bound_var = index_from(e.at("bound_var"));
    if (e.contains("bound")) n.bound = integer_from(e.at("bound"));
    if (e.contains("u_primitive"))
      for (const Json& u : e.at("u_primitive")) n.u_primitive.push_back(int_vector_from(u));
    if (e.contains("omega_hat")) n.omega_hat = rational_from(e.at("omega_hat"));
    if (e.contains("kappa2")) n.kappa2 = rational_from(e.at("kappa2"));
    for (const Json& c : array_field(e, "children")) {
      const std::size_t id = index_from(field(c, "node"));
      if (id <= k || id >= nodes.size()) throw FormatError("child ids must point forward");
      const IntVector w = int_vector_from(field(c, "w"));
      const Json& p = field(c, "P");
      const Eigen::Index k_cols = p.is_array() && !p.empty() && p[0].is_array() ? static_cast<Eigen::Index>(p[0].size()) : 0;
      n.children.push_back({branch_from(field(c, "branch")), w, int_matrix_from(p, k_cols), nodes[id]});
    }
  }
  return {nodes[0], eps};
}

Json pieces_to_json(const std::vector<LinearSet>& pieces, Eigen::Index dim, bool exact) {
  Json list = Json::array();
  for (const LinearSet& p : pieces) list.push_back({{"base", to_json(p.base)}, {"periods", to_json(p.periods)}});
  return {{"kind", "pieces"}, {"dim", dim}, {"exact", exact}, {"pieces", list}};
}

PieceFile pieces_from_json(const Json& j) {
  expect_kind(j, "pieces");
  PieceFile f;
  f.dim = static_cast<Eigen::Index>(index_from(field(j, "dim")));
  const Json& exact = field(j, "exact");
  if (!exact.is_boolean()) throw FormatError("exact must be a boolean");
  f.exact = exact.get<bool>();
  for (const Json& p : array_field(j, "pieces")) {
    LinearSet s;
    s.base = int_vector_from(field(p, "base"));
    if (s.base.size() != f.dim) throw FormatError("piece base has the wrong dimension");
    // periods are columns of P, stored row-major as a dim x k matrix
    const Json& per = array_field(p, "periods");
    if (per.size() != static_cast<std::size_t>(f.dim)) throw FormatError("periods must have dim rows");
    const Eigen::Index k = per.empty() ? 0 : static_cast<Eigen::Index>(per[0].size());
    s.periods = int_matrix_from(per, k);
    f.pieces.push_back(std::move(s));
  }
  return f;
}

Json to_json(const ConstantLedger& l) {
  Json u = Json::array(), up = Json::array();
  for (const IntVector& v : l.u) u.push_back(to_json(v));
  for (const IntVector& v : l.u_primitive) up.push_back(to_json(v));
  return {{"eps", to_json(l.eps)},
          {"m", l.m},
          {"height", to_json(l.height)},
          {"kappa1_upper", to_json(l.kappa1_upper)},
          {"r", to_json(l.r)},
          {"omega_upper", to_json(l.omega_upper)},
          {"omega_hat", to_json(l.omega_hat)},
          {"kappa2", to_json(l.kappa2)},
          {"kappa3", to_json(l.kappa3)},
          {"delta_s", to_json(l.delta_s)},
          {"u_norm_sq_bound", to_json(l.u_norm_sq_bound)},
          {"u_listed", l.u_listed},
          {"u_size", l.u.size()},
          {"u", u},
          {"u_primitive", up}};
}

Json to_json(const Dominated& d) {
  Json vs = Json::array();
  for (const IntVector& v : d.vertices) vs.push_back(to_json(v));
  return {{"piece", d.piece}, {"vertices", vs}, {"lambda", to_json(d.lambda)}, {"combination", to_json(d.combination)}};
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace mibgap::io
