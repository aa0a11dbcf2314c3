#include "audit.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace audit {

namespace {

using Z = mpz_class;
using Q = mpq_class;
using ZRow = std::vector<Z>;
using ZMat = std::vector<ZRow>;

struct Bad : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsing ---------------------------------------------------------------

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::size_t count(const Json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw Bad("expected a non-negative integer");
  return j.get<std::size_t>();
}

bool decimal(const std::string& s) {
  std::size_t i = s.size() > 0 && (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

Z integer(const Json& j) {
  if (!j.is_string() || !decimal(j.get<std::string>())) throw Bad("expected a decimal integer string");
  std::string s = j.get<std::string>();
  if (s[0] == '+') s.erase(0, 1);
  return Z(s);
}

Q rational(const Json& j) {
  if (!j.is_string()) throw Bad("expected a rational string");
  const std::string s = j.get<std::string>();
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Q(integer(j));
  const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  if (!decimal(num) || !decimal(den) || den[0] == '-' || den[0] == '+') throw Bad("malformed rational '" + s + "'");
  Q q(Z(num[0] == '+' ? num.substr(1) : num), Z(den));
  if (q.get_den() == 0) throw Bad("zero denominator");
  q.canonicalize();
  return q;
}

ZRow zvec(const Json& j, std::optional<std::size_t> len = std::nullopt) {
  if (!j.is_array()) throw Bad("expected an array");
  ZRow v;
  for (const Json& e : j) v.push_back(integer(e));
  if (len && v.size() != *len) throw Bad("vector has the wrong length");
  return v;
}

std::vector<Q> qvec(const Json& j, std::optional<std::size_t> len = std::nullopt) {
  if (!j.is_array()) throw Bad("expected an array");
  std::vector<Q> v;
  for (const Json& e : j) v.push_back(rational(e));
  if (len && v.size() != *len) throw Bad("vector has the wrong length");
  return v;
}

ZMat zmat(const Json& j, std::size_t cols) {
  if (!j.is_array()) throw Bad("expected a matrix");
  ZMat m;
  for (const Json& r : j) m.push_back(zvec(r, cols));
  return m;
}

// Instances --------------------------------------------------------------

struct Row {
  ZMat a;  // m x n
  ZRow b;
  Z c;
  bool operator==(const Row&) const = default;
};

struct Sys {
  std::size_t m = 0, n = 0;
  std::vector<Row> rows;
  ZMat C, E;
  ZRow d, f;
  bool operator==(const Sys&) const = default;

  bool standard() const {
    if (C.size() != m) return false;
    for (std::size_t i = 0; i < m; ++i) {
      if (d[i] != 0) return false;
      for (std::size_t j = 0; j < m; ++j)
        if (C[i][j] != (i == j ? -1 : 0)) return false;
    }
    return true;
  }
};

Sys parse_sys(const Json& j) {
  if (!at(j, "kind").is_string() || at(j, "kind").get<std::string>() != "mib") throw Bad("expected a mib instance");
  Sys s;
  s.m = count(at(j, "m"));
  s.n = count(at(j, "n"));
  if (!at(j, "rows").is_array()) throw Bad("rows must be an array");
  for (const Json& r : at(j, "rows")) {
    Row row{zmat(at(r, "A"), s.n), zvec(at(r, "b"), s.n), integer(at(r, "c"))};
    if (row.a.size() != s.m) throw Bad("A has the wrong number of rows");
    s.rows.push_back(std::move(row));
  }
  s.C = zmat(at(j, "C"), s.m);
  s.d = zvec(at(j, "d"), s.C.size());
  s.E = zmat(at(j, "E"), s.n);
  s.f = zvec(at(j, "f"), s.E.size());
  return s;
}

// x = w + P z with z >= 0 in the child.
Sys substitute(const Sys& s, const ZRow& w, const ZMat& p, std::size_t k) {
  Sys out;
  out.m = k;
  out.n = s.n;
  out.E = s.E;
  out.f = s.f;
  out.C.assign(k, ZRow(k, 0));
  out.d.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) out.C[i][i] = -1;
  for (const Row& r : s.rows) {
    Row t{ZMat(k, ZRow(s.n, 0)), r.b, r.c};
    for (std::size_t col = 0; col < s.n; ++col)
      for (std::size_t i = 0; i < s.m; ++i) {
        t.b[col] += r.a[i][col] * w[i];
        for (std::size_t z = 0; z < k; ++z) t.a[z][col] += p[i][z] * r.a[i][col];
      }
    out.rows.push_back(std::move(t));
  }
  return out;
}

// Farkas: lambda >= 0, lambda^T A = 0, lambda^T b < 0.
bool farkas(const std::vector<std::vector<Q>>& a, const std::vector<Q>& b, const std::vector<Q>& lambda, std::size_t cols) {
  if (lambda.size() != a.size()) return false;
  std::vector<Q> combo(cols, 0);
  Q rhs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lambda[i] < 0) return false;
    for (std::size_t j = 0; j < cols; ++j) combo[j] += lambda[i] * a[i][j];
    rhs += lambda[i] * b[i];
  }
  return std::all_of(combo.begin(), combo.end(), [](const Q& q) { return q == 0; }) && rhs < 0;
}

std::vector<std::vector<Q>> to_q(const ZMat& m) {
  std::vector<std::vector<Q>> out;
  for (const ZRow& r : m) out.emplace_back(r.begin(), r.end());
  return out;
}

// Real problems and certificates ------------------------------------------

struct Var {
  Q lo;
  std::optional<Q> hi;
};

struct Poly {
  std::vector<std::pair<std::size_t, Q>> lin;
  std::vector<std::tuple<std::size_t, std::size_t, Q>> quad;  // i <= j
  Q rhs;
};

struct Problem {
  std::vector<Var> box;
  std::vector<Poly> rows;

  std::size_t var(Q lo, std::optional<Q> hi) {
    box.push_back({std::move(lo), std::move(hi)});
    return box.size() - 1;
  }
};

Poly bilinear(const Row& r, const std::vector<std::size_t>& xs, const std::vector<std::size_t>& ys, const Q& rhs) {
  Poly p;
  for (std::size_t k = 0; k < r.b.size(); ++k)
    if (r.b[k] != 0) p.lin.emplace_back(ys[k], Q(r.b[k]));
  for (std::size_t j = 0; j < r.a.size(); ++j)
    for (std::size_t k = 0; k < r.a[j].size(); ++k)
      if (r.a[j][k] != 0) p.quad.emplace_back(std::min(xs[j], ys[k]), std::max(xs[j], ys[k]), Q(r.a[j][k]));
  p.rhs = rhs;
  return p;
}

void real_rows(Problem& p, const Sys& s, const std::vector<std::size_t>& ys) {
  for (std::size_t i = 0; i < s.E.size(); ++i) {
    Poly r;
    for (std::size_t k = 0; k < s.n; ++k)
      if (s.E[i][k] != 0) r.lin.emplace_back(ys[k], Q(s.E[i][k]));
    r.rhs = Q(s.f[i]);
    p.rows.push_back(std::move(r));
  }
}

struct YB {
  std::vector<Q> lo, hi;
};

// x >= 0 (x_v >= lower when given), y in the certified box, rows at c - eps.
Problem continuous(const Sys& s, const Q& eps, const YB& yb, std::optional<std::pair<std::size_t, Z>> lower) {
  Problem p;
  std::vector<std::size_t> xs, ys;
  for (std::size_t j = 0; j < s.m; ++j) xs.push_back(p.var(lower && lower->first == j ? Q(lower->second) : Q(0), std::nullopt));
  for (std::size_t k = 0; k < s.n; ++k) ys.push_back(p.var(yb.lo[k], yb.hi[k]));
  for (const Row& r : s.rows) p.rows.push_back(bilinear(r, xs, ys, Q(r.c) - eps));
  real_rows(p, s, ys);
  return p;
}

// x >= 1, core rows at c - 3 eps / 4, then per direction u two points of
// P(y) at distance omega_hat along u.
Problem relaxed(const Sys& s, const Q& eps, const YB& yb, const ZMat& us, const Q& omega_hat) {
  Problem p;
  std::vector<std::size_t> xs, ys;
  for (std::size_t j = 0; j < s.m; ++j) xs.push_back(p.var(1, std::nullopt));
  for (std::size_t k = 0; k < s.n; ++k) ys.push_back(p.var(yb.lo[k], yb.hi[k]));
  const Q strengthened = eps * 3 / 4;
  for (const Row& r : s.rows) p.rows.push_back(bilinear(r, xs, ys, Q(r.c) - strengthened));
  real_rows(p, s, ys);
  for (const ZRow& u : us) {
    std::vector<std::size_t> ps, qs;
    for (std::size_t c = 0; c < s.m; ++c) {
      ps.push_back(p.var(0, std::nullopt));
      qs.push_back(p.var(0, std::nullopt));
    }
    for (const Row& r : s.rows) {
      p.rows.push_back(bilinear(r, ps, ys, Q(r.c)));
      p.rows.push_back(bilinear(r, qs, ys, Q(r.c)));
    }
    Poly w;
    for (std::size_t c = 0; c < s.m; ++c) {
      if (u[c] == 0) continue;
      w.lin.emplace_back(ps[c], Q(-u[c]));
      w.lin.emplace_back(qs[c], Q(u[c]));
    }
    w.rhs = -omega_hat;
    p.rows.push_back(std::move(w));
  }
  return p;
}

// Extended rationals: inf in {-1, 0, 1}.
struct X {
  int inf = 0;
  Q v;
};

int sign(const X& a) { return a.inf ? a.inf : sgn(a.v); }

X times(const X& a, const X& b) {
  if (!a.inf && !b.inf) return {0, a.v * b.v};
  const int s = sign(a) * sign(b);
  return s == 0 ? X{0, 0} : X{s, 0};
}

bool lt(const X& a, const X& b) { return a.inf != b.inf ? a.inf < b.inf : (a.inf == 0 && a.v < b.v); }

X lo_of(const Var& v) { return {0, v.lo}; }
X hi_of(const Var& v) { return v.hi ? X{0, *v.hi} : X{1, 0}; }

// Lower end of c * x_i * x_j over the box.
X term_lower(const std::vector<Var>& box, std::size_t i, std::size_t j, const Q& c) {
  const X xs[2] = {lo_of(box[i]), hi_of(box[i])}, ys[2] = {lo_of(box[j]), hi_of(box[j])};
  const X k{0, c};
  std::optional<X> best;
  for (const X& a : xs)
    for (const X& b : ys) {
      const X t = times(k, times(a, b));
      if (!best || lt(t, *best)) best = t;
    }
  // A square with zero inside its range reaches 0.
  if (i == j && box[i].lo < 0 && lt(X{0, 0}, hi_of(box[i])) && lt(*best, X{0, 0}) && c > 0) best = X{0, 0};
  return *best;
}

bool interval_refutes(const std::vector<Var>& box, const Poly& r) {
  X sum{0, 0};
  auto add = [&](const X& t) {
    if (sum.inf) return;
    if (t.inf) sum = t;
    else sum.v += t.v;
  };
  for (const auto& [v, c] : r.lin) add(c >= 0 ? times({0, c}, lo_of(box[v])) : times({0, c}, hi_of(box[v])));
  for (const auto& [i, j, c] : r.quad) add(term_lower(box, i, j, c));
  return sum.inf == 1 || (sum.inf == 0 && sum.v > r.rhs);
}

using Mono = std::pair<std::size_t, std::size_t>;

struct Lin {
  std::map<std::size_t, Q> coef;
  Q rhs;
};

std::optional<Lin> relaxation_row(const Problem& p, const std::vector<Mono>& monos, const std::vector<Var>& box,
                                  const std::string& kind, std::size_t index, std::size_t which) {
  const std::size_t n = p.box.size();
  Lin l;
  if (kind == "row") {
    if (index >= p.rows.size()) return std::nullopt;
    for (const auto& [v, c] : p.rows[index].lin) l.coef[v] += c;
    for (const auto& [i, j, c] : p.rows[index].quad) {
      const auto it = std::lower_bound(monos.begin(), monos.end(), Mono{i, j});
      l.coef[n + static_cast<std::size_t>(it - monos.begin())] += c;
    }
    l.rhs = p.rows[index].rhs;
    return l;
  }
  if (kind == "lower" || kind == "upper") {
    if (index >= n) return std::nullopt;
    if (kind == "lower") {
      l.coef[index] = -1;
      l.rhs = -box[index].lo;
    } else {
      if (!box[index].hi) return std::nullopt;
      l.coef[index] = 1;
      l.rhs = *box[index].hi;
    }
    return l;
  }
  if (kind != "envelope" || index >= monos.size()) return std::nullopt;
  // McCormick inequalities for w = x_i x_j.
  const auto [i, j] = monos[index];
  const Q &a = box[i].lo, &b = box[j].lo;
  const std::optional<Q>&A = box[i].hi, &B = box[j].hi;
  const std::size_t w = n + index;
  switch (which) {
    case 0:  // w >= b x_i + a x_j - a b
      l.coef[w] -= 1, l.coef[i] += b, l.coef[j] += a, l.rhs = a * b;
      break;
    case 1:  // w >= B x_i + A x_j - A B
      if (!A || !B) return std::nullopt;
      l.coef[w] -= 1, l.coef[i] += *B, l.coef[j] += *A, l.rhs = *A * *B;
      break;
    case 2:  // w <= b x_i + A x_j - A b
      if (!A) return std::nullopt;
      l.coef[w] += 1, l.coef[i] -= b, l.coef[j] -= *A, l.rhs = -(*A * b);
      break;
    case 3:  // w <= B x_i + a x_j - a B
      if (!B) return std::nullopt;
      l.coef[w] += 1, l.coef[i] -= *B, l.coef[j] -= a, l.rhs = -(a * *B);
      break;
    default:
      return std::nullopt;
  }
  return l;
}

bool refutes(const Problem& p, const std::vector<Mono>& monos, const std::vector<Var>& box, const Json& c) {
  if (!c.is_object() || c.size() != 1) throw Bad("malformed real certificate");
  if (c.contains("interval")) {
    const std::size_t r = count(c.at("interval"));
    return r < p.rows.size() && interval_refutes(box, p.rows[r]);
  }
  if (c.contains("farkas")) {
    std::map<std::size_t, Q> combo;
    Q rhs = 0;
    for (const Json& t : c.at("farkas")) {
      const Json& ref = at(t, "ref");
      const Q lambda = rational(at(t, "coef"));
      if (lambda < 0) return false;
      const std::string kind = at(ref, "kind").get<std::string>();
      const std::size_t which = kind == "envelope" ? count(at(ref, "which")) : 0;
      const auto row = relaxation_row(p, monos, box, kind, count(at(ref, "index")), which);
      if (!row) return false;
      for (const auto& [v, q] : row->coef) combo[v] += lambda * q;
      rhs += lambda * row->rhs;
    }
    for (const auto& e : combo)
      if (e.second != 0) return false;
    return rhs < 0;
  }
  const Json& s = at(c, "split");
  const std::size_t v = count(at(s, "var"));
  if (v >= box.size()) return false;
  const Q cut = rational(at(s, "at"));
  if (cut < box[v].lo || (box[v].hi && cut > *box[v].hi)) return false;
  std::vector<Var> lower = box, upper = box;
  lower[v].hi = cut;
  upper[v].lo = cut;
  return refutes(p, monos, lower, at(s, "lower")) && refutes(p, monos, upper, at(s, "upper"));
}

bool refutes(const Problem& p, const Json& c) {
  std::set<Mono> table;
  for (const Poly& r : p.rows)
    for (const auto& [i, j, coef] : r.quad) table.emplace(i, j);
  return refutes(p, std::vector<Mono>(table.begin(), table.end()), p.box, c);
}

// Pieces ---------------------------------------------------------------

// Is x in {w + P z : z >= 0 integral}? P must have independent columns.
bool member(const ZRow& x, const ZRow& w, const ZMat& p, std::size_t k) {
  const std::size_t m = x.size();
  std::vector<std::vector<Q>> a(m, std::vector<Q>(k + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = p[i][j];
    a[i][k] = x[i] - w[i];
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t r = row;
    while (r < m && a[r][col] == 0) ++r;
    if (r == m) throw Bad("piece periods are linearly dependent");
    std::swap(a[r], a[row]);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Q f = a[i][col] / a[row][col];
      for (std::size_t j = col; j <= k; ++j) a[i][j] -= f * a[row][j];
    }
    pivots.push_back(row++);
  }
  for (std::size_t i = row; i < m; ++i)
    if (a[i][k] != 0) return false;
  for (std::size_t col = 0; col < k; ++col) {
    const Q z = a[pivots[col]][k] / a[pivots[col]][col];
    if (z < 0 || z.get_den() != 1) return false;
  }
  return true;
}

struct Piece {
  ZRow w;
  ZMat p;
  std::size_t k;
};

// Every integer point of the window satisfying `inside` lies in a piece.
template <class Inside>
bool covers(const std::vector<Piece>& pieces, std::size_t m, long lo, long hi, Inside inside) {
  ZRow x(m, lo);
  while (true) {
    if (inside(x) && std::none_of(pieces.begin(), pieces.end(), [&](const Piece& q) { return member(x, q.w, q.p, q.k); }))
      return false;
    std::size_t i = 0;
    while (i < m && x[i] == hi) x[i++] = lo;
    if (i == m) return true;
    ++x[i];
  }
}

// Refutation trees --------------------------------------------------------

constexpr long kWindow = 5;

struct Link {
  const Json* branch;
  ZRow w;
  ZMat p;
  std::size_t k, node;
};

struct Tree {
  const Json& nodes;
  Q eps;
  std::vector<std::optional<Sys>> systems;
  std::vector<int> state;  // 0 unseen, 1 ok
  std::string failure;

  bool fail(std::size_t id, const std::string& why) {
    if (failure.empty()) failure = "node " + std::to_string(id) + ": " + why;
    return false;
  }

  const Sys& system(std::size_t id) {
    if (!systems[id]) systems[id] = parse_sys(at(nodes[id], "system"));
    return *systems[id];
  }

  std::vector<Link> links(std::size_t id, const Sys& s) {
    std::vector<Link> out;
    for (const Json& c : at(nodes[id], "children")) {
      Link l{&at(c, "branch"), zvec(at(c, "w"), s.m), {}, 0, count(at(c, "node"))};
      const Json& p = at(c, "P");
      if (!p.is_array() || p.size() != s.m) throw Bad("P must have one row per integer variable");
      l.k = s.m ? p[0].size() : 0;
      l.p = zmat(p, l.k);
      if (l.node <= id || l.node >= nodes.size()) throw Bad("child ids must point forward");
      out.push_back(std::move(l));
    }
    return out;
  }

  std::optional<YB> ybounds(std::size_t id, const Sys& s) {
    const Json& j = at(nodes[id], "ybounds");
    YB yb{qvec(at(j, "lo"), s.n), qvec(at(j, "hi"), s.n)};
    const auto e = to_q(s.E);
    for (std::size_t k = 0; k < s.n; ++k)
      for (int side = 0; side < 2; ++side) {
        const std::vector<Q> l = qvec(at(j, side ? "hi_dual" : "lo_dual")[k], s.E.size());
        std::vector<Q> combo(s.n, 0);
        Q bound = 0;
        for (std::size_t i = 0; i < l.size(); ++i) {
          if (l[i] < 0) return std::nullopt;
          for (std::size_t c = 0; c < s.n; ++c) combo[c] += l[i] * e[i][c];
          bound += l[i] * Q(s.f[i]);
        }
        for (std::size_t c = 0; c < s.n; ++c)
          if (combo[c] != (c == k ? (side ? 1 : -1) : 0)) return std::nullopt;
        if (side ? bound != yb.hi[k] : -bound != yb.lo[k]) return std::nullopt;
      }
    return yb;
  }

  // Fixing x_i = value: w = value e_i, P = identity without column i.
  static bool fixes(const Link& l, std::size_t m, std::size_t i, const Z& value) {
    if (l.k + 1 != m) return false;
    for (std::size_t r = 0; r < m; ++r) {
      if (l.w[r] != (r == i ? value : Z(0))) return false;
      for (std::size_t c = 0; c < l.k; ++c) {
        const std::size_t col = c < i ? c : c + 1;
        if (l.p[r][c] != (r == col ? 1 : 0)) return false;
      }
    }
    return true;
  }

  bool branches(std::size_t id, const Sys& s, const std::vector<Link>& ls) {
    const Json& node = nodes[id];
    const ZMat us = [&] {
      ZMat u;
      for (const Json& v : at(node, "u_primitive")) u.push_back(zvec(v, s.m));
      return u;
    }();
    const Q kappa2 = rational(at(node, "kappa2"));
    Z range;
    mpz_cdiv_q(range.get_mpz_t(), kappa2.get_num_mpz_t(), kappa2.get_den_mpz_t());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < s.m; ++i, ++pos) {
      if (pos >= ls.size() || at(*ls[pos].branch, "kind") != "zero" || count(at(*ls[pos].branch, "index")) != i ||
          !fixes(ls[pos], s.m, i, 0))
        return fail(id, "zero-component child " + std::to_string(i) + " is missing or wrong");
    }
    for (const ZRow& u : us) {
      Z g = 0;
      for (const Z& c : u) g = gcd(g, c);
      if (g != 1) return fail(id, "width direction is not primitive");
      for (Z b = -range; b <= range; ++b) {
        std::vector<Piece> group;
        while (pos < ls.size() && at(*ls[pos].branch, "kind") == "hyperplane" && zvec(at(*ls[pos].branch, "u"), s.m) == u &&
               integer(at(*ls[pos].branch, "b")) == b) {
          const Link& l = ls[pos++];
          Z uw = 0;
          for (std::size_t r = 0; r < s.m; ++r) uw += u[r] * l.w[r];
          if (uw != b) return fail(id, "hyperplane base is off its hyperplane");
          for (std::size_t c = 0; c < l.k; ++c) {
            Z up = 0;
            for (std::size_t r = 0; r < s.m; ++r) up += u[r] * l.p[r][c];
            if (up != 0) return fail(id, "hyperplane period leaves its hyperplane");
          }
          group.push_back({l.w, l.p, l.k});
        }
        const bool ok = covers(group, s.m, 0, kWindow, [&](const ZRow& x) {
          Z ux = 0;
          for (std::size_t r = 0; r < s.m; ++r) ux += u[r] * x[r];
          return ux == b;
        });
        if (!ok) return fail(id, "hyperplane pieces miss a window point");
      }
    }
    if (pos != ls.size()) return fail(id, "unexpected extra children");
    return true;
  }

  bool children(std::size_t id, const Sys& s, const std::vector<Link>& ls, bool root) {
    for (const Link& l : ls) {
      if (!root) {
        for (std::size_t r = 0; r < s.m; ++r) {
          if (l.w[r] < 0) return fail(id, "negative base entry");
          for (std::size_t c = 0; c < l.k; ++c)
            if (l.p[r][c] < 0) return fail(id, "negative period entry");
        }
        if (l.k >= s.m) return fail(id, "child does not drop an integer variable");
      }
      if (!(substitute(s, l.w, l.p, l.k) == system(l.node))) return fail(l.node, "system is not the substituted parent");
      if (!verify(l.node)) return false;
    }
    return true;
  }

  bool verify(std::size_t id) {
    if (state[id]) return true;
    const Json& node = nodes[id];
    if (count(at(node, "id")) != id) throw Bad("node ids must be 0, 1, 2, ... in order");
    const Sys& s = system(id);
    const std::string kind = at(node, "kind").get<std::string>();
    const std::vector<Link> ls = links(id, s);
    if (kind != "root" && !s.standard()) return fail(id, "system is not in standard form");
    bool ok = false;
    if (kind == "empty_real") {
      ok = farkas(to_q(s.E), std::vector<Q>(s.f.begin(), s.f.end()), qvec(at(node, "farkas")), s.n);
      if (!ok) fail(id, "Farkas multipliers do not refute E y <= f");
    } else if (kind == "base") {
      if (s.m != 0) return fail(id, "base node with integer variables");
      std::vector<std::vector<Q>> a;
      std::vector<Q> b;
      for (const Row& r : s.rows) a.emplace_back(r.b.begin(), r.b.end()), b.emplace_back(r.c);
      for (std::size_t i = 0; i < s.E.size(); ++i) a.emplace_back(s.E[i].begin(), s.E[i].end()), b.emplace_back(s.f[i]);
      ok = farkas(a, b, qvec(at(node, "farkas")), s.n);
      if (!ok) fail(id, "Farkas multipliers do not refute the rows");
    } else if (kind == "continuous" || kind == "relax_split" || kind == "bound_split") {
      const auto yb = ybounds(id, s);
      if (!yb) return fail(id, "y bounds are not certified by their duals");
      Problem p;
      if (kind == "relax_split") {
        ZMat us;
        for (const Json& v : at(node, "u_primitive")) us.push_back(zvec(v, s.m));
        p = relaxed(s, eps, *yb, us, rational(at(node, "omega_hat")));
      } else if (kind == "continuous") {
        p = continuous(s, eps, *yb, std::nullopt);
      } else {
        const std::size_t v = count(at(node, "bound_var"));
        const Z bound = integer(at(node, "bound"));
        if (v >= s.m || bound < 0) return fail(id, "bad bound split");
        p = continuous(s, eps, *yb, std::make_pair(v, Z(bound + 1)));
        if (Z(ls.size()) != bound + 1) return fail(id, "bound split needs one child per value");
        for (std::size_t t = 0; t < ls.size(); ++t)
          if (at(*ls[t].branch, "kind") != "fixed" || count(at(*ls[t].branch, "index")) != v ||
              integer(at(*ls[t].branch, "b")) != Z(static_cast<unsigned long>(t)) || !fixes(ls[t], s.m, v, Z(static_cast<unsigned long>(t))))
            return fail(id, "bound split child " + std::to_string(t) + " is wrong");
      }
      if (!refutes(p, at(node, "real_certificate"))) return fail(id, "real certificate does not refute its problem");
      ok = (kind == "bound_split" || branches(id, s, ls)) && children(id, s, ls, false);
    } else if (kind == "root") {
      if (id != 0) return fail(id, "root node below the top");
      std::vector<Piece> pieces;
      for (const Link& l : ls) pieces.push_back({l.w, l.p, l.k});
      const bool covered = covers(pieces, s.m, -kWindow, kWindow, [&](const ZRow& x) {
        for (std::size_t i = 0; i < s.C.size(); ++i) {
          Z lhs = 0;
          for (std::size_t j = 0; j < s.m; ++j) lhs += s.C[i][j] * x[j];
          if (lhs > s.d[i]) return false;
        }
        return true;
      });
      if (!covered) return fail(id, "standard-form pieces miss a window point");
      ok = children(id, s, ls, true);
    } else {
      return fail(id, "unknown kind '" + kind + "'");
    }
    if (ok) state[id] = 1;
    return ok;
  }
};

// Automata ---------------------------------------------------------------

struct Edge {
  std::size_t from, to;
  std::vector<std::tuple<std::size_t, bool, Z>> guard;  // clock, is_le, bound
  std::vector<std::size_t> reset;
};

struct Automaton {
  std::size_t initial = 0, clocks = 0, observers = 0;
  std::vector<bool> accepting;
  std::vector<std::vector<Z>> rates;
  std::vector<Edge> edges;
};

std::map<std::string, std::size_t> names(const Json& j) {
  std::map<std::string, std::size_t> out;
  if (!j.is_array()) throw Bad("expected a list of names");
  for (const Json& e : j)
    if (!e.is_string() || !out.emplace(e.get<std::string>(), out.size()).second) throw Bad("bad or duplicate name");
  return out;
}

std::size_t name(const std::map<std::string, std::size_t>& m, const Json& j) {
  if (!j.is_string() || !m.count(j.get<std::string>())) throw Bad("unknown name");
  return m.at(j.get<std::string>());
}

Automaton parse_automaton(const Json& j) {
  if (at(j, "kind") != "mpta") throw Bad("expected an mpta");
  const auto locs = names(at(j, "locations")), clocks = names(at(j, "clocks")), obs = names(at(j, "observers"));
  Automaton a;
  a.clocks = clocks.size();
  a.observers = obs.size();
  a.initial = name(locs, at(j, "initial"));
  a.accepting.assign(locs.size(), false);
  for (const Json& l : at(j, "accepting")) a.accepting[name(locs, l)] = true;
  a.rates.assign(locs.size(), ZRow(a.observers, 0));
  for (const auto& [loc, v] : at(j, "rates").items()) a.rates[name(locs, Json(loc))] = zvec(v, a.observers);
  for (const Json& e : at(j, "edges")) {
    Edge edge{name(locs, at(e, "from")), name(locs, at(e, "to")), {}, {}};
    for (const Json& g : at(e, "guard")) {
      if (!g.is_array() || g.size() != 3 || (g[1] != "<=" && g[1] != ">=")) throw Bad("bad guard atom");
      edge.guard.emplace_back(name(clocks, g[0]), g[1] == "<=", integer(g[2]));
    }
    for (const Json& c : at(e, "reset")) edge.reset.push_back(name(clocks, c));
    a.edges.push_back(std::move(edge));
  }
  return a;
}

// Value of an accepting run, by absolute time stamps; nothing if rejected.
std::optional<std::vector<Q>> replay(const Automaton& a, const Json& run) {
  const Json& edges = at(run, "edges");
  const std::vector<Q> delays = qvec(at(run, "delays"), edges.size());
  std::vector<Q> value(a.observers, 0), last_reset(a.clocks, 0);
  Q now = 0;
  std::size_t loc = a.initial;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::size_t id = count(edges[i]);
    if (id >= a.edges.size() || a.edges[id].from != loc || delays[i] < 0) return std::nullopt;
    for (std::size_t y = 0; y < a.observers; ++y) value[y] += delays[i] * Q(a.rates[loc][y]);
    now += delays[i];
    for (const auto& [c, le, k] : a.edges[id].guard) {
      const Q v = now - last_reset[c];
      if (le ? v > Q(k) : v < Q(k)) return std::nullopt;
    }
    for (std::size_t c : a.edges[id].reset) last_reset[c] = now;
    loc = a.edges[id].to;
  }
  if (!a.accepting[loc]) return std::nullopt;
  return value;
}

Verdict guarded(const std::function<Verdict()>& body) {
  try {
    return body();
  } catch (const Bad& e) {
    return {false, std::string("malformed: ") + e.what()};
  } catch (const nlohmann::json::exception& e) {
    return {false, std::string("malformed: ") + e.what()};
  }
}

}  // namespace

Verdict check_witness(const Json& instance, const Json& witness) {
  return guarded([&]() -> Verdict {
    const Sys s = parse_sys(instance);
    if (at(witness, "kind") != "witness") throw Bad("expected a witness");
    const ZRow x = zvec(at(witness, "x"), s.m);
    const std::vector<Q> y = qvec(at(witness, "y"), s.n);
    std::optional<Q> margin;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      Q v = 0;
      for (std::size_t k = 0; k < s.n; ++k) {
        Q coef = s.rows[i].b[k];
        for (std::size_t j = 0; j < s.m; ++j) coef += Q(x[j] * s.rows[i].a[j][k]);
        v += coef * y[k];
      }
      const Q slack = Q(s.rows[i].c) - v;
      if (slack < 0) return {false, "bilinear row " + std::to_string(i + 1) + " violated"};
      if (!margin || slack < *margin) margin = slack;
    }
    for (std::size_t i = 0; i < s.C.size(); ++i) {
      Z lhs = 0;
      for (std::size_t j = 0; j < s.m; ++j) lhs += s.C[i][j] * x[j];
      if (lhs > s.d[i]) return {false, "integer row " + std::to_string(i + 1) + " violated"};
    }
    for (std::size_t i = 0; i < s.E.size(); ++i) {
      Q lhs = 0;
      for (std::size_t k = 0; k < s.n; ++k) lhs += Q(s.E[i][k]) * y[k];
      if (lhs > Q(s.f[i])) return {false, "real row " + std::to_string(i + 1) + " violated"};
    }
    return {true, margin ? "witness satisfies every row; margin " + margin->get_str() : "witness satisfies every row"};
  });
}

Verdict check_refutation(const Json& instance, const Json& refutation) {
  return guarded([&]() -> Verdict {
    const Sys s = parse_sys(instance);
    if (at(refutation, "kind") != "refutation") throw Bad("expected a refutation");
    const Json& nodes = at(refutation, "nodes");
    if (!nodes.is_array() || nodes.empty()) throw Bad("refutation has no nodes");
    Tree t{nodes, rational(at(refutation, "eps")), std::vector<std::optional<Sys>>(nodes.size()),
           std::vector<int>(nodes.size(), 0), {}};
    if (t.eps <= 0) return {false, "eps must be positive"};
    if (!(t.system(0) == s)) return {false, "top node does not carry the instance"};
    if (at(nodes[0], "kind") == "root" ? s.standard() : !s.standard())
      return {false, "top node kind does not match the instance form"};
    if (!t.verify(0)) return {false, t.failure};
    return {true, "refutation verified at eps " + t.eps.get_str()};
  });
}

Verdict check_domination(const Json& automaton, const Json& report) {
  return guarded([&]() -> Verdict {
    const Automaton a = parse_automaton(automaton);
    if (at(report, "kind") != "domination") throw Bad("expected a domination report");
    const std::size_t d = a.observers;
    const std::vector<Q> gamma = qvec(at(report, "gamma"), d);
    const Q eps = rational(at(report, "eps"));
    const std::vector<Q> lambda = qvec(at(report, "lambda"), d + 1);
    const Json& runs = at(report, "runs");
    if (!runs.is_array() || runs.size() != d + 1) throw Bad("expected one run per vertex");
    if (eps <= 0) return {false, "eps must be positive"};
    std::vector<Q> combo(d, 0);
    Q total = 0;
    for (std::size_t i = 0; i <= d; ++i) {
      if (lambda[i] < 0) return {false, "negative weight"};
      const auto value = replay(a, runs[i]);
      if (!value) return {false, "run " + std::to_string(i + 1) + " is not an accepting run"};
      total += lambda[i];
      for (std::size_t y = 0; y < d; ++y) combo[y] += lambda[i] * (*value)[y];
    }
    if (total != 1) return {false, "weights do not sum to 1"};
    for (std::size_t y = 0; y < d; ++y)
      if (combo[y] > gamma[y] - eps) return {false, "combination misses gamma - eps in observer " + std::to_string(y + 1)};
    return {true, "domination verified"};
  });
}

Verdict check(const Json& instance, const Json& artifact) {
  if (!artifact.is_object() || !artifact.contains("kind") || !artifact.at("kind").is_string())
    return {false, "malformed: artifact has no kind"};
  const std::string kind = artifact.at("kind");
  if (kind == "witness") return check_witness(instance, artifact);
  if (kind == "refutation") return check_refutation(instance, artifact);
  if (kind == "domination") return check_domination(instance, artifact);
  return {false, "malformed: unknown artifact kind '" + kind + "'"};
}

}  // namespace audit
