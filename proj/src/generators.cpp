#include "mibgap/generators.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <stdexcept>
#include <string>

namespace mibgap {

namespace {

std::size_t parse_var(std::string_view& t) {
  if (t.empty() || t.front() != 'x') throw std::invalid_argument("equation: expected a variable x<k>");
  t.remove_prefix(1);
  std::size_t len = 0, value = 0;
  while (len < t.size() && std::isdigit(static_cast<unsigned char>(t[len]))) value = value * 10 + (t[len++] - '0');
  if (len == 0 || value == 0) throw std::invalid_argument("equation: variables are x1, x2, ...");
  t.remove_prefix(len);
  return value;
}

void expect(std::string_view& t, char c) {
  if (t.empty() || t.front() != c) throw std::invalid_argument(std::string("equation: expected '") + c + "'");
  t.remove_prefix(1);
}

std::size_t variable_count(const std::vector<Equation>& eqs) {
  std::size_t n = 0;
  for (const Equation& e : eqs) n = std::max({n, e.i, e.j, e.k});
  return n;
}

// Builder for systems whose bilinear rows are sums of c * x_j * y_k terms.
struct Rows {
  Eigen::Index m, n;
  std::vector<BilinearRow> rows;

  BilinearRow blank(long c) const { return {IntMatrix::Zero(m, n), IntVector::Zero(n), Integer(c)}; }
  void push(BilinearRow r) { rows.push_back(std::move(r)); }
  // Adds r and its negation (an equation with right side 0).
  void push_equation(BilinearRow r) {
    BilinearRow neg{-r.a, -r.b, -r.c};
    rows.push_back(std::move(r));
    rows.push_back(std::move(neg));
  }
};

struct RowBlock {
  Eigen::Index cols;
  std::vector<std::pair<IntVector, Integer>> rows;

  IntVector zero() const { return IntVector::Zero(cols); }
  void le(IntVector a, long rhs) { rows.emplace_back(std::move(a), Integer(rhs)); }
  void eq(const IntVector& a, long rhs) {
    le(a, rhs);
    le(-a, -rhs);
  }
  void unit_eq(Eigen::Index j, long rhs) {
    IntVector a = zero();
    a[j] = 1;
    eq(a, rhs);
  }
  void unit_le(Eigen::Index j, long sign, long rhs) {
    IntVector a = zero();
    a[j] = sign;
    le(a, rhs);
  }
  LinearBlock build() const {
    LinearBlock b{IntMatrix(static_cast<Eigen::Index>(rows.size()), cols), IntVector(static_cast<Eigen::Index>(rows.size()))};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      b.matrix.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
      b.rhs[static_cast<Eigen::Index>(i)] = rows[i].second;
    }
    return b;
  }
};

}  // namespace

std::vector<Equation> parse_equations(std::string_view text) {
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c == ',' ? ';' : c;
  std::vector<Equation> out;
  std::string_view rest = compact;
  while (!rest.empty()) {
    const std::size_t end = rest.find(';');
    std::string_view t = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
    if (t.empty()) continue;
    Equation e{};
    e.i = parse_var(t);
    expect(t, '=');
    e.j = parse_var(t);
    if (t.empty()) throw std::invalid_argument("equation: expected '+' or '*'");
    if (t.front() == '+') e.kind = Equation::Kind::Sum;
    else if (t.front() == '*') e.kind = Equation::Kind::Product;
    else throw std::invalid_argument("equation: expected '+' or '*'");
    t.remove_prefix(1);
    e.k = parse_var(t);
    if (!t.empty()) throw std::invalid_argument("equation: trailing characters");
    out.push_back(e);
  }
  if (out.empty()) throw std::invalid_argument("equation list is empty");
  return out;
}

MibSystem hilbert_gadget(const std::vector<Equation>& eqs) {
  const Eigen::Index n = static_cast<Eigen::Index>(variable_count(eqs));
  const Eigen::Index m = n + 1;  // x_0..x_n; y_k is column k - 1
  Rows r{m, n, {}};
  for (Eigen::Index i = 1; i <= n; ++i) {
    BilinearRow row = r.blank(1);
    row.a(i, i - 1) = 1;
    r.push_equation(row);
  }
  RowBlock ib{m, {}};
  ib.unit_eq(0, 1);
  for (Eigen::Index j = 0; j < m; ++j) ib.unit_le(j, -1, 0);
  for (const Equation& e : eqs) {
    const auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j), k = static_cast<Eigen::Index>(e.k);
    if (e.kind == Equation::Kind::Sum) {
      IntVector a = ib.zero();
      a[i] += 1;
      a[j] -= 1;
      a[k] -= 1;
      ib.eq(a, 0);
    } else {
      BilinearRow row = r.blank(0);
      row.a(j, i - 1) += 1;
      row.a(k, i - 1) += 1;
      row.a(0, j - 1) -= 1;
      row.a(0, k - 1) -= 1;
      r.push_equation(row);
    }
  }
  RowBlock rb{n, {}};
  for (Eigen::Index k = 0; k < n; ++k) {
    rb.unit_le(k, -1, 0);
    rb.unit_le(k, 1, 1);
  }
  return MibSystem(m, n, r.rows, ib.build(), rb.build());
}

MibSystem hilbert_unbounded_gadget(const std::vector<Equation>& eqs) {
  const Eigen::Index n = static_cast<Eigen::Index>(variable_count(eqs));
  const Eigen::Index m = n + 2, last = n + 1;  // x_0..x_{n+1}, y_0..y_{n+1}
  Rows r{m, m, {}};
  RowBlock ib{m, {}};
  ib.unit_eq(0, 1);
  for (Eigen::Index j = 0; j < m; ++j) ib.unit_le(j, -1, 0);
  for (const Equation& e : eqs) {
    const auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j), k = static_cast<Eigen::Index>(e.k);
    if (e.kind == Equation::Kind::Sum) {
      IntVector a = ib.zero();
      a[i] += 1;
      a[j] -= 1;
      a[k] -= 1;
      ib.eq(a, 0);
    } else {
      // |x_i y_0 - x_j y_k| <= 1/2, doubled.
      BilinearRow row = r.blank(1);
      row.a(i, 0) += 2;
      row.a(j, k) -= 2;
      r.push(row);
      r.push({-row.a, row.b, row.c});
    }
  }
  for (Eigen::Index i = 1; i <= last; ++i) {
    BilinearRow close = r.blank(1);  // |x_i y_0 - x_0 y_i| <= 1
    close.a(i, 0) += 1;
    close.a(0, i) -= 1;
    r.push(close);
    r.push({-close.a, close.b, close.c});
    BilinearRow ratio = r.blank(1);  // |x_{n+1} y_i - x_i y_{n+1}| <= 1
    ratio.a(last, i) += 1;
    ratio.a(i, last) -= 1;
    r.push(ratio);
    r.push({-ratio.a, ratio.b, ratio.c});
    BilinearRow big = r.blank(-1);  // x_{n+1} y_0 >= 4 (x_0 + x_i)(y_0 + y_i) + 1
    big.a(last, 0) -= 1;
    big.a(0, 0) += 4;
    big.a(0, i) += 4;
    big.a(i, 0) += 4;
    big.a(i, i) += 4;
    r.push(big);
  }
  RowBlock rb{m, {}};
  rb.unit_eq(0, 1);
  for (Eigen::Index k = 0; k < m; ++k) rb.unit_le(k, -1, 0);
  return MibSystem(m, m, r.rows, ib.build(), rb.build());
}

MibSystem doubleexp(std::size_t count) {
  if (count < 1) throw std::invalid_argument("doubleexp: n must be at least 1");
  const Eigen::Index n = static_cast<Eigen::Index>(count);
  Rows r{n, n + 1, {}};  // x_1..x_n as columns 0..n-1 of A, y_0..y_n
  for (Eigen::Index i = 0; i < n; ++i) {
    BilinearRow row = r.blank(1);
    row.a(i, i + 1) = 1;
    r.push(row);
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    BilinearRow row = r.blank(0);
    row.a(i, 0) = 1;
    row.a(i + 1, i + 1) = -1;
    r.push(row);
  }
  RowBlock ib{n, {}};
  ib.unit_eq(0, 2);
  for (Eigen::Index j = 1; j < n; ++j) ib.unit_le(j, -1, 0);
  RowBlock rb{n + 1, {}};
  rb.unit_eq(0, 1);
  for (Eigen::Index k = 1; k <= n; ++k) {
    rb.unit_le(k, -1, 0);
    rb.unit_le(k, 1, 1);
  }
  return MibSystem(n, n + 1, r.rows, ib.build(), rb.build());
}

MibSystem random_bounded(const RandomSpec& spec) {
  if (spec.m < 1 || spec.n < 1 || spec.height < 1) throw std::invalid_argument("random: m, n and height must be positive");
  std::mt19937_64 gen(spec.seed);
  auto draw = [&](long lo, long hi) { return lo + static_cast<long>(gen() % static_cast<std::uint64_t>(hi - lo + 1)); };
  const long h = spec.height;
  const Eigen::Index m = spec.m, n = spec.n;
  Rows r{m, n, {}};
  const long count = draw(1, 3);
  for (long i = 0; i < count; ++i) {
    BilinearRow row = r.blank(draw(-h, h));
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < n; ++k) row.a(j, k) = draw(-h, h);
    for (Eigen::Index k = 0; k < n; ++k) row.b[k] = draw(-h, h);
    r.push(row);
  }
  RowBlock rb{n, {}};
  for (Eigen::Index k = 0; k < n; ++k) {
    rb.unit_le(k, -1, draw(0, h));
    rb.unit_le(k, 1, draw(0, h));
  }
  if (draw(0, 1)) {
    IntVector a(n);
    for (Eigen::Index k = 0; k < n; ++k) a[k] = draw(-h, h);
    rb.le(a, draw(0, h));
  }
  if (!draw(0, 1)) return MibSystem::standard(m, n, r.rows, rb.build());
  RowBlock ib{m, {}};
  for (Eigen::Index j = 0; j < m; ++j) {
    ib.unit_le(j, -1, 0);
    ib.unit_le(j, 1, draw(0, h));
  }
  return MibSystem(m, n, r.rows, ib.build(), rb.build());
}

}  // namespace mibgap
