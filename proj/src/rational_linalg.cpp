#include "carnot/rational_linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace carnot {

void RatMatrix::append_row(const RatVec& row) {
  if (rows_ == 0 && cols_ == 0) cols_ = static_cast<int>(row.size());
  if (static_cast<int>(row.size()) != cols_)
    throw std::invalid_argument("append_row: size mismatch");
  a_.insert(a_.end(), row.begin(), row.end());
  ++rows_;
}

RatVec RatMatrix::row(int i) const {
  return RatVec(a_.begin() + static_cast<size_t>(i) * cols_,
                a_.begin() + static_cast<size_t>(i + 1) * cols_);
}

RatMatrix RatMatrix::transposed() const {
  RatMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

// Clear denominators row by row (scaling a row does not change rank or row
// space membership questions asked of this matrix).
std::vector<std::vector<BigInt>> to_integer_rows(const RatMatrix& m) {
  std::vector<std::vector<BigInt>> rows(m.rows(), std::vector<BigInt>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    BigInt l = 1;
    for (int j = 0; j < m.cols(); ++j) l = lcm(l, denominator(m(i, j)));
    for (int j = 0; j < m.cols(); ++j)
      rows[i][j] = numerator(m(i, j)) * (l / denominator(m(i, j)));
  }
  return rows;
}

}  // namespace

int exact_rank(const RatMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  auto a = to_integer_rows(m);
  const int nr = m.rows(), nc = m.cols();
  BigInt prev = 1;
  int r = 0;
  for (int c = 0; c < nc && r < nr; ++c) {
    int piv = -1;
    for (int i = r; i < nr; ++i)
      if (a[i][c] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(a[r], a[piv]);
    for (int i = r + 1; i < nr; ++i) {
      for (int j = c + 1; j < nc; ++j)
        a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) / prev;  // exact division (Bareiss)
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

namespace {

// Exact rational RREF. Returns pivot column of each pivot row.
std::vector<int> rref_inplace(RatMatrix& a) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < a.rows(); ++i)
      if (a(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < a.cols(); ++j) std::swap(a(r, j), a(piv, j));
    const Rational inv = a(r, c);
    for (int j = c; j < a.cols(); ++j) a(r, j) /= inv;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (int j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::vector<RatVec> kernel_basis(const RatMatrix& m) {
  RatMatrix a = m;
  const std::vector<int> pivots = rref_inplace(a);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : pivots) is_pivot[c] = true;

  std::vector<RatVec> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RatVec v(m.cols(), Rational(0));
    v[free] = 1;
    for (size_t pr = 0; pr < pivots.size(); ++pr) v[pivots[pr]] = -a(static_cast<int>(pr), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

RatMatrix row_space_basis(const RatMatrix& m) {
  RatMatrix a = m;
  const std::vector<int> pivots = rref_inplace(a);
  RatMatrix b(0, m.cols());
  for (size_t i = 0; i < pivots.size(); ++i) b.append_row(a.row(static_cast<int>(i)));
  return b;
}

bool row_space_contains(const RatMatrix& space, const RatMatrix& sub) {
  if (sub.rows() == 0) return true;
  const int base = exact_rank(space);
  RatMatrix stacked = space;
  for (int i = 0; i < sub.rows(); ++i) stacked.append_row(sub.row(i));
  return exact_rank(stacked) == base;
}

namespace {

// Strict base-10 integer parse. cpp_int's string constructor treats leading
// zeros as octal, so digits are validated and normalized here.
BigInt parse_bigint(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  size_t pos = 0;
  bool neg = false;
  if (text[0] == '+' || text[0] == '-') {
    neg = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) throw std::invalid_argument("bad integer literal: " + text);
  while (pos + 1 < text.size() && text[pos] == '0') ++pos;  // strip leading zeros
  for (size_t i = pos; i < text.size(); ++i)
    if (text[i] < '0' || text[i] > '9')
      throw std::invalid_argument("bad integer literal: " + text);
  BigInt v(text.substr(pos));
  return neg ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt p = parse_bigint(text.substr(0, slash));
    const BigInt q = parse_bigint(text.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("rational with zero denominator: " + text);
    return Rational(p, q);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_bigint(text));
  // Finite decimal: sign, integer part, fraction part.
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const size_t frac_len = text.size() - dot - 1;
  if (frac_len == 0 || digits.empty()) throw std::invalid_argument("bad decimal literal: " + text);
  BigInt den = 1;
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  return Rational(parse_bigint(digits), den);
}

std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace carnot
