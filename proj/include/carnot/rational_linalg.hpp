#ifndef CARNOT_RATIONAL_LINALG_HPP
#define CARNOT_RATIONAL_LINALG_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace carnot {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using RatVec = std::vector<Rational>;

/// Dense matrix of exact rationals, row-major. Small sizes only (the algebras
/// this library targets have n <= a few dozen basis elements).
class RatMatrix {
public:
  RatMatrix() : rows_(0), cols_(0) {}
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  void append_row(const RatVec& row);
  RatVec row(int i) const;
  RatMatrix transposed() const;

  bool operator==(const RatMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

private:
  int rows_, cols_;
  std::vector<Rational> a_;
};

/// Rank by fraction-free (Bareiss) elimination on the denominator-cleared
/// integer matrix. Exact for any input.
int exact_rank(const RatMatrix& m);

/// Basis of the right null space {v : M v = 0}, via exact rational RREF.
/// Basis vectors are in the canonical free-column form (deterministic).
std::vector<RatVec> kernel_basis(const RatMatrix& m);

/// Reduced row echelon form; returns the nonzero rows (a canonical basis of
/// the row space).
RatMatrix row_space_basis(const RatMatrix& m);

/// True if the row space of `sub` is contained in the row space of `space`.
bool row_space_contains(const RatMatrix& space, const RatMatrix& sub);

Rational parse_rational(const std::string& text);  // "p/q", integer, or finite decimal
std::string to_string(const Rational& r);

inline bool is_zero_vec(const RatVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace carnot

#endif
