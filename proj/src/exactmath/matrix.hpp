#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

#include "exactmath/rational.hpp"

namespace fastspline {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);

  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_rows(const std::vector<IntVector>& rows);
  static RationalMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows);
  static RationalMatrix from_columns(const std::vector<RationalVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalVector row(std::size_t r) const;
  RationalVector column(std::size_t c) const;
  RationalVector apply(const RationalVector& x) const;
  RationalMatrix operator*(const RationalMatrix& other) const;
  RationalMatrix transpose() const;
  bool is_integral() const;
  bool is_signed_permutation() const;

  bool operator==(const RationalMatrix& other) const;
  bool operator!=(const RationalMatrix& other) const { return !(*this == other); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

Rational determinant(const RationalMatrix& m);
std::size_t rank(const RationalMatrix& m);
std::size_t rank_of(const std::vector<RationalVector>& vectors);
std::optional<RationalMatrix> inverse(const RationalMatrix& m);
// Unique solution of a square nonsingular system, nullopt when singular.
std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b);
// A nonzero vector orthogonal to all given vectors, which must have rank dim-1.
RationalVector orthogonal_complement(const std::vector<RationalVector>& vectors, std::size_t dim);

std::string to_string(const RationalMatrix& m);

}  // namespace fastspline
