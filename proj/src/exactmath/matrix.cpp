#include "exactmath/matrix.hpp"

#include "common/error.hpp"

namespace fastspline {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<IntVector>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  RationalMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(ErrorKind::InvalidArgument, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = make_rational(rows[r][c]);
  }
  return m;
}

RationalMatrix RationalMatrix::from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
  std::vector<IntVector> v;
  for (auto& r : rows) v.emplace_back(r);
  return from_rows(v);
}

RationalMatrix RationalMatrix::from_columns(const std::vector<RationalVector>& cols) {
  std::size_t rows = cols.empty() ? 0 : cols[0].size();
  RationalMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) fail(ErrorKind::InvalidArgument, "ragged matrix columns");
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

RationalVector RationalMatrix::row(std::size_t r) const {
  return RationalVector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
}

RationalVector RationalMatrix::column(std::size_t c) const {
  RationalVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

RationalVector RationalMatrix::apply(const RationalVector& x) const {
  if (x.size() != cols_) fail(ErrorKind::InvalidArgument, "matrix-vector dimension mismatch");
  RationalVector out(rows_, Rational(0));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (sgn((*this)(r, c)) != 0) out[r] += (*this)(r, c) * x[c];
  return out;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) fail(ErrorKind::InvalidArgument, "matrix product dimension mismatch");
  RationalMatrix out(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(r, k);
      if (sgn(a) == 0) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  return out;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

bool RationalMatrix::is_integral() const {
  for (const auto& x : data_)
    if (!is_integer(x)) return false;
  return true;
}

bool RationalMatrix::is_signed_permutation() const {
  if (rows_ != cols_) return false;
  std::vector<bool> used(cols_, false);
  for (std::size_t r = 0; r < rows_; ++r) {
    int hits = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
      const Rational& a = (*this)(r, c);
      if (sgn(a) == 0) continue;
      if (abs(a) != 1 || used[c]) return false;
      used[c] = true;
      ++hits;
    }
    if (hits != 1) return false;
  }
  return true;
}

bool RationalMatrix::operator==(const RationalMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

namespace {

// Row echelon form in place; returns pivot columns.
std::vector<std::size_t> eliminate(RationalMatrix& m, Rational* det_sign = nullptr) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && sgn(m(p, col)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(p, c), m(row, c));
      if (det_sign) *det_sign = -*det_sign;
    }
    for (std::size_t r = row + 1; r < m.rows(); ++r) {
      if (sgn(m(r, col)) == 0) continue;
      Rational f = m(r, col) / m(row, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

Rational determinant(const RationalMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::InvalidArgument, "determinant of non-square matrix");
  RationalMatrix a = m;
  Rational sign = 1;
  auto pivots = eliminate(a, &sign);
  if (pivots.size() < a.rows()) return 0;
  Rational d = sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= a(i, i);
  return d;
}

std::size_t rank(const RationalMatrix& m) {
  RationalMatrix a = m;
  return eliminate(a).size();
}

std::size_t rank_of(const std::vector<RationalVector>& vectors) {
  if (vectors.empty()) return 0;
  RationalMatrix m(vectors.size(), vectors[0].size());
  for (std::size_t r = 0; r < vectors.size(); ++r)
    for (std::size_t c = 0; c < vectors[r].size(); ++c) m(r, c) = vectors[r][c];
  return rank(m);
}

std::optional<RationalMatrix> inverse(const RationalMatrix& m) {
  std::size_t n = m.rows();
  if (n != m.cols()) fail(ErrorKind::InvalidArgument, "inverse of non-square matrix");
  RationalMatrix a(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = m(r, c);
    a(r, n + r) = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && sgn(a(p, col)) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != col)
      for (std::size_t c = 0; c < 2 * n; ++c) std::swap(a(p, c), a(col, c));
    Rational inv = 1 / a(col, col);
    for (std::size_t c = 0; c < 2 * n; ++c) a(col, c) *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a(r, col)) == 0) continue;
      Rational f = a(r, col);
      for (std::size_t c = 0; c < 2 * n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  RationalMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = a(r, n + c);
  return out;
}

std::optional<RationalVector> solve(const RationalMatrix& m, const RationalVector& b) {
  std::size_t n = m.rows();
  if (n != m.cols() || b.size() != n) fail(ErrorKind::InvalidArgument, "solve dimension mismatch");
  RationalMatrix a(n, n + 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = m(r, c);
    a(r, n) = b[r];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && sgn(a(p, col)) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != col)
      for (std::size_t c = col; c <= n; ++c) std::swap(a(p, c), a(col, c));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (sgn(a(r, col)) == 0) continue;
      Rational f = a(r, col) / a(col, col);
      for (std::size_t c = col; c <= n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  RationalVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc = a(i, n);
    for (std::size_t c = i + 1; c < n; ++c) acc -= a(i, c) * x[c];
    x[i] = acc / a(i, i);
  }
  return x;
}

RationalVector orthogonal_complement(const std::vector<RationalVector>& vectors, std::size_t dim) {
  // Null space of the (k x dim) matrix; take the first free column.
  RationalMatrix a(vectors.size(), dim);
  for (std::size_t r = 0; r < vectors.size(); ++r)
    for (std::size_t c = 0; c < dim; ++c) a(r, c) = vectors[r][c];
  auto pivots = eliminate(a);
  if (pivots.size() + 1 != dim) fail(ErrorKind::InvalidArgument, "orthogonal complement needs rank dim-1");
  std::size_t free_col = 0;
  for (std::size_t c = 0, p = 0; c < dim; ++c) {
    if (p < pivots.size() && pivots[p] == c) {
      ++p;
      continue;
    }
    free_col = c;
    break;
  }
  RationalVector x(dim, Rational(0));
  x[free_col] = 1;
  for (std::size_t i = pivots.size(); i-- > 0;) {
    std::size_t pc = pivots[i];
    Rational acc = 0;
    for (std::size_t c = pc + 1; c < dim; ++c) acc -= a(i, c) * x[c];
    x[pc] = acc / a(i, pc);
  }
  return x;
}

std::string to_string(const RationalMatrix& m) {
  std::string out = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) out += "; ";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += m(r, c).get_str();
    }
  }
  return out + "]";
}

}  // namespace fastspline
