#pragma once

#include <memory>

#include "exactmath/matrix.hpp"
#include "polytope/polytope.hpp"

namespace fastspline {

class DirectionMatrix {
 public:
  DirectionMatrix() = default;
  explicit DirectionMatrix(std::vector<RationalVector> columns);
  static DirectionMatrix from_int_columns(const std::vector<IntVector>& columns);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return columns_.size(); }
  const std::vector<RationalVector>& columns() const { return columns_; }
  RationalMatrix matrix() const { return RationalMatrix::from_columns(columns_); }
  int degree() const { return static_cast<int>(columns_.size() - dim_); }

 private:
  std::size_t dim_ = 0;
  std::vector<RationalVector> columns_;
};

// Value of the box spline at x + delta*(1, eps, eps^2, ...) as delta -> 0+,
// which equals M(x) wherever M is continuous.
Rational boxspline_eval_exact(const DirectionMatrix& xi, const RationalVector& x);

// Reusable evaluator: directions merged by multiplicity, memoized recursion,
// scaled 128-bit integer arithmetic with an exact rational fallback.
class BoxSplineEvaluator {
 public:
  explicit BoxSplineEvaluator(const DirectionMatrix& xi);
  ~BoxSplineEvaluator();
  BoxSplineEvaluator(BoxSplineEvaluator&&) noexcept;

  Rational operator()(const RationalVector& x);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ConvexPolytope boxspline_support(const DirectionMatrix& xi);
// Planes spanned by s-1 independent columns, shifted by every sub-sum of
// columns, that cut through the support.
std::vector<Hyperplane> boxspline_mesh_planes(const DirectionMatrix& xi);
Arrangement boxspline_mesh(const DirectionMatrix& xi);

}  // namespace fastspline
