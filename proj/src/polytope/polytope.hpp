#pragma once

#include <array>
#include <optional>
#include <vector>

#include "exactmath/matrix.hpp"
#include "exactmath/multipoly.hpp"

namespace fastspline {

// normal . x <= offset, normal scaled to a primitive integer vector.
struct HalfSpace {
  RationalVector normal;
  Rational offset;
  bool operator==(const HalfSpace&) const = default;
  bool operator<(const HalfSpace& o) const;
};

// normal . x = offset, normal primitive integer with positive leading entry.
struct Hyperplane {
  RationalVector normal;
  Rational offset;
  bool operator==(const Hyperplane&) const = default;
  bool operator<(const Hyperplane& o) const;
};

HalfSpace make_halfspace(RationalVector normal, const Rational& offset);
Hyperplane make_hyperplane(RationalVector normal, const Rational& offset);
Hyperplane boundary_of(const HalfSpace& h);
Hyperplane translated(const Hyperplane& h, const RationalVector& t);

// Sign of normal.x - offset after the global symbolic perturbation
// x + delta*(1, eps, eps^2, ...): never zero.
int perturbed_side(const RationalVector& normal, const Rational& offset, const RationalVector& x);
// Lower-closed membership in a half-space under the same perturbation.
bool perturbed_inside(const HalfSpace& h, const RationalVector& x);

class ConvexPolytope {
 public:
  ConvexPolytope() = default;

  // Vertex enumeration from an H-description; empty or lower-dimensional
  // input yields an empty polytope. Unbounded input is an error.
  static ConvexPolytope from_halfspaces(std::size_t dim, const std::vector<HalfSpace>& hs);
  static ConvexPolytope box(const RationalVector& lo, const RationalVector& hi);
  // Both descriptions known to be consistent (possibly with redundant
  // half-spaces or duplicate vertices, which are dropped).
  static ConvexPolytope from_parts(std::size_t dim, std::vector<HalfSpace> hs, std::vector<RationalVector> vertices);
  static ConvexPolytope empty(std::size_t dim);

  std::size_t dim() const { return dim_; }
  bool is_empty() const { return vertices_.empty(); }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  const std::vector<RationalVector>& vertices() const { return vertices_; }

  bool contains(const RationalVector& x) const;
  bool contains_interior(const RationalVector& x) const;
  bool contains_perturbed(const RationalVector& x) const;

  RationalVector vertex_centroid() const;
  RationalVector lower_bound() const;
  RationalVector upper_bound() const;
  Rational volume() const;
  // Simplices as vertex index tuples (dim+1 each) covering the polytope.
  std::vector<std::vector<std::size_t>> triangulate() const;

  ConvexPolytope translate(const RationalVector& t) const;
  // Image under x -> A x + b for invertible A.
  ConvexPolytope transform(const RationalMatrix& a, const RationalVector& b) const;

  // Strictly crossed by the plane (vertices on both open sides).
  bool crossed_by(const Hyperplane& h) const;
  struct Split;
  Split split(const Hyperplane& h) const;

  bool operator==(const ConvexPolytope& o) const { return dim_ == o.dim_ && vertices_ == o.vertices_; }

 private:
  std::vector<std::vector<std::size_t>> tight_sets() const;

  std::size_t dim_ = 0;
  std::vector<HalfSpace> halfspaces_;      // sorted, irredundant
  std::vector<RationalVector> vertices_;   // sorted lexicographically
};

struct ConvexPolytope::Split {
  std::optional<ConvexPolytope> below;  // normal.x <= offset
  std::optional<ConvexPolytope> above;
};

ConvexPolytope minkowski_sum_segments(const std::vector<RationalVector>& directions);
bool polytopes_equal_upto_translation(const ConvexPolytope& p, const ConvexPolytope& q, const RationalVector& t);

struct ArrangementCell {
  ConvexPolytope cell;
  RationalVector witness;
};

struct Arrangement {
  ConvexPolytope ambient;
  std::vector<Hyperplane> cutters;
  std::vector<ArrangementCell> cells;
};

Arrangement build_arrangement(const ConvexPolytope& ambient, const std::vector<Hyperplane>& planes);

// Exact integral of p over the polytope.
Rational integrate(const MultiPoly& p, const ConvexPolytope& region);

}  // namespace fastspline
