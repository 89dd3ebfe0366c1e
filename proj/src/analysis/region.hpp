#pragma once

#include <cstdint>
#include <vector>

#include "spline/ppspline.hpp"

namespace fastspline {

struct SubRegion {
  ConvexPolytope cell;
  RationalVector witness;
  std::size_t class_id = 0;
  std::uint64_t code = 0;
  // Sites of the coset-0 sub-lattice D Z^s whose shifted support covers the
  // cell, with the weighted basis restricted to the cell, w_n(y) = W phi(y - n).
  std::vector<IntVector> sites;
  std::vector<MultiPoly> weights;
};

// Reflection of y into the octant box prod [0, d_i/2]: on every axis with
// y_i > d_i/2, y_i -> d_i - y_i and the site found for the folded point is
// renamed n_i -> site_reflect_i - n_i.
struct OctantFold {
  bool enabled = false;
  RationalVector center;
  IntVector site_reflect;
};

struct RegionOfEvaluation {
  std::size_t dim = 0;
  IntVector diagonal;
  std::vector<IntVector> coset_shifts;
  std::string lattice_name;
  std::string spline_name;
  bool sublattice_partition_of_unity = false;
  bool nonnegative = false;  // phi >= 0, which fetch grouping relies on
  OctantFold fold;

  // The evaluated box: prod [0, d_i), or the octant box when folded.
  ConvexPolytope box;
  std::vector<Hyperplane> planes;  // the Q cut planes
  std::vector<SubRegion> subregions;
  std::size_t classes = 0;         // translation classes under D Z^s
  std::size_t r = 1;
  std::vector<long long> sigma;    // code mod r -> sub-region index or -1

  std::size_t plane_count() const { return planes.size(); }
};

struct AnalysisOptions {
  // Reflect into the positive octant of the box before classifying; only
  // taken when the spline is symmetric under every axis reflection.
  bool fold = false;
};

RegionOfEvaluation enumerate_subregions(const SplineOnLattice& sol, const AnalysisOptions& opts = {});

// Bit i set when p_i . y >= d_i.
std::uint64_t region_code(const std::vector<Hyperplane>& planes, const RationalVector& y);

struct CodeTable {
  std::size_t r = 1;
  std::vector<long long> sigma;  // -1 marks unrealized residues
};

// Smallest r with code mod r injective on the realized codes.
CodeTable compress_code_table(const std::vector<std::uint64_t>& codes, const std::vector<std::size_t>& targets);

// Sub-region containing y (exact, lower-closed ties); y must lie in the box.
std::size_t classify(const RegionOfEvaluation& roe, const RationalVector& y);

// Whether phi is unchanged by x_j -> 2 c_j - x_j on every axis j.
bool has_axis_reflection_symmetry(const PiecewisePolySpline& spline, const RationalVector& center);

}  // namespace fastspline
