#pragma once

#include "analysis/region.hpp"

namespace fastspline {

// A reference sub-region's contributing sites and weight polynomials; every
// sub-region assigned to the kernel is evaluated through it.
struct Kernel {
  std::size_t reference = 0;
  std::vector<IntVector> sites;
  std::vector<MultiPoly> weights;
};

// Sub-region i is evaluated as
//   psi_i(y, k) = sum_j c[site_map[j] + k] * w_j(A y + b)
// where w_j are the kernel's weights. In the T, t notation, A = T and b = -t.
struct SubRegionTransform {
  std::size_t kernel = 0;
  RationalMatrix a;
  RationalVector b;
  std::vector<IntVector> site_map;
  // site_map[j] = P m_j + p when the renaming is affine.
  bool affine = false;
  RationalMatrix p_linear;
  RationalVector p_offset;
};

struct SymmetryAssignment {
  std::vector<Kernel> kernels;
  std::vector<SubRegionTransform> transforms;  // one per sub-region
};

// All 2^s s! signed permutation matrices, identity first.
std::vector<RationalMatrix> signed_permutation_group(std::size_t s);

SymmetryAssignment search_symmetry(const RegionOfEvaluation& roe, const std::vector<RationalMatrix>& group);

// Exact check of one sub-region's assignment: composed kernel weights equal
// the sub-region's weights site by site.
bool verify_transform(const RegionOfEvaluation& roe, const SymmetryAssignment& sym, std::size_t subregion);

// Maximum bipartite matching by augmenting paths, left vertices in order.
// Returns match[left] = right or -1.
std::vector<long long> bipartite_matching(std::size_t left, std::size_t right,
                                          const std::vector<std::vector<std::size_t>>& edges);

}  // namespace fastspline
