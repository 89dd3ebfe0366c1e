#pragma once

#include <string>
#include <vector>

#include "analysis/symmetry.hpp"
#include "exactmath/horner.hpp"
#include "plancompile/ordering.hpp"

namespace fastspline {

// One texture read on coset memory. A singleton is a nearest fetch; a group
// spanning axes J reads the 2^|J| sites base + sum_{a in J'} d_a e_a with one
// multilinear fetch, scaled by g and steered by u_a = numer_a / g.
struct FetchGroup {
  std::vector<std::size_t> members;  // kernel site indices, corner bitmask order
  std::vector<int> axes;             // kernel-frame axes, ascending
  MultiPoly g;
  std::vector<MultiPoly> numer;
  bool operator==(const FetchGroup&) const = default;
};

struct PlanKernel {
  std::size_t reference = 0;
  std::vector<IntVector> sites;
  std::vector<MultiPoly> weights;
  std::vector<FetchGroup> schedule;  // in fetch order
  std::size_t ordering_cost = 0;
  bool operator==(const PlanKernel&) const = default;
};

struct PlanSubRegion {
  std::size_t kernel = 0;
  std::size_t class_id = 0;
  RationalMatrix a;
  RationalVector b;
  std::vector<IntVector> site_map;
  bool operator==(const PlanSubRegion&) const = default;
};

struct PlanOptions {
  bool grouped = false;
  bool predication = true;
  bool half_texel = false;
  bool fold = false;
  bool symmetry = true;
  bool operator==(const PlanOptions&) const = default;
};

struct EvaluationPlan {
  std::size_t dim = 0;
  std::string lattice;
  std::string spline;
  IntVector diagonal;
  std::vector<IntVector> coset_shifts;
  std::size_t classes = 0;
  bool fold = false;
  IntVector fold_reflect;
  PlanOptions options;
  std::vector<Hyperplane> planes;
  std::size_t r = 1;
  std::vector<long long> sigma;
  std::vector<PlanSubRegion> subregions;
  std::vector<PlanKernel> kernels;

  std::size_t coset_count() const { return coset_shifts.size(); }
  std::size_t plane_count() const { return planes.size(); }
  // Nearest fetches per reconstruction, summed over cosets.
  std::size_t nearest_fetches() const;
  // Fetch instructions per reconstruction for the sub-region's kernel,
  // maximized over sub-regions and summed over cosets.
  std::size_t scheduled_fetches() const;
  bool operator==(const EvaluationPlan&) const = default;
};

EvaluationPlan compile_plan(const RegionOfEvaluation& roe, const SymmetryAssignment& sym, const PlanOptions& opts);
// Full pipeline from a spline on a lattice.
EvaluationPlan compile_plan(const SplineOnLattice& sol, const PlanOptions& opts);

// Candidate groups of a kernel: every axis-aligned point, edge, square or cube
// of its sites whose weights admit the multilinear factorization and whose
// image stays an axis-aligned box in every sub-region using the kernel.
std::vector<FetchGroup> candidate_groups(const EvaluationPlan& plan, std::size_t kernel, bool allow_groups);
// Minimum exact cover of the kernel's sites by candidate groups.
std::vector<FetchGroup> group_fetches(const EvaluationPlan& plan, std::size_t kernel, bool allow_groups);
// Cells of coset memory, in kernel frame, touched by a fetch: the 2^s block
// holding the group, stretched toward the kernel's site centroid on axes the
// group does not span.
Footprint group_footprint(const EvaluationPlan& plan, std::size_t kernel, const FetchGroup& group);

// Sets g and numer from the member weights.
void fill_group_polys(FetchGroup& group, const std::vector<MultiPoly>& weights);
// Checks the group identity g^{|J|-1} w_v = prod_a M_a(v_a) exactly.
bool group_identity_holds(const FetchGroup& group, const std::vector<MultiPoly>& weights);

// Image of a group under a sub-region's renaming (and no fold): base cell and
// per group axis the signed memory axis. Empty when not an axis-aligned box.
struct GroupImage {
  IntVector base;                // site of corner 0 in the sub-region frame
  std::vector<int> axis;         // memory axis per group axis
  std::vector<int> sign;         // +1 or -1
};
std::optional<GroupImage> group_image(const EvaluationPlan& plan, const PlanSubRegion& sr, const FetchGroup& group);

}  // namespace fastspline
