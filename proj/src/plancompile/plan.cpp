#include "plancompile/plan.hpp"

#include <algorithm>
#include <map>

#include "common/error.hpp"
#include "plancompile/exact_cover.hpp"

namespace fastspline {

std::size_t EvaluationPlan::nearest_fetches() const {
  std::size_t most = 0;
  for (const auto& sr : subregions) most = std::max(most, kernels.at(sr.kernel).sites.size());
  return most * coset_count();
}

std::size_t EvaluationPlan::scheduled_fetches() const {
  std::size_t most = 0;
  for (const auto& sr : subregions) most = std::max(most, kernels.at(sr.kernel).schedule.size());
  return most * coset_count();
}

namespace {

MultiPoly power(const MultiPoly& p, std::size_t k) {
  MultiPoly out = MultiPoly::constant(p.dim(), Rational(1));
  for (std::size_t i = 0; i < k; ++i) out = out * p;
  return out;
}

}  // namespace

void fill_group_polys(FetchGroup& group, const std::vector<MultiPoly>& weights) {
  std::size_t dim = weights.front().dim();
  group.g = MultiPoly(dim);
  for (std::size_t m : group.members) group.g += weights[m];
  group.numer.assign(group.axes.size(), MultiPoly(dim));
  for (std::size_t v = 0; v < group.members.size(); ++v)
    for (std::size_t a = 0; a < group.axes.size(); ++a)
      if (v >> a & 1) group.numer[a] += weights[group.members[v]];
}

namespace {

Rational probe_value(const MultiPoly& p, const RationalVector& x) { return p.evaluate(x); }

}  // namespace

bool group_identity_holds(const FetchGroup& group, const std::vector<MultiPoly>& weights) {
  std::size_t k = group.axes.size();
  if (group.members.size() != (std::size_t{1} << k)) return false;
  if (group.g.is_zero()) return false;
  if (k <= 1) return true;
  // Cheap rejection at one rational point before the polynomial products.
  std::size_t dim = group.g.dim();
  RationalVector x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = make_rational(static_cast<long long>(3 * i + 1), static_cast<long long>(7 + 2 * i));
  Rational gx = probe_value(group.g, x);
  std::vector<Rational> nx;
  for (const auto& n : group.numer) nx.push_back(probe_value(n, x));
  Rational gpow = 1;
  for (std::size_t i = 1; i < k; ++i) gpow *= gx;
  for (std::size_t v = 0; v < group.members.size(); ++v) {
    Rational rhs = 1;
    for (std::size_t a = 0; a < k; ++a) rhs *= (v >> a & 1) ? nx[a] : gx - nx[a];
    if (gpow * weights[group.members[v]].evaluate(x) != rhs) return false;
  }
  MultiPoly gp = power(group.g, k - 1);
  for (std::size_t v = 0; v < group.members.size(); ++v) {
    MultiPoly rhs = MultiPoly::constant(dim, Rational(1));
    for (std::size_t a = 0; a < k; ++a) rhs = rhs * ((v >> a & 1) ? group.numer[a] : group.g - group.numer[a]);
    if (gp * weights[group.members[v]] != rhs) return false;
  }
  return true;
}

std::optional<GroupImage> group_image(const EvaluationPlan& plan, const PlanSubRegion& sr, const FetchGroup& group) {
  std::size_t s = plan.dim;
  GroupImage img;
  img.base = sr.site_map.at(group.members[0]);
  std::vector<IntVector> delta;
  for (std::size_t a = 0; a < group.axes.size(); ++a) {
    const IntVector& corner = sr.site_map.at(group.members[std::size_t{1} << a]);
    IntVector d(s);
    int axis = -1;
    for (std::size_t i = 0; i < s; ++i) {
      d[i] = corner[i] - img.base[i];
      if (d[i] == 0) continue;
      if (axis >= 0 || (d[i] != plan.diagonal[i] && d[i] != -plan.diagonal[i])) return std::nullopt;
      axis = static_cast<int>(i);
    }
    if (axis < 0 || std::find(img.axis.begin(), img.axis.end(), axis) != img.axis.end()) return std::nullopt;
    img.axis.push_back(axis);
    img.sign.push_back(d[axis] > 0 ? 1 : -1);
    delta.push_back(std::move(d));
  }
  for (std::size_t v = 0; v < group.members.size(); ++v) {
    IntVector expect = img.base;
    for (std::size_t a = 0; a < delta.size(); ++a)
      if (v >> a & 1)
        for (std::size_t i = 0; i < s; ++i) expect[i] += delta[a][i];
    if (expect != sr.site_map.at(group.members[v])) return std::nullopt;
  }
  return img;
}

std::vector<FetchGroup> candidate_groups(const EvaluationPlan& plan, std::size_t kernel, bool allow_groups) {
  const PlanKernel& k = plan.kernels.at(kernel);
  std::size_t s = plan.dim;
  std::map<IntVector, std::size_t> index;
  for (std::size_t j = 0; j < k.sites.size(); ++j) index[k.sites[j]] = j;
  std::vector<const PlanSubRegion*> users;
  for (const auto& sr : plan.subregions)
    if (sr.kernel == kernel) users.push_back(&sr);

  std::vector<FetchGroup> out;
  std::size_t max_axes = allow_groups ? std::min<std::size_t>(3, s) : 0;
  // Larger groups first so they get the smaller ids.
  for (std::size_t width = max_axes + 1; width-- > 0;) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != width) continue;
      std::vector<int> axes;
      for (std::size_t i = 0; i < s; ++i)
        if (mask >> i & 1) axes.push_back(static_cast<int>(i));
      for (const auto& [base, base_index] : index) {
        FetchGroup g;
        g.axes = axes;
        bool complete = true;
        for (std::size_t v = 0; v < (std::size_t{1} << width) && complete; ++v) {
          IntVector site = base;
          for (std::size_t a = 0; a < width; ++a)
            if (v >> a & 1) site[axes[a]] += plan.diagonal[axes[a]];
          auto it = index.find(site);
          if (it == index.end()) complete = false;
          else g.members.push_back(it->second);
        }
        if (!complete) continue;
        fill_group_polys(g, k.weights);
        if (width > 0) {
          if (!group_identity_holds(g, k.weights)) continue;
          bool boxed = true;
          for (const auto* sr : users) boxed = boxed && group_image(plan, *sr, g).has_value();
          if (!boxed) continue;
        }
        out.push_back(std::move(g));
      }
    }
  }
  return out;
}

std::vector<FetchGroup> group_fetches(const EvaluationPlan& plan, std::size_t kernel, bool allow_groups) {
  const PlanKernel& k = plan.kernels.at(kernel);
  std::vector<FetchGroup> cands = candidate_groups(plan, kernel, allow_groups);
  std::vector<std::vector<std::size_t>> options;
  for (const auto& g : cands) options.push_back(g.members);
  ExactCoverResult cover = min_exact_cover(k.sites.size(), options);
  if (cover.options.empty()) fail(ErrorKind::Internal, "no exact cover of kernel sites");
  std::vector<FetchGroup> out;
  for (std::size_t o : cover.options) out.push_back(cands[o]);
  return out;
}

Footprint group_footprint(const EvaluationPlan& plan, std::size_t kernel, const FetchGroup& group) {
  const PlanKernel& k = plan.kernels.at(kernel);
  std::size_t s = plan.dim;
  // Sum of sites in cell units; its sign relative to count * cell points
  // toward the centroid.
  std::vector<long long> site_sum(s, 0);
  for (const auto& site : k.sites)
    for (std::size_t i = 0; i < s; ++i) site_sum[i] += site[i] / plan.diagonal[i];
  const IntVector& base = k.sites.at(group.members[0]);
  IntVector cell(s);
  std::vector<long long> step(s);
  for (std::size_t i = 0; i < s; ++i) {
    cell[i] = base[i] / plan.diagonal[i];
    bool spanned = std::find(group.axes.begin(), group.axes.end(), static_cast<int>(i)) != group.axes.end();
    long long toward = site_sum[i] - cell[i] * static_cast<long long>(k.sites.size());
    step[i] = spanned || toward >= 0 ? 1 : -1;
  }
  Footprint fp;
  for (std::size_t corner = 0; corner < (std::size_t{1} << s); ++corner) {
    IntVector t = cell;
    for (std::size_t i = 0; i < s; ++i)
      if (corner >> i & 1) t[i] += step[i];
    fp.insert(t);
  }
  return fp;
}

EvaluationPlan compile_plan(const RegionOfEvaluation& roe, const SymmetryAssignment& sym, const PlanOptions& opts) {
  if (sym.transforms.size() != roe.subregions.size()) fail(ErrorKind::Mismatch, "symmetry assignment does not match the region");
  EvaluationPlan plan;
  plan.dim = roe.dim;
  plan.lattice = roe.lattice_name;
  plan.spline = roe.spline_name;
  plan.diagonal = roe.diagonal;
  plan.coset_shifts = roe.coset_shifts;
  plan.classes = roe.classes;
  plan.fold = roe.fold.enabled;
  plan.fold_reflect = roe.fold.site_reflect;
  plan.options = opts;
  plan.options.fold = roe.fold.enabled;
  plan.planes = roe.planes;
  plan.r = roe.r;
  plan.sigma = roe.sigma;
  for (std::size_t i = 0; i < roe.subregions.size(); ++i) {
    const auto& t = sym.transforms[i];
    plan.subregions.push_back({t.kernel, roe.subregions[i].class_id, t.a, t.b, t.site_map});
  }
  for (const auto& k : sym.kernels) {
    PlanKernel pk;
    pk.reference = k.reference;
    pk.sites = k.sites;
    pk.weights = k.weights;
    plan.kernels.push_back(std::move(pk));
  }

  // Every code reachable from a point of the box must hit a realized slot.
  std::uint64_t state = 0x853c49e6748fea9bULL;
  std::size_t s = roe.dim;
  RationalVector hi = roe.box.upper_bound();
  for (int n = 0; n < 4000; ++n) {
    RationalVector y(s);
    for (std::size_t i = 0; i < s; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      y[i] = hi[i] * make_rational(static_cast<long long>(state >> 44), 1LL << 20);
    }
    long long j = roe.sigma[region_code(roe.planes, y) % roe.r];
    if (j < 0) fail(ErrorKind::Validation, "sigma sentinel reachable at " + to_string(y));
    if (!roe.subregions[static_cast<std::size_t>(j)].cell.contains(y))
      fail(ErrorKind::Validation, "sigma misclassifies " + to_string(y));
  }

  bool allow = opts.grouped && roe.nonnegative;
  for (std::size_t k = 0; k < plan.kernels.size(); ++k) {
    std::vector<FetchGroup> groups = group_fetches(plan, k, allow);
    std::vector<Footprint> fps;
    for (const auto& g : groups) fps.push_back(group_footprint(plan, k, g));
    FetchOrder order = order_fetches(fps);
    for (std::size_t o : order.order) plan.kernels[k].schedule.push_back(groups[o]);
    plan.kernels[k].ordering_cost = order.cost;
  }
  return plan;
}

EvaluationPlan compile_plan(const SplineOnLattice& sol, const PlanOptions& opts) {
  AnalysisOptions ao;
  ao.fold = opts.fold;
  RegionOfEvaluation roe = enumerate_subregions(sol, ao);
  std::vector<RationalMatrix> group =
      opts.symmetry ? signed_permutation_group(roe.dim) : std::vector<RationalMatrix>{RationalMatrix::identity(roe.dim)};
  SymmetryAssignment sym = search_symmetry(roe, group);
  return compile_plan(roe, sym, opts);
}

}  // namespace fastspline
