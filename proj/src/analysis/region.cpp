#include "analysis/region.hpp"

#include <map>
#include <numeric>
#include <set>

#include "common/error.hpp"

namespace fastspline {

namespace {

IntegerLattice sublattice(const IntVector& diagonal) {
  std::size_t s = diagonal.size();
  RationalMatrix g(s, s);
  for (std::size_t i = 0; i < s; ++i) g(i, i) = make_rational(diagonal[i]);
  return IntegerLattice("sub", g);
}

std::vector<IntVector> covering_sites(const PiecewisePolySpline& spline, const IntegerLattice& sublat, const RationalVector& w) {
  std::size_t s = w.size();
  RationalMatrix neg = RationalMatrix::identity(s);
  for (std::size_t i = 0; i < s; ++i) neg(i, i) = -1;
  ConvexPolytope region = spline.support().transform(neg, w);
  std::vector<IntVector> out;
  for (auto& n : lattice_sites_in_polytope(sublat, region))
    if (spline.support().contains_perturbed(sub(w, n))) out.push_back(std::move(n));
  return out;
}

// Cut planes: every breakpoint plane of phi shifted by D Z^s that passes
// through the open box.
std::vector<Hyperplane> cut_planes(const PiecewisePolySpline& spline, const IntVector& diagonal, const RationalVector& upper) {
  std::set<Hyperplane> out;
  for (const auto& h : spline.breakpoint_planes()) {
    Integer g = 0;
    Rational lo = 0, hi = 0;
    for (std::size_t i = 0; i < h.normal.size(); ++i) {
      Integer c = h.normal[i].get_num() * Integer(static_cast<long>(diagonal[i]));
      g = gcd(g, Integer(abs(c)));
      Rational end = h.normal[i] * upper[i];
      if (sgn(end) < 0) lo += end;
      else hi += end;
    }
    if (g == 0) continue;
    Rational step(g);
    Integer kmin = floor_of((lo - h.offset) / step) + 1;
    for (Integer k = kmin;; ++k) {
      Rational offset = h.offset + step * Rational(k);
      if (offset >= hi) break;
      if (offset > lo) out.insert(make_hyperplane(h.normal, offset));
    }
  }
  return {out.begin(), out.end()};
}

using ClassKey = std::vector<std::pair<IntVector, MultiPoly>>;

ClassKey class_key(const SubRegion& sr) {
  const IntVector& base = sr.sites.front();
  ClassKey key;
  for (std::size_t j = 0; j < sr.sites.size(); ++j) {
    IntVector rel(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) rel[i] = sr.sites[j][i] - base[i];
    key.emplace_back(std::move(rel), poly_translate(sr.weights[j], to_rational(base)));
  }
  std::sort(key.begin(), key.end());
  return key;
}

bool partition_of_unity_on(const PiecewisePolySpline& spline, const IntegerLattice& sublat, const Rational& weight) {
  const auto& pieces = spline.pieces();
  std::size_t step = std::max<std::size_t>(1, pieces.size() / 16);
  for (std::size_t k = 0; k < pieces.size(); k += step) {
    RationalVector w = pieces[k].region.vertex_centroid();
    Rational sum = 0;
    for (const auto& n : covering_sites(spline, sublat, w)) sum += spline.evaluate(sub(w, n));
    if (sum * weight != 1) return false;
  }
  return true;
}

}  // namespace

std::uint64_t region_code(const std::vector<Hyperplane>& planes, const RationalVector& y) {
  std::uint64_t q = 0;
  for (std::size_t i = 0; i < planes.size(); ++i)
    if (dot(planes[i].normal, y) >= planes[i].offset) q |= std::uint64_t{1} << i;
  return q;
}

CodeTable compress_code_table(const std::vector<std::uint64_t>& codes, const std::vector<std::size_t>& targets) {
  if (codes.size() != targets.size()) fail(ErrorKind::InvalidArgument, "code and target lists differ in length");
  std::map<std::uint64_t, std::size_t> seen;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    auto [it, fresh] = seen.emplace(codes[i], targets[i]);
    if (!fresh && it->second != targets[i]) fail(ErrorKind::InvalidArgument, "one code maps to two targets");
  }
  CodeTable t;
  if (seen.empty()) {
    t.sigma = {-1};
    return t;
  }
  std::uint64_t top = seen.rbegin()->first + 1;
  for (std::uint64_t r = seen.size();; ++r) {
    std::vector<long long> sigma(r, -1);
    bool ok = true;
    for (const auto& [code, target] : seen) {
      long long& slot = sigma[code % r];
      if (slot != -1) {
        ok = false;
        break;
      }
      slot = static_cast<long long>(target);
    }
    if (ok || r >= top) {
      t.r = r;
      t.sigma = std::move(sigma);
      return t;
    }
  }
}

bool has_axis_reflection_symmetry(const PiecewisePolySpline& spline, const RationalVector& center) {
  std::size_t s = spline.dim();
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto next = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<long long>((state >> 33) % 7) + 1;
  };
  for (const auto& piece : spline.pieces()) {
    std::vector<RationalVector> probes{piece.region.vertex_centroid()};
    for (int k = 0; k < 3; ++k) {
      RationalVector p = zeros(s);
      long long total = 0;
      for (const auto& v : piece.region.vertices()) {
        long long w = next();
        p = add(p, scale(v, make_rational(w)));
        total += w;
      }
      probes.push_back(scale(p, make_rational(1, total)));
    }
    for (const auto& p : probes) {
      Rational v = spline.evaluate(p);
      for (std::size_t j = 0; j < s; ++j) {
        RationalVector q = p;
        q[j] = 2 * center[j] - q[j];
        if (spline.evaluate(q) != v) return false;
      }
    }
  }
  return true;
}

RegionOfEvaluation enumerate_subregions(const SplineOnLattice& sol, const AnalysisOptions& opts) {
  const PiecewisePolySpline& phi = sol.spline;
  std::size_t s = phi.dim();
  if (s != sol.lattice.dim()) fail(ErrorKind::Mismatch, "spline and lattice dimensions differ");
  if (phi.pieces().empty()) fail(ErrorKind::Validation, "spline has no pieces");

  RegionOfEvaluation roe;
  roe.dim = s;
  roe.diagonal = sol.cosets.diagonal();
  roe.coset_shifts = sol.cosets.shifts();
  roe.lattice_name = sol.lattice.name();
  roe.spline_name = phi.name();
  roe.nonnegative = phi.nonnegative();

  IntegerLattice sublat = sublattice(roe.diagonal);
  roe.sublattice_partition_of_unity = partition_of_unity_on(phi, sublat, sol.weight * Rational(sol.cosets.size()));

  RationalVector upper(s);
  for (std::size_t i = 0; i < s; ++i) upper[i] = make_rational(roe.diagonal[i]);
  if (opts.fold) {
    // The mesh is mirror symmetric about the box center when phi is mirror
    // symmetric about a center c with 2 c_j a multiple of d_j.
    RationalVector c = phi.support().vertex_centroid();
    bool aligned = true;
    IntVector reflect(s);
    for (std::size_t j = 0; j < s; ++j) {
      Rational e = upper[j] - 2 * c[j];
      aligned = aligned && is_integer(e / upper[j]);
      if (aligned) reflect[j] = to_int64(e.get_num());
    }
    if (aligned && has_axis_reflection_symmetry(phi, c)) {
      roe.fold.enabled = true;
      roe.fold.center = scale(upper, make_rational(1, 2));
      roe.fold.site_reflect = std::move(reflect);
      upper = roe.fold.center;
    }
  }
  roe.box = ConvexPolytope::box(zeros(s), upper);
  roe.planes = cut_planes(phi, roe.diagonal, upper);
  if (roe.planes.size() > 63) fail(ErrorKind::Budget, "more than 63 cut planes");

  Arrangement arr = build_arrangement(roe.box, roe.planes);
  std::map<ClassKey, std::size_t> class_ids;
  std::vector<std::uint64_t> codes;
  std::vector<std::size_t> targets;
  for (auto& cell : arr.cells) {
    SubRegion sr;
    sr.cell = std::move(cell.cell);
    sr.witness = std::move(cell.witness);
    sr.code = region_code(roe.planes, sr.witness);
    sr.sites = covering_sites(phi, sublat, sr.witness);
    if (sr.sites.empty()) fail(ErrorKind::Validation, "sub-region with no contributing sites");
    for (const auto& n : sr.sites) {
      auto piece = phi.locate(sub(sr.witness, n));
      if (!piece) fail(ErrorKind::Internal, "covering site outside every piece");
      RationalVector shift = to_rational(n);
      sr.weights.push_back(poly_translate(phi.pieces()[*piece].poly, scale(shift, Rational(-1))) * sol.weight);
    }
    auto [it, fresh] = class_ids.emplace(class_key(sr), class_ids.size());
    sr.class_id = it->second;
    codes.push_back(sr.code);
    targets.push_back(roe.subregions.size());
    roe.subregions.push_back(std::move(sr));
  }
  roe.classes = class_ids.size();
  CodeTable table = compress_code_table(codes, targets);
  roe.r = table.r;
  roe.sigma = std::move(table.sigma);
  return roe;
}

std::size_t classify(const RegionOfEvaluation& roe, const RationalVector& y) {
  long long j = roe.sigma[region_code(roe.planes, y) % roe.r];
  if (j < 0) fail(ErrorKind::Internal, "unrealized region code at " + to_string(y));
  return static_cast<std::size_t>(j);
}

}  // namespace fastspline
