#include "analysis/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "common/error.hpp"
#include "exactmath/horner.hpp"

namespace fastspline {

std::vector<RationalMatrix> signed_permutation_group(std::size_t s) {
  std::vector<RationalMatrix> out;
  std::vector<std::size_t> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
      RationalMatrix m(s, s);
      for (std::size_t i = 0; i < s; ++i) m(i, perm[i]) = (mask >> i & 1) ? -1 : 1;
      out.push_back(std::move(m));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<long long> bipartite_matching(std::size_t left, std::size_t right,
                                          const std::vector<std::vector<std::size_t>>& edges) {
  std::vector<long long> match_left(left, -1), match_right(right, -1);
  std::vector<char> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t u) {
    for (std::size_t v : edges[u]) {
      if (visited[v]) continue;
      visited[v] = 1;
      if (match_right[v] < 0 || augment(static_cast<std::size_t>(match_right[v]))) {
        match_left[u] = static_cast<long long>(v);
        match_right[v] = static_cast<long long>(u);
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < left; ++u) {
    visited.assign(right, 0);
    augment(u);
  }
  return match_left;
}

namespace {

struct FloatWeights {
  std::vector<HornerProgram> programs;
  std::vector<double> eval(std::span<const double> y) const {
    std::vector<double> v;
    v.reserve(programs.size());
    for (const auto& p : programs) v.push_back(p.evaluate(y));
    return v;
  }
};

FloatWeights float_weights(const std::vector<MultiPoly>& ws) {
  FloatWeights f;
  for (const auto& w : ws) f.programs.push_back(horner_factor(w));
  return f;
}

bool same_multiset(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9 * (1 + std::abs(a[i]))) return false;
  return true;
}

RationalVector interior_probe(const ConvexPolytope& cell, std::uint64_t& state) {
  RationalVector p = zeros(cell.dim());
  long long total = 0;
  for (const auto& v : cell.vertices()) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    long long w = static_cast<long long>((state >> 33) % 13) + 1;
    p = add(p, scale(v, make_rational(w)));
    total += w;
  }
  return scale(p, make_rational(1, total));
}

std::vector<double> to_doubles(const RationalVector& v) {
  std::vector<double> out;
  for (const auto& q : v) out.push_back(to_double(q));
  return out;
}

// Exact validity of (A, b) against a kernel; the renaming comes from a
// perfect matching of identical polynomials.
std::optional<std::vector<IntVector>> match_sites(const Kernel& kernel, const SubRegion& target, const RationalMatrix& a,
                                                  const RationalVector& b) {
  std::map<MultiPoly, std::vector<std::size_t>> by_poly;
  for (std::size_t n = 0; n < target.weights.size(); ++n) by_poly[target.weights[n]].push_back(n);
  std::vector<std::vector<std::size_t>> edges(kernel.weights.size());
  for (std::size_t m = 0; m < kernel.weights.size(); ++m) {
    MultiPoly composed = poly_compose_affine(kernel.weights[m], a, b);
    auto it = by_poly.find(composed);
    if (it == by_poly.end()) return std::nullopt;
    edges[m] = it->second;
  }
  auto match = bipartite_matching(kernel.weights.size(), target.weights.size(), edges);
  std::vector<IntVector> site_map;
  for (long long v : match) {
    if (v < 0) return std::nullopt;
    site_map.push_back(target.sites[static_cast<std::size_t>(v)]);
  }
  return site_map;
}

void fit_affine(SubRegionTransform& t, const Kernel& kernel) {
  // pi(m) = A^{-1} m + p, the form seen for bases symmetric about their center.
  auto inv = inverse(t.a);
  if (!inv) return;
  RationalVector offset = sub(to_rational(t.site_map.front()), inv->apply(to_rational(kernel.sites.front())));
  for (std::size_t j = 0; j < kernel.sites.size(); ++j) {
    RationalVector img = add(inv->apply(to_rational(kernel.sites[j])), offset);
    if (img != to_rational(t.site_map[j])) return;
  }
  t.affine = true;
  t.p_linear = *inv;
  t.p_offset = offset;
}

}  // namespace

SymmetryAssignment search_symmetry(const RegionOfEvaluation& roe, const std::vector<RationalMatrix>& group) {
  std::size_t s = roe.dim;
  SymmetryAssignment sym;
  std::vector<FloatWeights> kernel_float;
  std::uint64_t state = 0x2545f4914f6cdd1dULL;
  for (std::size_t i = 0; i < roe.subregions.size(); ++i) {
    const SubRegion& sr = roe.subregions[i];
    RationalVector probe = interior_probe(sr.cell, state);
    std::vector<double> probe_d = to_doubles(probe);
    std::vector<double> target_values = float_weights(sr.weights).eval(probe_d);
    RationalVector centroid = sr.cell.vertex_centroid();

    std::optional<SubRegionTransform> found;
    for (std::size_t k = 0; k < sym.kernels.size() && !found; ++k) {
      const Kernel& kernel = sym.kernels[k];
      if (kernel.sites.size() != sr.sites.size()) continue;
      RationalVector ref_centroid = roe.subregions[kernel.reference].cell.vertex_centroid();
      for (const auto& a : group) {
        if (found) break;
        // Shift candidates: none, centroid alignment, and each site alignment.
        std::vector<RationalVector> shifts{zeros(s), sub(ref_centroid, a.apply(centroid))};
        RationalVector m0 = to_rational(kernel.sites.front());
        for (const auto& n : sr.sites) shifts.push_back(sub(m0, a.apply(to_rational(n))));
        std::sort(shifts.begin() + 2, shifts.end());
        shifts.erase(std::unique(shifts.begin() + 2, shifts.end()), shifts.end());
        std::vector<RationalVector> tried;
        for (const auto& b : shifts) {
          if (std::find(tried.begin(), tried.end(), b) != tried.end()) continue;
          tried.push_back(b);
          RationalVector mapped = add(a.apply(probe), b);
          if (!same_multiset(kernel_float[k].eval(to_doubles(mapped)), target_values)) continue;
          if (auto site_map = match_sites(kernel, sr, a, b)) {
            SubRegionTransform t;
            t.kernel = k;
            t.a = a;
            t.b = b;
            t.site_map = std::move(*site_map);
            fit_affine(t, kernel);
            found = std::move(t);
            break;
          }
        }
      }
    }
    if (!found) {
      Kernel kernel{i, sr.sites, sr.weights};
      SubRegionTransform t;
      t.kernel = sym.kernels.size();
      t.a = RationalMatrix::identity(s);
      t.b = zeros(s);
      t.site_map = sr.sites;
      fit_affine(t, kernel);
      kernel_float.push_back(float_weights(kernel.weights));
      sym.kernels.push_back(std::move(kernel));
      found = std::move(t);
    }
    sym.transforms.push_back(std::move(*found));
  }
  return sym;
}

bool verify_transform(const RegionOfEvaluation& roe, const SymmetryAssignment& sym, std::size_t subregion) {
  const SubRegion& sr = roe.subregions.at(subregion);
  const SubRegionTransform& t = sym.transforms.at(subregion);
  const Kernel& kernel = sym.kernels.at(t.kernel);
  if (kernel.sites.size() != sr.sites.size() || t.site_map.size() != kernel.sites.size()) return false;
  std::vector<char> used(sr.sites.size(), 0);
  for (std::size_t j = 0; j < kernel.sites.size(); ++j) {
    auto it = std::find(sr.sites.begin(), sr.sites.end(), t.site_map[j]);
    if (it == sr.sites.end()) return false;
    std::size_t n = static_cast<std::size_t>(it - sr.sites.begin());
    if (used[n]) return false;
    used[n] = 1;
    if (poly_compose_affine(kernel.weights[j], t.a, t.b) != sr.weights[n]) return false;
  }
  return true;
}

}  // namespace fastspline
