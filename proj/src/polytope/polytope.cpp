#include "polytope/polytope.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "common/error.hpp"

namespace fastspline {

bool HalfSpace::operator<(const HalfSpace& o) const {
  if (normal != o.normal) return normal < o.normal;
  return offset < o.offset;
}

bool Hyperplane::operator<(const Hyperplane& o) const {
  if (normal != o.normal) return normal < o.normal;
  return offset < o.offset;
}

HalfSpace make_halfspace(RationalVector normal, const Rational& offset) {
  if (is_zero(normal)) fail(ErrorKind::InvalidArgument, "half-space with zero normal");
  Rational f = make_primitive(normal);
  return {std::move(normal), offset * f};
}

Hyperplane make_hyperplane(RationalVector normal, const Rational& offset) {
  if (is_zero(normal)) fail(ErrorKind::InvalidArgument, "hyperplane with zero normal");
  Rational f = make_primitive(normal);
  Rational d = offset * f;
  auto lead = std::find_if(normal.begin(), normal.end(), [](const Rational& q) { return sgn(q) != 0; });
  if (sgn(*lead) < 0) {
    for (auto& x : normal) x = -x;
    d = -d;
  }
  return {std::move(normal), d};
}

Hyperplane boundary_of(const HalfSpace& h) { return make_hyperplane(h.normal, h.offset); }

Hyperplane translated(const Hyperplane& h, const RationalVector& t) { return {h.normal, h.offset + dot(h.normal, t)}; }

int perturbed_side(const RationalVector& normal, const Rational& offset, const RationalVector& x) {
  int s = sgn(dot(normal, x) - offset);
  if (s != 0) return s;
  for (const auto& p : normal)
    if (sgn(p) != 0) return sgn(p);
  fail(ErrorKind::InvalidArgument, "zero normal");
}

bool perturbed_inside(const HalfSpace& h, const RationalVector& x) {
  return perturbed_side(h.normal, h.offset, x) < 0;
}

namespace {

std::size_t affine_rank(const std::vector<RationalVector>& pts, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0;
  std::vector<RationalVector> diffs;
  for (std::size_t i = 1; i < idx.size(); ++i) diffs.push_back(sub(pts[idx[i]], pts[idx[0]]));
  return rank_of(diffs);
}

bool on_plane(const HalfSpace& h, const RationalVector& v) { return dot(h.normal, v) == h.offset; }

std::vector<RationalVector> enumerate_vertices(std::size_t s, const std::vector<HalfSpace>& hs) {
  std::vector<RationalVector> out;
  if (hs.size() < s) return out;
  std::vector<std::size_t> pick(s);
  for (std::size_t i = 0; i < s; ++i) pick[i] = i;
  while (true) {
    RationalMatrix a(s, s);
    RationalVector b(s);
    for (std::size_t r = 0; r < s; ++r) {
      for (std::size_t c = 0; c < s; ++c) a(r, c) = hs[pick[r]].normal[c];
      b[r] = hs[pick[r]].offset;
    }
    if (auto x = solve(a, b)) {
      bool ok = true;
      for (const auto& h : hs)
        if (dot(h.normal, *x) > h.offset) {
          ok = false;
          break;
        }
      if (ok) out.push_back(std::move(*x));
    }
    std::size_t i = s;
    while (i > 0 && pick[i - 1] == hs.size() - s + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < s; ++j) pick[j] = pick[j - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ConvexPolytope ConvexPolytope::empty(std::size_t dim) {
  ConvexPolytope p;
  p.dim_ = dim;
  return p;
}

ConvexPolytope ConvexPolytope::from_parts(std::size_t dim, std::vector<HalfSpace> hs, std::vector<RationalVector> vertices) {
  ConvexPolytope p;
  p.dim_ = dim;
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (vertices.size() < dim + 1) return empty(dim);
  std::vector<std::size_t> all(vertices.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (affine_rank(vertices, all) < dim) return empty(dim);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  for (auto& h : hs) {
    std::vector<std::size_t> tight;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (on_plane(h, vertices[i])) tight.push_back(i);
    if (tight.size() >= dim && affine_rank(vertices, tight) + 1 == dim) p.halfspaces_.push_back(h);
  }
  p.vertices_ = std::move(vertices);
  return p;
}

ConvexPolytope ConvexPolytope::from_halfspaces(std::size_t dim, const std::vector<HalfSpace>& input) {
  std::vector<HalfSpace> hs;
  for (const auto& h : input) {
    if (h.normal.size() != dim) fail(ErrorKind::InvalidArgument, "half-space dimension mismatch");
    hs.push_back(make_halfspace(h.normal, h.offset));
  }
  auto verts = enumerate_vertices(dim, hs);
  if (verts.empty()) return empty(dim);
  // Bounded iff a slightly larger bounding box adds no new vertices.
  std::vector<HalfSpace> boxed = hs;
  for (std::size_t i = 0; i < dim; ++i) {
    Rational lo = verts[0][i], hi = verts[0][i];
    for (const auto& v : verts) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
    RationalVector e(dim, Rational(0));
    e[i] = 1;
    boxed.push_back(make_halfspace(e, hi + 1));
    e[i] = -1;
    boxed.push_back(make_halfspace(e, -(lo - 1)));
  }
  if (enumerate_vertices(dim, boxed) != verts) fail(ErrorKind::Validation, "polytope is unbounded");
  return from_parts(dim, std::move(hs), std::move(verts));
}

ConvexPolytope ConvexPolytope::box(const RationalVector& lo, const RationalVector& hi) {
  std::size_t s = lo.size();
  std::vector<HalfSpace> hs;
  for (std::size_t i = 0; i < s; ++i) {
    if (lo[i] >= hi[i]) return empty(s);
    RationalVector e(s, Rational(0));
    e[i] = 1;
    hs.push_back(make_halfspace(e, hi[i]));
    e[i] = -1;
    hs.push_back(make_halfspace(e, -lo[i]));
  }
  std::vector<RationalVector> verts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
    RationalVector v(s);
    for (std::size_t i = 0; i < s; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    verts.push_back(std::move(v));
  }
  return from_parts(s, std::move(hs), std::move(verts));
}

bool ConvexPolytope::contains(const RationalVector& x) const {
  if (is_empty()) return false;
  for (const auto& h : halfspaces_)
    if (dot(h.normal, x) > h.offset) return false;
  return true;
}

bool ConvexPolytope::contains_interior(const RationalVector& x) const {
  if (is_empty()) return false;
  for (const auto& h : halfspaces_)
    if (dot(h.normal, x) >= h.offset) return false;
  return true;
}

bool ConvexPolytope::contains_perturbed(const RationalVector& x) const {
  if (is_empty()) return false;
  for (const auto& h : halfspaces_)
    if (!perturbed_inside(h, x)) return false;
  return true;
}

RationalVector ConvexPolytope::vertex_centroid() const {
  RationalVector c(dim_, Rational(0));
  for (const auto& v : vertices_)
    for (std::size_t i = 0; i < dim_; ++i) c[i] += v[i];
  for (auto& x : c) x /= static_cast<long>(vertices_.size());
  return c;
}

RationalVector ConvexPolytope::lower_bound() const {
  RationalVector lo = vertices_.at(0);
  for (const auto& v : vertices_)
    for (std::size_t i = 0; i < dim_; ++i) lo[i] = std::min(lo[i], v[i]);
  return lo;
}

RationalVector ConvexPolytope::upper_bound() const {
  RationalVector hi = vertices_.at(0);
  for (const auto& v : vertices_)
    for (std::size_t i = 0; i < dim_; ++i) hi[i] = std::max(hi[i], v[i]);
  return hi;
}

std::vector<std::vector<std::size_t>> ConvexPolytope::tight_sets() const {
  std::vector<std::vector<std::size_t>> out(vertices_.size());
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    for (std::size_t h = 0; h < halfspaces_.size(); ++h)
      if (on_plane(halfspaces_[h], vertices_[v])) out[v].push_back(h);
  return out;
}

std::vector<std::vector<std::size_t>> ConvexPolytope::triangulate() const {
  std::vector<std::vector<std::size_t>> out;
  if (is_empty()) return out;
  // on[h][v]: vertex v lies on the boundary of half-space h.
  std::vector<std::vector<bool>> on(halfspaces_.size(), std::vector<bool>(vertices_.size(), false));
  for (std::size_t h = 0; h < halfspaces_.size(); ++h)
    for (std::size_t v = 0; v < vertices_.size(); ++v) on[h][v] = on_plane(halfspaces_[h], vertices_[v]);
  std::vector<std::size_t> prefix;
  // Pulling triangulation: cone from the lowest vertex over every facet
  // that avoids it, recursively.
  std::function<void(const std::vector<std::size_t>&, std::size_t)> rec = [&](const std::vector<std::size_t>& face,
                                                                              std::size_t k) {
    std::size_t apex = face[0];
    if (k == 0) {
      auto simplex = prefix;
      simplex.push_back(apex);
      out.push_back(std::move(simplex));
      return;
    }
    std::set<std::vector<std::size_t>> facets;
    for (std::size_t h = 0; h < halfspaces_.size(); ++h) {
      if (on[h][apex]) continue;
      std::vector<std::size_t> w;
      for (std::size_t v : face)
        if (on[h][v]) w.push_back(v);
      if (w.size() < k || w.size() == face.size()) continue;
      if (affine_rank(vertices_, w) + 1 != k) continue;
      facets.insert(std::move(w));
    }
    prefix.push_back(apex);
    for (const auto& w : facets) rec(w, k - 1);
    prefix.pop_back();
  };
  std::vector<std::size_t> all(vertices_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  rec(all, dim_);
  return out;
}

Rational ConvexPolytope::volume() const {
  Rational vol = 0;
  Integer fact = 1;
  for (std::size_t i = 2; i <= dim_; ++i) fact *= static_cast<unsigned long>(i);
  for (const auto& simplex : triangulate()) {
    RationalMatrix m(dim_, dim_);
    for (std::size_t j = 1; j <= dim_; ++j)
      for (std::size_t i = 0; i < dim_; ++i) m(i, j - 1) = vertices_[simplex[j]][i] - vertices_[simplex[0]][i];
    vol += abs(determinant(m));
  }
  return vol / Rational(fact);
}

ConvexPolytope ConvexPolytope::translate(const RationalVector& t) const {
  if (is_empty()) return *this;
  ConvexPolytope p;
  p.dim_ = dim_;
  for (const auto& h : halfspaces_) p.halfspaces_.push_back({h.normal, h.offset + dot(h.normal, t)});
  for (const auto& v : vertices_) p.vertices_.push_back(add(v, t));
  // Translation preserves both orders.
  return p;
}

ConvexPolytope ConvexPolytope::transform(const RationalMatrix& a, const RationalVector& b) const {
  if (is_empty()) return *this;
  auto inv = inverse(a);
  if (!inv) fail(ErrorKind::InvalidArgument, "singular polytope transform");
  // p.x <= d with x = A^{-1}(y - b)  =>  (A^{-T} p).y <= d + (A^{-T} p).b
  RationalMatrix it = inv->transpose();
  std::vector<HalfSpace> hs;
  for (const auto& h : halfspaces_) {
    RationalVector n = it.apply(h.normal);
    hs.push_back(make_halfspace(n, h.offset + dot(n, b)));
  }
  std::vector<RationalVector> verts;
  for (const auto& v : vertices_) verts.push_back(add(a.apply(v), b));
  return from_parts(dim_, std::move(hs), std::move(verts));
}

bool ConvexPolytope::crossed_by(const Hyperplane& h) const {
  bool neg = false, pos = false;
  for (const auto& v : vertices_) {
    int s = sgn(dot(h.normal, v) - h.offset);
    if (s < 0) neg = true;
    if (s > 0) pos = true;
    if (neg && pos) return true;
  }
  return false;
}

ConvexPolytope::Split ConvexPolytope::split(const Hyperplane& h) const {
  Split out;
  if (is_empty()) return out;
  std::vector<Rational> val(vertices_.size());
  bool neg = false, pos = false;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    val[i] = dot(h.normal, vertices_[i]) - h.offset;
    if (sgn(val[i]) < 0) neg = true;
    if (sgn(val[i]) > 0) pos = true;
  }
  if (!pos) {
    out.below = *this;
    return out;
  }
  if (!neg) {
    out.above = *this;
    return out;
  }
  auto tight = tight_sets();
  std::vector<RationalVector> below, above;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (sgn(val[i]) <= 0) below.push_back(vertices_[i]);
    if (sgn(val[i]) >= 0) above.push_back(vertices_[i]);
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (sgn(val[i]) >= 0) continue;
    for (std::size_t j = 0; j < vertices_.size(); ++j) {
      if (sgn(val[j]) <= 0) continue;
      std::vector<std::size_t> common;
      std::set_intersection(tight[i].begin(), tight[i].end(), tight[j].begin(), tight[j].end(),
                            std::back_inserter(common));
      if (common.size() + 1 < dim_) continue;
      std::vector<RationalVector> normals;
      for (std::size_t k : common) normals.push_back(halfspaces_[k].normal);
      if (rank_of(normals) + 1 != dim_) continue;
      Rational lambda = val[i] / (val[i] - val[j]);
      RationalVector p = add(vertices_[i], scale(sub(vertices_[j], vertices_[i]), lambda));
      below.push_back(p);
      above.push_back(std::move(p));
    }
  }
  std::vector<HalfSpace> hb = halfspaces_, ha = halfspaces_;
  hb.push_back(make_halfspace(h.normal, h.offset));
  ha.push_back(make_halfspace(scale(h.normal, -1), -h.offset));
  auto b = from_parts(dim_, std::move(hb), std::move(below));
  auto a = from_parts(dim_, std::move(ha), std::move(above));
  if (!b.is_empty()) out.below = std::move(b);
  if (!a.is_empty()) out.above = std::move(a);
  return out;
}

ConvexPolytope minkowski_sum_segments(const std::vector<RationalVector>& dirs) {
  if (dirs.empty()) fail(ErrorKind::InvalidArgument, "no directions");
  std::size_t s = dirs[0].size();
  if (rank_of(dirs) != s) fail(ErrorKind::InvalidArgument, "directions do not span");
  std::size_t n = dirs.size();
  std::vector<HalfSpace> hs;
  if (s == 1) {
    Rational lo = 0, hi = 0;
    for (const auto& d : dirs) (sgn(d[0]) > 0 ? hi : lo) += d[0];
    return ConvexPolytope::box({lo}, {hi});
  }
  // Facet normals come from (s-1)-subsets of rank s-1.
  std::set<RationalVector> normals;
  std::vector<std::size_t> pick(s - 1);
  for (std::size_t i = 0; i + 1 < s; ++i) pick[i] = i;
  while (pick.size() <= n) {
    std::vector<RationalVector> sub;
    for (auto k : pick) sub.push_back(dirs[k]);
    if (rank_of(sub) + 1 == s) normals.insert(make_hyperplane(orthogonal_complement(sub, s), 0).normal);
    std::size_t i = s - 1;
    while (i > 0 && pick[i - 1] == n - (s - 1) + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j + 1 < s; ++j) pick[j] = pick[j - 1] + 1;
  }
  for (const auto& nm : normals) {
    Rational hi = 0, lo = 0;
    for (const auto& d : dirs) {
      Rational v = dot(nm, d);
      (sgn(v) > 0 ? hi : lo) += v;
    }
    hs.push_back(make_halfspace(nm, hi));
    hs.push_back(make_halfspace(scale(nm, -1), -lo));
  }
  // A candidate sum is a vertex iff its tight normals have full rank.
  std::set<RationalVector> candidates;
  if (n > 24) fail(ErrorKind::Budget, "too many directions for zonotope vertex enumeration");
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    RationalVector v(s, Rational(0));
    for (std::size_t k = 0; k < n; ++k)
      if ((mask >> k) & 1)
        for (std::size_t i = 0; i < s; ++i) v[i] += dirs[k][i];
    candidates.insert(std::move(v));
  }
  std::vector<RationalVector> verts;
  for (const auto& v : candidates) {
    std::vector<RationalVector> tight;
    for (const auto& h : hs)
      if (on_plane(h, v)) tight.push_back(h.normal);
    if (rank_of(tight) == s) verts.push_back(v);
  }
  return ConvexPolytope::from_parts(s, std::move(hs), std::move(verts));
}

bool polytopes_equal_upto_translation(const ConvexPolytope& p, const ConvexPolytope& q, const RationalVector& t) {
  if (p.dim() != q.dim() || p.vertices().size() != q.vertices().size()) return false;
  if (p.is_empty()) return q.is_empty();
  for (std::size_t i = 0; i < p.vertices().size(); ++i)
    if (add(p.vertices()[i], t) != q.vertices()[i]) return false;
  return true;
}

Arrangement build_arrangement(const ConvexPolytope& ambient, const std::vector<Hyperplane>& planes) {
  Arrangement arr;
  arr.ambient = ambient;
  arr.cutters = planes;
  std::vector<ConvexPolytope> cells;
  if (!ambient.is_empty()) cells.push_back(ambient);
  for (const auto& h : planes) {
    std::vector<ConvexPolytope> next;
    next.reserve(cells.size());
    for (auto& c : cells) {
      if (!c.crossed_by(h)) {
        next.push_back(std::move(c));
        continue;
      }
      auto parts = c.split(h);
      if (parts.below) next.push_back(std::move(*parts.below));
      if (parts.above) next.push_back(std::move(*parts.above));
    }
    cells = std::move(next);
  }
  for (auto& c : cells) {
    RationalVector w = c.vertex_centroid();
    arr.cells.push_back({std::move(c), std::move(w)});
  }
  return arr;
}

namespace {

// Grundmann-Moeller rule of odd degree 2m+1 on the simplex with vertices v.
Rational integrate_simplex(const MultiPoly& p, const std::vector<RationalVector>& v) {
  std::size_t n = v.size() - 1;
  int deg = p.degree();
  int m = deg <= 1 ? 0 : (deg) / 2;
  int d = 2 * m + 1;
  RationalMatrix jac(n, n);
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = 0; i < n; ++i) jac(i, j - 1) = v[j][i] - v[0][i];
  Rational det = abs(determinant(jac));
  auto factorial = [](long k) {
    Integer f = 1;
    for (long i = 2; i <= k; ++i) f *= i;
    return f;
  };
  Rational total = 0;
  for (int i = 0; i <= m; ++i) {
    long denom = d + static_cast<long>(n) - 2 * i;
    Integer pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), denom, d);
    Integer four;
    mpz_ui_pow_ui(four.get_mpz_t(), 2, 2 * m);
    Rational w = make_rational(pw, four * factorial(i) * factorial(d + static_cast<long>(n) - i));
    if (i % 2) w = -w;
    // beta in N^{n+1} with |beta| = m - i
    Rational inner = 0;
    std::vector<int> beta(n + 1, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
      if (k == n) {
        beta[n] = left;
        RationalVector x(n, Rational(0));
        for (std::size_t j = 0; j <= n; ++j) {
          Rational lam = make_rational(2 * beta[j] + 1, denom);
          for (std::size_t c = 0; c < n; ++c) x[c] += lam * v[j][c];
        }
        inner += p.evaluate(x);
        return;
      }
      for (int b = 0; b <= left; ++b) {
        beta[k] = b;
        rec(k + 1, left - b);
      }
    };
    rec(0, m - i);
    total += w * inner;
  }
  return det * total;
}

}  // namespace

Rational integrate(const MultiPoly& p, const ConvexPolytope& region) {
  if (region.is_empty() || p.is_zero()) return 0;
  Rational total = 0;
  for (const auto& simplex : region.triangulate()) {
    std::vector<RationalVector> v;
    for (auto k : simplex) v.push_back(region.vertices()[k]);
    total += integrate_simplex(p, v);
  }
  return total;
}

}  // namespace fastspline
