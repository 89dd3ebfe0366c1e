#include "spline/ppspline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "common/error.hpp"

namespace fastspline {

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Support facets are among the piece facets: keep those every piece vertex
// satisfies.
ConvexPolytope hull_of_pieces(std::size_t dim, const std::vector<SplinePiece>& pieces) {
  std::set<HalfSpace> cand;
  std::set<RationalVector> verts;
  for (const auto& p : pieces) {
    cand.insert(p.region.halfspaces().begin(), p.region.halfspaces().end());
    verts.insert(p.region.vertices().begin(), p.region.vertices().end());
  }
  std::vector<HalfSpace> keep;
  for (const auto& h : cand) {
    bool ok = std::all_of(verts.begin(), verts.end(), [&](const RationalVector& v) { return dot(h.normal, v) <= h.offset; });
    if (ok) keep.push_back(h);
  }
  std::vector<RationalVector> hv;
  for (const auto& v : verts) {
    std::vector<RationalVector> tight;
    for (const auto& h : keep)
      if (dot(h.normal, v) == h.offset) tight.push_back(h.normal);
    if (rank_of(tight) == dim) hv.push_back(v);
  }
  return ConvexPolytope::from_parts(dim, std::move(keep), std::move(hv));
}

bool separated_by_facet(const ConvexPolytope& a, const ConvexPolytope& b) {
  for (const auto& h : a.halfspaces()) {
    bool all_out = std::all_of(b.vertices().begin(), b.vertices().end(),
                               [&](const RationalVector& v) { return dot(h.normal, v) >= h.offset; });
    if (all_out) return true;
  }
  return false;
}

bool interiors_overlap(const ConvexPolytope& a, const ConvexPolytope& b) {
  auto alo = a.lower_bound(), ahi = a.upper_bound(), blo = b.lower_bound(), bhi = b.upper_bound();
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (ahi[i] <= blo[i] || bhi[i] <= alo[i]) return false;
  if (separated_by_facet(a, b) || separated_by_facet(b, a)) return false;
  std::vector<HalfSpace> hs = a.halfspaces();
  hs.insert(hs.end(), b.halfspaces().begin(), b.halfspaces().end());
  return !ConvexPolytope::from_halfspaces(a.dim(), hs).is_empty();
}

}  // namespace

PiecewisePolySpline PiecewisePolySpline::create(std::string name, std::size_t dim, int degree_bound,
                                                std::vector<SplinePiece> pieces) {
  return assemble(std::move(name), dim, degree_bound, std::move(pieces), true);
}

PiecewisePolySpline PiecewisePolySpline::from_arrangement_pieces(std::string name, std::size_t dim, int degree_bound,
                                                                 std::vector<SplinePiece> pieces) {
  return assemble(std::move(name), dim, degree_bound, std::move(pieces), false);
}

PiecewisePolySpline PiecewisePolySpline::assemble(std::string name, std::size_t dim, int degree_bound,
                                                  std::vector<SplinePiece> pieces, bool check_tiling) {
  if (dim == 0) fail(ErrorKind::Validation, "spline dimension must be positive");
  if (pieces.empty()) fail(ErrorKind::Validation, "spline has no pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (p.region.is_empty() || p.region.dim() != dim)
      fail(ErrorKind::Validation, "piece " + std::to_string(i) + " is empty or has the wrong dimension");
    if (p.poly.dim() != dim) fail(ErrorKind::Validation, "piece " + std::to_string(i) + " polynomial dimension mismatch");
    if (p.poly.degree() > degree_bound)
      fail(ErrorKind::Validation, "piece " + std::to_string(i) + " exceeds the degree bound");
  }
  PiecewisePolySpline out;
  out.name_ = std::move(name);
  out.dim_ = dim;
  out.degree_bound_ = degree_bound;
  out.pieces_ = std::move(pieces);
  out.support_ = hull_of_pieces(dim, out.pieces_);
  if (out.support_.is_empty()) fail(ErrorKind::Validation, "support is degenerate");
  out.build_locator();

  if (check_tiling) {
    for (std::size_t i = 0; i < out.pieces_.size(); ++i) {
      const auto& r = out.pieces_[i].region;
      for (std::size_t j : out.candidates_near(r.lower_bound(), r.upper_bound()))
        if (j > i && interiors_overlap(r, out.pieces_[j].region))
          fail(ErrorKind::Validation, "pieces " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
    Rational vol = 0;
    for (const auto& p : out.pieces_) vol += p.region.volume();
    if (vol != out.support_.volume())
      fail(ErrorKind::Validation, "pieces do not tile a convex support (gap)");
  }

  Rational integral = 0;
  for (const auto& p : out.pieces_) integral += integrate(p.poly, p.region);
  if (integral != 1) fail(ErrorKind::Validation, "spline integrates to " + integral.get_str() + ", not 1");

  // Continuity: at each facet's vertex centroid every piece touching it agrees.
  for (std::size_t i = 0; i < out.pieces_.size(); ++i) {
    const auto& r = out.pieces_[i].region;
    for (const auto& h : r.halfspaces()) {
      RationalVector c(dim, Rational(0));
      long count = 0;
      for (const auto& v : r.vertices())
        if (dot(h.normal, v) == h.offset) {
          c = add(c, v);
          ++count;
        }
      c = scale(c, make_rational(1, count));
      Rational value = out.pieces_[i].poly.evaluate(c);
      for (std::size_t j : out.candidates_near(c, c)) {
        if (j == i || !out.pieces_[j].region.contains(c)) continue;
        if (out.pieces_[j].poly.evaluate(c) != value)
          fail(ErrorKind::Validation,
               "pieces " + std::to_string(i) + " and " + std::to_string(j) + " disagree on a shared facet at " + to_string(c));
      }
    }
  }

  out.nonnegative_ = true;
  for (const auto& p : out.pieces_) {
    if (sgn(p.poly.evaluate(p.region.vertex_centroid())) < 0) out.nonnegative_ = false;
    for (const auto& v : p.region.vertices())
      if (sgn(p.poly.evaluate(v)) < 0) out.nonnegative_ = false;
  }
  return out;
}

void PiecewisePolySpline::build_locator() {
  float_pieces_.clear();
  for (const auto& p : pieces_) {
    FloatPiece fp;
    for (const auto& h : p.region.halfspaces()) {
      std::vector<double> n;
      for (const auto& c : h.normal) n.push_back(c.get_d());
      fp.normals.push_back(std::move(n));
      fp.offsets.push_back(h.offset.get_d());
      int lead = 0;
      for (const auto& c : h.normal)
        if (sgn(c) != 0) {
          lead = sgn(c);
          break;
        }
      fp.lead.push_back(lead);
    }
    fp.program = horner_factor(p.poly);
    float_pieces_.push_back(std::move(fp));
  }
  RationalVector lo = support_.lower_bound(), hi = support_.upper_bound();
  std::size_t per_axis = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(2.0 * std::pow(static_cast<double>(pieces_.size()), 1.0 / dim_))));
  grid_lo_.assign(dim_, 0);
  grid_step_.assign(dim_, 0);
  grid_size_.assign(dim_, per_axis);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim_; ++i) {
    grid_lo_[i] = lo[i].get_d();
    grid_step_[i] = (hi[i].get_d() - grid_lo_[i]) / static_cast<double>(per_axis);
    total *= per_axis;
  }
  grid_cells_.assign(total, {});
  const double slack = 1e-7;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    RationalVector plo = pieces_[k].region.lower_bound(), phi = pieces_[k].region.upper_bound();
    std::vector<std::size_t> a(dim_), b(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      double fa = (plo[i].get_d() - grid_lo_[i]) / grid_step_[i] - slack;
      double fb = (phi[i].get_d() - grid_lo_[i]) / grid_step_[i] + slack;
      a[i] = static_cast<std::size_t>(std::clamp(std::floor(fa), 0.0, static_cast<double>(per_axis - 1)));
      b[i] = static_cast<std::size_t>(std::clamp(std::floor(fb), 0.0, static_cast<double>(per_axis - 1)));
    }
    std::vector<std::size_t> z = a;
    while (true) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < dim_; ++i) idx = idx * per_axis + z[i];
      grid_cells_[idx].push_back(k);
      std::size_t i = dim_;
      while (i > 0 && z[i - 1] == b[i - 1]) {
        z[i - 1] = a[i - 1];
        --i;
      }
      if (i == 0) break;
      ++z[i - 1];
    }
  }
}

std::vector<std::size_t> PiecewisePolySpline::candidates(std::span<const double> x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double f = (x[i] - grid_lo_[i]) / grid_step_[i];
    if (f < -1e-7 || f > static_cast<double>(grid_size_[i]) + 1e-7) return {};
    auto c = static_cast<std::size_t>(std::clamp(std::floor(f), 0.0, static_cast<double>(grid_size_[i] - 1)));
    idx = idx * grid_size_[i] + c;
  }
  return grid_cells_[idx];
}

std::vector<std::size_t> PiecewisePolySpline::candidates_near(const RationalVector& lo, const RationalVector& hi) const {
  std::vector<std::size_t> a(dim_), b(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double fa = (lo[i].get_d() - grid_lo_[i]) / grid_step_[i] - 1e-7;
    double fb = (hi[i].get_d() - grid_lo_[i]) / grid_step_[i] + 1e-7;
    double top = static_cast<double>(grid_size_[i] - 1);
    if (fb < 0 || fa > top + 1) return {};
    a[i] = static_cast<std::size_t>(std::clamp(std::floor(fa), 0.0, top));
    b[i] = static_cast<std::size_t>(std::clamp(std::floor(fb), 0.0, top));
  }
  std::set<std::size_t> out;
  std::vector<std::size_t> z = a;
  while (true) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < dim_; ++i) idx = idx * grid_size_[i] + z[i];
    out.insert(grid_cells_[idx].begin(), grid_cells_[idx].end());
    std::size_t i = dim_;
    while (i > 0 && z[i - 1] == b[i - 1]) {
      z[i - 1] = a[i - 1];
      --i;
    }
    if (i == 0) break;
    ++z[i - 1];
  }
  return {out.begin(), out.end()};
}

std::optional<std::size_t> PiecewisePolySpline::locate(const RationalVector& x) const {
  for (std::size_t k : candidates_near(x, x))
    if (pieces_[k].region.contains_perturbed(x)) return k;
  return std::nullopt;
}

std::optional<std::size_t> PiecewisePolySpline::locate(std::span<const double> x) const {
  auto cand = candidates(x);
  std::optional<std::size_t> best;
  double best_violation = 1e-9;
  for (std::size_t k : cand) {
    const FloatPiece& fp = float_pieces_[k];
    bool inside = true;
    double worst = 0;
    for (std::size_t h = 0; h < fp.offsets.size(); ++h) {
      double v = -fp.offsets[h];
      for (std::size_t i = 0; i < dim_; ++i) v += fp.normals[h][i] * x[i];
      if (v > 0 || (v == 0 && fp.lead[h] > 0)) {
        inside = false;
        worst = std::max(worst, v);
      }
    }
    if (inside) return k;
    // Rounding can leave a point just outside every piece near a shared
    // facet; accept the nearest one within a tiny tolerance.
    if (worst < best_violation) {
      best_violation = worst;
      best = k;
    }
  }
  return best;
}

Rational PiecewisePolySpline::evaluate(const RationalVector& x) const {
  auto k = locate(x);
  return k ? pieces_[*k].poly.evaluate(x) : Rational(0);
}

double PiecewisePolySpline::evaluate(std::span<const double> x) const {
  auto k = locate(x);
  if (!k) return 0.0;
  thread_local std::vector<double> scratch;
  const auto& prog = float_pieces_[*k].program;
  if (scratch.size() < prog.ops().size()) scratch.resize(prog.ops().size());
  return prog.evaluate(x, scratch);
}

std::vector<Hyperplane> PiecewisePolySpline::breakpoint_planes() const {
  std::set<Hyperplane> planes;
  for (const auto& p : pieces_)
    for (const auto& h : p.region.halfspaces()) planes.insert(boundary_of(h));
  return {planes.begin(), planes.end()};
}

namespace {

// Newton form on the principal lattice {u in N^s : |u| <= deg}:
// p(u) = sum_alpha (Delta^alpha f)(0) prod_i C(u_i, alpha_i).
MultiPoly newton_interpolant(std::size_t s, int deg, std::map<Exponent, Rational> table) {
  for (std::size_t i = 0; i < s; ++i)
    for (int t = 1; t <= deg; ++t)
      for (auto it = table.rbegin(); it != table.rend(); ++it) {
        const Exponent& u = it->first;
        if (u[i] < t) continue;
        Exponent prev = u;
        --prev[i];
        it->second -= table.at(prev);
      }
  // falling[a] = C(u, a) as a univariate coefficient list.
  std::vector<std::vector<Rational>> falling(deg + 1);
  falling[0] = {Rational(1)};
  for (int a = 1; a <= deg; ++a) {
    const auto& prev = falling[a - 1];
    std::vector<Rational> next(a + 1, Rational(0));
    // C(u, a) = C(u, a-1) * (u - a + 1) / a
    for (int k = 0; k < a; ++k) {
      next[k + 1] += prev[k] / a;
      next[k] -= prev[k] * (a - 1) / a;
    }
    falling[a] = std::move(next);
  }
  MultiPoly out(s);
  for (const auto& [alpha, coeff] : table) {
    if (sgn(coeff) == 0) continue;
    std::vector<int> k(s, 0);
    Exponent e(s);
    while (true) {
      Rational t = coeff;
      for (std::size_t i = 0; i < s; ++i) t *= falling[alpha[i]][k[i]];
      for (std::size_t i = 0; i < s; ++i) e[i] = k[i];
      out.add_term(e, t);
      std::size_t i = 0;
      while (i < s && k[i] == alpha[i]) k[i++] = 0;
      if (i == s) break;
      ++k[i];
    }
  }
  return out;
}

}  // namespace

PiecewisePolySpline extract_pp_form(const DirectionMatrix& xi, const Arrangement& mesh, std::string name) {
  std::size_t s = xi.dim();
  int deg = xi.degree();
  auto lattice_points = monomials_up_to(s, deg);
  BoxSplineEvaluator oracle(xi);
  std::vector<SplinePiece> pieces;
  std::uint64_t rng = 0x5eed0f00dULL;
  for (std::size_t cell_index = 0; cell_index < mesh.cells.size(); ++cell_index) {
    const ConvexPolytope& cell = mesh.cells[cell_index].cell;
    MultiPoly poly(s);
    if (deg == 0) {
      poly = MultiPoly::constant(s, oracle(mesh.cells[cell_index].witness));
    } else {
      // Principal lattice of a simplex shrunk toward its centroid: interior
      // points, unisolvent for degree deg.
      auto simplex = cell.triangulate().at(0);
      RationalVector centroid(s, Rational(0));
      for (auto v : simplex) centroid = add(centroid, cell.vertices()[v]);
      centroid = scale(centroid, make_rational(1, static_cast<long long>(s + 1)));
      std::vector<RationalVector> corners;
      for (auto v : simplex) corners.push_back(scale(add(cell.vertices()[v], centroid), make_rational(1, 2)));
      std::vector<RationalVector> edges;
      for (std::size_t j = 1; j <= s; ++j) edges.push_back(sub(corners[j], corners[0]));
      std::map<Exponent, Rational> table;
      for (const auto& u : lattice_points) {
        RationalVector p = corners[0];
        for (std::size_t j = 0; j < s; ++j)
          if (u[j]) p = add(p, scale(edges[j], make_rational(u[j], deg)));
        table[u] = oracle(p);
      }
      MultiPoly in_u = newton_interpolant(s, deg, std::move(table));
      // u = deg * E^{-1} (x - corner0)
      RationalMatrix e_inv = *inverse(RationalMatrix::from_columns(edges));
      RationalMatrix a(s, s);
      for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) a(r, c) = e_inv(r, c) * deg;
      RationalVector b = scale(a.apply(corners[0]), Rational(-1));
      poly = poly_compose_affine(in_u, a, b);
    }
    // Holdout: random interior convex combinations of all cell vertices.
    std::size_t holdout = std::max<std::size_t>(lattice_points.size(), 2);
    for (std::size_t h = 0; h < holdout; ++h) {
      RationalVector p(s, Rational(0));
      long long total = 0;
      for (const auto& v : cell.vertices()) {
        long long w = 1 + static_cast<long long>(splitmix(rng) % 8);
        p = add(p, scale(v, Rational(static_cast<long>(w))));
        total += w;
      }
      p = scale(p, make_rational(1, total));
      if (poly.evaluate(p) != oracle(p))
        fail(ErrorKind::Validation, "fit residual at holdout point " + to_string(p) + ": the mesh misses a cutting plane");
    }
    pieces.push_back({cell, std::move(poly)});
  }
  return PiecewisePolySpline::from_arrangement_pieces(std::move(name), s, deg, std::move(pieces));
}

std::string export_pp_spline(const PiecewisePolySpline& spline) {
  std::ostringstream out;
  out << "fastspline-pp 1\n";
  out << "name " << spline.name() << "\n";
  out << "dim " << spline.dim() << "\n";
  out << "degree " << spline.degree_bound() << "\n";
  out << "pieces " << spline.pieces().size() << "\n";
  for (const auto& p : spline.pieces()) {
    out << "piece\n";
    out << "halfspaces " << p.region.halfspaces().size() << "\n";
    for (const auto& h : p.region.halfspaces()) {
      for (const auto& c : h.normal) out << c.get_str() << ' ';
      out << h.offset.get_str() << "\n";
    }
    out << "terms " << p.poly.terms().size() << "\n";
    for (const auto& [e, c] : p.poly.terms()) {
      for (int k : e) out << k << ' ';
      out << c.get_str() << "\n";
    }
  }
  return out.str();
}

namespace {

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      std::istringstream ls(line);
      std::string t;
      while (ls >> t) tokens_.push_back(t);
    }
  }
  std::string next(const char* what) {
    if (pos_ >= tokens_.size()) fail(ErrorKind::Parse, std::string("spline document ends early, expected ") + what);
    return tokens_[pos_++];
  }
  void expect(const std::string& word) {
    std::string t = next(word.c_str());
    if (t != word) fail(ErrorKind::Parse, "spline document: expected '" + word + "', found '" + t + "'");
  }
  long long integer(const char* what) {
    std::string t = next(what);
    try {
      std::size_t used = 0;
      long long v = std::stoll(t, &used);
      if (used == t.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Parse, std::string("spline document: bad integer for ") + what + ": '" + t + "'");
  }
  bool done() const { return pos_ >= tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

PiecewisePolySpline import_pp_spline(std::string_view document) {
  TokenStream ts(document);
  ts.expect("fastspline-pp");
  if (ts.integer("format version") != 1) fail(ErrorKind::Version, "unsupported spline document version");
  ts.expect("name");
  std::string name = ts.next("name");
  ts.expect("dim");
  long long dim = ts.integer("dim");
  ts.expect("degree");
  long long degree = ts.integer("degree");
  ts.expect("pieces");
  long long count = ts.integer("piece count");
  if (dim <= 0 || degree < 0 || count <= 0) fail(ErrorKind::Parse, "spline document: bad header values");
  std::vector<SplinePiece> pieces;
  for (long long k = 0; k < count; ++k) {
    ts.expect("piece");
    ts.expect("halfspaces");
    long long nh = ts.integer("half-space count");
    std::vector<HalfSpace> hs;
    for (long long h = 0; h < nh; ++h) {
      RationalVector normal;
      for (long long i = 0; i < dim; ++i) {
        Rational v = parse_rational(ts.next("normal"));
        if (!is_integer(v)) fail(ErrorKind::Parse, "spline document: half-space normals must be integers");
        normal.push_back(v);
      }
      Rational offset = parse_rational(ts.next("offset"));
      if (is_zero(normal)) fail(ErrorKind::Parse, "spline document: zero half-space normal");
      hs.push_back(make_halfspace(normal, offset));
    }
    ts.expect("terms");
    long long nt = ts.integer("term count");
    MultiPoly poly(static_cast<std::size_t>(dim));
    for (long long t = 0; t < nt; ++t) {
      Exponent e;
      for (long long i = 0; i < dim; ++i) {
        long long v = ts.integer("exponent");
        if (v < 0) fail(ErrorKind::Parse, "spline document: negative exponent");
        e.push_back(static_cast<int>(v));
      }
      poly.add_term(e, parse_rational(ts.next("coefficient")));
    }
    ConvexPolytope region = ConvexPolytope::from_halfspaces(static_cast<std::size_t>(dim), hs);
    if (region.is_empty()) fail(ErrorKind::Validation, "piece " + std::to_string(k) + " is empty");
    pieces.push_back({std::move(region), std::move(poly)});
  }
  if (!ts.done()) fail(ErrorKind::Parse, "spline document has trailing content");
  return PiecewisePolySpline::create(name, static_cast<std::size_t>(dim), static_cast<int>(degree), std::move(pieces));
}

std::vector<IntVector> contributing_sites(const SplineOnLattice& sol, const RationalVector& x) {
  std::size_t s = x.size();
  RationalMatrix neg = RationalMatrix::identity(s);
  for (std::size_t i = 0; i < s; ++i) neg(i, i) = -1;
  ConvexPolytope region = sol.spline.support().transform(neg, x);
  std::vector<IntVector> out;
  for (auto& n : lattice_sites_in_polytope(sol.lattice, region))
    if (sol.spline.support().contains_perturbed(sub(x, to_rational(n)))) out.push_back(std::move(n));
  return out;
}

SplineOnLattice make_spline_on_lattice(PiecewisePolySpline spline, IntegerLattice lattice) {
  if (spline.dim() != lattice.dim()) fail(ErrorKind::Mismatch, "spline and lattice dimensions differ");
  SplineOnLattice sol;
  sol.cosets = decompose_cartesian(lattice);
  sol.weight = Rational(lattice.index());
  sol.lattice = std::move(lattice);
  sol.spline = std::move(spline);
  const auto& pieces = sol.spline.pieces();
  std::size_t step = std::max<std::size_t>(1, pieces.size() / 64);
  for (std::size_t k = 0; k < pieces.size(); k += step) {
    RationalVector w = pieces[k].region.vertex_centroid();
    Rational sum = 0;
    for (const auto& n : contributing_sites(sol, w)) sum += sol.spline.evaluate(sub(w, to_rational(n)));
    sum *= sol.weight;
    if (sum != 1)
      fail(ErrorKind::Validation, "no partition of unity on " + sol.lattice.name() + ": shifts sum to " + sum.get_str() +
                                      " at " + to_string(w));
  }
  return sol;
}

}  // namespace fastspline
