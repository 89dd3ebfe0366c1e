#include <random>

#include "doctest.h"
#include "spline/boxspline.hpp"
#include "spline/corpus.hpp"
#include "spline/ppspline.hpp"

using namespace fastspline;

namespace {

Rational hat(const Rational& x) {
  if (x <= -1 || x >= 1) return 0;
  return x < 0 ? Rational(1 + x) : Rational(1 - x);
}

// Uniform quadratic B-spline on [0, 3].
Rational quadratic_bspline(const Rational& x) {
  if (x < 0 || x >= 3) return 0;
  if (x < 1) return Rational(x * x / 2);
  if (x < 2) return Rational((-2 * x * x + 6 * x - 3) / 2);
  return Rational((3 - x) * (3 - x) / 2);
}

Rational random_rational(std::mt19937& rng, long long lo, long long hi) {
  long long den = 97;
  std::uniform_int_distribution<long long> d(lo * den, hi * den);
  return make_rational(d(rng), den);
}

}  // namespace

TEST_CASE("univariate box splines are B-splines") {
  DirectionMatrix two = DirectionMatrix::from_int_columns({{1}, {1}});
  DirectionMatrix three = DirectionMatrix::from_int_columns({{1}, {1}, {1}});
  std::mt19937 rng(1);
  for (int n = 0; n < 100; ++n) {
    Rational x = random_rational(rng, -1, 4);
    CHECK(boxspline_eval_exact(two, {x}) == hat(x - 1));
    CHECK(boxspline_eval_exact(three, {x}) == quadratic_bspline(x));
  }
}

TEST_CASE("Courant element peaks at one") {
  DirectionMatrix xi = DirectionMatrix::from_int_columns({{1, 0}, {0, 1}, {1, 1}});
  CHECK(boxspline_eval_exact(xi, to_rational(IntVector{1, 1})) == 1);
  CHECK(boxspline_eval_exact(xi, {make_rational(1, 2), make_rational(1, 2)}) == make_rational(1, 2));
  CHECK(boxspline_eval_exact(xi, {make_rational(3), make_rational(1)}) == 0);
}

TEST_CASE("tensor-product box spline factors") {
  DirectionMatrix xi = DirectionMatrix::from_int_columns({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  BoxSplineEvaluator fast(xi);
  std::mt19937 rng(2);
  for (int n = 0; n < 200; ++n) {
    RationalVector x{random_rational(rng, -2, 2), random_rational(rng, -2, 2)};
    Rational expect = hat(x[0]) * hat(x[1]);
    CHECK(boxspline_eval_exact(xi, x) == expect);
    CHECK(fast(x) == expect);
  }
}

TEST_CASE("box-spline support and mesh") {
  DirectionMatrix zp = DirectionMatrix::from_int_columns({{1, 0}, {0, 1}, {1, 1}, {1, -1}});
  ConvexPolytope supp = boxspline_support(zp);
  CHECK(supp.vertices().size() == 8);
  CHECK(supp.volume() == 7);  // sum of |det| over direction pairs
  Arrangement mesh = boxspline_mesh(zp);
  Rational total = 0;
  for (const auto& c : mesh.cells) total += c.cell.volume();
  CHECK(total == 7);
}

TEST_CASE("corpus splines: PP form matches the recursion") {
  std::mt19937 rng(4);
  for (std::string name : {"tp2", "zp", "qc-tp", "bcc-linear-rd", "fcc-6dir"}) {
    CAPTURE(name);
    const CorpusEntry& e = corpus_entry(name);
    DirectionMatrix xi = corpus_directions(e);
    PiecewisePolySpline pp = corpus_spline(e);
    RationalVector lo = pp.support().lower_bound(), hi = pp.support().upper_bound();
    // Piece integrals sum to one.
    Rational integral = 0;
    for (const auto& piece : pp.pieces()) integral += integrate(piece.poly, piece.region);
    CHECK(integral == 1);
    BoxSplineEvaluator exact(xi);
    for (int n = 0; n < 60; ++n) {
      RationalVector x(pp.dim());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * make_rational(static_cast<long long>(rng() % 1000), 997);
      CHECK(pp.evaluate(x) == exact(x));
      std::vector<double> xd(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xd[i] = x[i].get_d();
      CHECK(pp.evaluate(xd) == doctest::Approx(exact(x).get_d()).epsilon(1e-12));
    }
  }
}

TEST_CASE("partition of unity on the lattice") {
  std::mt19937 rng(9);
  for (std::string name : {"tp2", "zp", "qc-tp", "bcc-linear-rd", "fcc-6dir"}) {
    CAPTURE(name);
    SplineOnLattice sol = corpus_spline_on_lattice(name);
    for (int n = 0; n < 25; ++n) {
      RationalVector x(sol.spline.dim());
      for (auto& xi : x) xi = random_rational(rng, -3, 3);
      Rational sum = 0;
      for (const auto& site : contributing_sites(sol, x)) sum += sol.weight * sol.spline.evaluate(sub(x, site));
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("contributing sites are exactly the sites with nonzero support") {
  SplineOnLattice sol = corpus_spline_on_lattice("tp2");
  RationalVector x{make_rational(1, 3), make_rational(5, 4)};
  auto sites = contributing_sites(sol, x);
  CHECK(sites.size() == 4);
  for (const auto& n : sites) CHECK(sol.spline.evaluate(sub(x, n)) > 0);
}

TEST_CASE("spline description round trip") {
  PiecewisePolySpline pp = corpus_spline(corpus_entry("zp"));
  PiecewisePolySpline back = import_pp_spline(export_pp_spline(pp));
  CHECK(back.pieces().size() == pp.pieces().size());
  CHECK(back.nonnegative() == pp.nonnegative());
  RationalVector x{make_rational(3, 7), make_rational(-2, 9)};
  CHECK(back.evaluate(x) == pp.evaluate(x));
}

TEST_CASE("malformed spline descriptions are rejected") {
  CHECK_THROWS(import_pp_spline("fastspline-pp 9\n"));
  CHECK_THROWS(import_pp_spline("fastspline-pp 1\nname x\ndim 2\ndegree 1\npieces 1\npiece\nhalfspaces 1\n"));
}

TEST_CASE("pieces that do not integrate to one are rejected") {
  // The unit square with constant 2.
  ConvexPolytope sq = ConvexPolytope::box(to_rational(IntVector{0, 0}), to_rational(IntVector{1, 1}));
  std::vector<SplinePiece> pieces{{sq, MultiPoly::constant(2, Rational(2))}};
  CHECK_THROWS(PiecewisePolySpline::create("bad", 2, 0, pieces));
  std::vector<SplinePiece> ok{{sq, MultiPoly::constant(2, Rational(1))}};
  CHECK(PiecewisePolySpline::create("box", 2, 0, ok).pieces().size() == 1);
}
