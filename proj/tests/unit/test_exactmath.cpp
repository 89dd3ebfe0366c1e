#include <random>

#include "doctest.h"
#include "exactmath/horner.hpp"
#include "exactmath/matrix.hpp"
#include "exactmath/multipoly.hpp"

using namespace fastspline;

namespace {

// Laplace expansion along the first row; independent of the elimination code.
Rational cofactor_det(const RationalMatrix& m) {
  std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  Rational sum = 0;
  for (std::size_t c = 0; c < n; ++c) {
    RationalMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t k = 0, kk = 0; k < n; ++k)
        if (k != c) minor(r - 1, kk++) = m(r, k);
    Rational term = m(0, c) * cofactor_det(minor);
    sum += c % 2 ? Rational(-term) : term;
  }
  return sum;
}

RationalMatrix random_matrix(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  RationalMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = make_rational(num(rng), den(rng));
  return m;
}

MultiPoly random_poly(std::mt19937& rng, std::size_t dim, int degree) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
  MultiPoly p(dim);
  for (const auto& e : monomials_up_to(dim, degree))
    if (rng() % 3) p.add_term(e, make_rational(num(rng), den(rng)));
  return p;
}

}  // namespace

TEST_CASE("rationals stay canonical") {
  Rational q = make_rational(6, -4);
  CHECK(to_string(q) == "-3/2");
  CHECK(parse_rational("10/4") == make_rational(5, 2));
  CHECK(parse_rational("-7") == make_rational(-7));
  CHECK(from_double(0.375) == make_rational(3, 8));
  CHECK(floor_of(make_rational(-1, 3)) == -1);
  CHECK(is_integer(make_rational(8, 4)));
  RationalVector v{make_rational(1, 2), make_rational(-3, 4)};
  Rational k = make_primitive(v);
  CHECK(k == 4);
  CHECK(v == RationalVector{make_rational(2), make_rational(-3)});
}

TEST_CASE("determinant agrees with cofactor expansion") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + trial % 4;
    RationalMatrix m = random_matrix(rng, n);
    CHECK(determinant(m) == cofactor_det(m));
  }
}

TEST_CASE("inverse and solve") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    RationalMatrix m = random_matrix(rng, 3);
    auto inv = inverse(m);
    if (determinant(m) == 0) {
      CHECK_FALSE(inv.has_value());
      continue;
    }
    REQUIRE(inv.has_value());
    CHECK(m * *inv == RationalMatrix::identity(3));
    RationalVector b{make_rational(1), make_rational(-2, 3), make_rational(5, 7)};
    auto x = solve(m, b);
    REQUIRE(x.has_value());
    CHECK(m.apply(*x) == b);
  }
  RationalMatrix singular = RationalMatrix::from_rows({{1, 2}, {2, 4}});
  CHECK(rank(singular) == 1);
  CHECK_FALSE(inverse(singular).has_value());
}

TEST_CASE("orthogonal complement") {
  std::vector<RationalVector> vs{to_rational(IntVector{1, 1, 0}), to_rational(IntVector{0, 1, 1})};
  RationalVector n = orthogonal_complement(vs, 3);
  CHECK_FALSE(is_zero(n));
  for (const auto& v : vs) CHECK(dot(n, v) == 0);
}

TEST_CASE("polynomial arithmetic is consistent with evaluation") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    MultiPoly p = random_poly(rng, 2, 3), q = random_poly(rng, 2, 2);
    RationalVector x{make_rational(static_cast<long long>(rng() % 11) - 5, 3), make_rational(static_cast<long long>(rng() % 7), 5)};
    CHECK((p + q).evaluate(x) == p.evaluate(x) + q.evaluate(x));
    CHECK((p - q).evaluate(x) == p.evaluate(x) - q.evaluate(x));
    CHECK((p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x));
    RationalVector t{make_rational(1, 2), make_rational(-2)};
    CHECK(poly_translate(p, t).evaluate(x) == p.evaluate(add(x, t)));
    RationalMatrix a = RationalMatrix::from_rows({{0, -1}, {1, 0}});
    CHECK(poly_compose_affine(p, a, t).evaluate(x) == p.evaluate(add(a.apply(x), t)));
  }
}

TEST_CASE("monomial enumeration counts") {
  CHECK(monomial_count(3, 2) == 10);
  CHECK(monomials_up_to(3, 2).size() == 10);
  CHECK(monomial_count(2, 5) == 21);
}

TEST_CASE("Horner example x^2 y + x y") {
  MultiPoly p(2);
  p.add_term({2, 1}, Rational(1));
  p.add_term({1, 1}, Rational(1));
  HornerProgram h = horner_factor(p);
  CHECK(h.expand() == p);
  CHECK(naive_multiplication_count(p) == 3);
  CHECK(h.multiplication_count() <= 2);
}

TEST_CASE("Horner programs reproduce random polynomials") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t dim = 1 + trial % 3;
    MultiPoly p = random_poly(rng, dim, 1 + trial % 5);
    HornerProgram h = horner_factor(p);
    CHECK(h.expand() == p);
    CHECK(h.multiplication_count() <= naive_multiplication_count(p));
    RationalVector xr(dim);
    std::vector<double> xd(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      xr[i] = make_rational(static_cast<long long>(rng() % 17) - 8, 4);
      xd[i] = xr[i].get_d();
    }
    CHECK(h.evaluate(xr) == p.evaluate(xr));
    CHECK(h.evaluate(xd) == doctest::Approx(p.evaluate(xr).get_d()).epsilon(1e-12));
  }
}
