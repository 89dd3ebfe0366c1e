#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "exactmath/matrix.hpp"
#include "exactmath/rational.hpp"

namespace fastspline {

using Exponent = std::vector<int>;

class MultiPoly {
 public:
  using TermMap = std::map<Exponent, Rational>;

  explicit MultiPoly(std::size_t dim = 0) : dim_(dim) {}

  static MultiPoly constant(std::size_t dim, const Rational& c);
  static MultiPoly variable(std::size_t dim, std::size_t index);
  static MultiPoly monomial(const Exponent& e, const Rational& c);

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  Rational coefficient(const Exponent& e) const;

  void add_term(const Exponent& e, const Rational& c);

  Rational evaluate(const RationalVector& x) const;
  double evaluate(std::span<const double> x) const;

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  MultiPoly operator*(const Rational& k) const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly operator-() const;

  bool operator==(const MultiPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }
  bool operator<(const MultiPoly& o) const { return terms_ < o.terms_; }

  std::string to_string() const;

 private:
  std::size_t dim_;
  TermMap terms_;
};

// q(x) = p(A x + b).
MultiPoly poly_compose_affine(const MultiPoly& p, const RationalMatrix& a, const RationalVector& b);
// q(x) = p(x + shift).
MultiPoly poly_translate(const MultiPoly& p, const RationalVector& shift);

// Number of monomials of total degree <= degree in dim variables.
std::size_t monomial_count(std::size_t dim, int degree);
// All exponents of total degree <= degree, graded then lexicographic.
std::vector<Exponent> monomials_up_to(std::size_t dim, int degree);

}  // namespace fastspline
