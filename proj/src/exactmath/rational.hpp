#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace fastspline {

// GMP keeps mpq values canonical (lowest terms, positive denominator) as long
// as every construction from a raw num/den pair goes through make_rational.
using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;
using IntVector = std::vector<long long>;

Rational make_rational(long long num, long long den = 1);
Rational make_rational(const Integer& num, const Integer& den);
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const RationalVector& v);

// Exact: every finite double is a dyadic rational.
Rational from_double(double v);
double to_double(const Rational& q);

Integer floor_of(const Rational& q);
bool is_integer(const Rational& q);
long long to_int64(const Integer& z);

RationalVector to_rational(const IntVector& v);
RationalVector zeros(std::size_t n);
Rational dot(const RationalVector& a, const RationalVector& b);
RationalVector add(const RationalVector& a, const RationalVector& b);
RationalVector sub(const RationalVector& a, const RationalVector& b);
RationalVector sub(const RationalVector& a, const IntVector& b);
RationalVector scale(const RationalVector& a, const Rational& k);
bool is_zero(const RationalVector& v);

// Scales a nonzero vector to the primitive integer vector on the same ray.
// Returns the positive factor applied.
Rational make_primitive(RationalVector& v);

Integer lcm_of_denominators(const RationalVector& v);

}  // namespace fastspline
