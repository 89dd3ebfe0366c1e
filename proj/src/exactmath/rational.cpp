#include "exactmath/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace fastspline {

Rational make_rational(long long num, long long den) {
  if (den == 0) fail(ErrorKind::InvalidArgument, "zero denominator");
  Rational q{Integer(static_cast<long>(num)), Integer(static_cast<long>(den))};
  q.canonicalize();
  return q;
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) fail(ErrorKind::InvalidArgument, "zero denominator");
  Rational q{num, den};
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  auto strip = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = strip(text);
  auto valid_int = [](std::string_view s) {
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = strip(text.substr(0, slash));
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : strip(text.substr(slash + 1));
  if (!valid_int(num) || !valid_int(den))
    fail(ErrorKind::Parse, "malformed rational '" + std::string(text) + "'");
  auto to_z = [](std::string_view s) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    return Integer(std::string(s), 10);
  };
  Integer d = to_z(den);
  if (d == 0) fail(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
  return make_rational(to_z(num), d);
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const RationalVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i].get_str();
  }
  return out + ")";
}

Rational from_double(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite value has no rational form");
  return Rational(v);
}

double to_double(const Rational& q) { return q.get_d(); }

Integer floor_of(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

long long to_int64(const Integer& z) {
  if (!z.fits_slong_p()) fail(ErrorKind::Internal, "integer exceeds 64 bits: " + z.get_str());
  return z.get_si();
}

RationalVector to_rational(const IntVector& v) {
  RationalVector out;
  out.reserve(v.size());
  for (long long x : v) out.emplace_back(make_rational(x));
  return out;
}

RationalVector zeros(std::size_t n) { return RationalVector(n, Rational(0)); }

Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

RationalVector add(const RationalVector& a, const RationalVector& b) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

RationalVector sub(const RationalVector& a, const IntVector& b) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - make_rational(b[i]);
  return out;
}

RationalVector sub(const RationalVector& a, const RationalVector& b) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

RationalVector scale(const RationalVector& a, const Rational& k) {
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * k;
  return out;
}

bool is_zero(const RationalVector& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

Integer lcm_of_denominators(const RationalVector& v) {
  Integer l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

Rational make_primitive(RationalVector& v) {
  Integer l = lcm_of_denominators(v);
  Integer g = 0;
  for (const auto& x : v) {
    Integer n = x.get_num() * (l / x.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  if (g == 0) fail(ErrorKind::InvalidArgument, "zero vector has no primitive form");
  Rational factor = make_rational(l, g);
  for (auto& x : v) x *= factor;
  return factor;
}

}  // namespace fastspline
