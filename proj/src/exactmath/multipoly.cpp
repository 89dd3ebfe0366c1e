#include "exactmath/multipoly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "common/error.hpp"

namespace fastspline {

MultiPoly MultiPoly::constant(std::size_t dim, const Rational& c) {
  MultiPoly p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(std::size_t dim, std::size_t index) {
  Exponent e(dim, 0);
  e.at(index) = 1;
  MultiPoly p(dim);
  p.add_term(e, 1);
  return p;
}

MultiPoly MultiPoly::monomial(const Exponent& e, const Rational& c) {
  MultiPoly p(e.size());
  p.add_term(e, c);
  return p;
}

int MultiPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

Rational MultiPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Exponent& e, const Rational& c) {
  if (e.size() != dim_) fail(ErrorKind::InvalidArgument, "exponent length differs from polynomial dimension");
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Rational MultiPoly::evaluate(const RationalVector& x) const {
  if (x.size() != dim_) fail(ErrorKind::InvalidArgument, "evaluation point has wrong dimension");
  // Cache powers per variable; degrees are small.
  std::vector<std::vector<Rational>> powers(dim_);
  Rational acc = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(1);
      while (static_cast<int>(pw.size()) <= e[i]) pw.push_back(pw.back() * x[i]);
      t *= pw[e[i]];
    }
    acc += t;
  }
  return acc;
}

double MultiPoly::evaluate(std::span<const double> x) const {
  double acc = 0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < dim_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  MultiPoly out = *this;
  out += o;
  return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  MultiPoly out = *this;
  out -= o;
  return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (o.dim_ != dim_) fail(ErrorKind::InvalidArgument, "polynomial dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (o.dim_ != dim_) fail(ErrorKind::InvalidArgument, "polynomial dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly MultiPoly::operator-() const { return *this * Rational(-1); }

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  if (o.dim_ != dim_) fail(ErrorKind::InvalidArgument, "polynomial dimension mismatch");
  MultiPoly out(dim_);
  Exponent e(dim_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t i = 0; i < dim_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

MultiPoly MultiPoly::operator*(const Rational& k) const {
  MultiPoly out(dim_);
  if (sgn(k) == 0) return out;
  out.terms_ = terms_;
  for (auto& [e, c] : out.terms_) c *= k;
  return out;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  static const char* names = "xyzw";
  std::string out;
  // Highest degree first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    std::string coef = Rational(abs(c)).get_str();
    bool constant = std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
    if (out.empty()) {
      if (sgn(c) < 0) out += "-";
    } else {
      out += sgn(c) < 0 ? " - " : " + ";
    }
    std::string mono;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += dim_ <= 4 ? std::string(1, names[i]) : "x" + std::to_string(i);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (constant)
      out += coef;
    else if (abs(c) == 1)
      out += mono;
    else
      out += coef + "*" + mono;
  }
  return out;
}

namespace {

// p(a_i z_i + b_i) by per-variable binomial expansion; the variables stay
// separate so each monomial expands to a tensor product.
MultiPoly substitute_diagonal(const MultiPoly& p, const RationalVector& a, const RationalVector& b) {
  std::size_t s = p.dim();
  MultiPoly out(s);
  int deg = p.degree();
  // binom[n][k]
  std::vector<std::vector<Integer>> binom(deg + 1);
  for (int n = 0; n <= deg; ++n) {
    binom[n].resize(n + 1);
    binom[n][0] = binom[n][n] = 1;
    for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
  }
  // factors[i][e][k] = coefficient of z_i^k in (a_i z_i + b_i)^e
  std::vector<std::vector<std::vector<Rational>>> factors(s);
  for (std::size_t i = 0; i < s; ++i) {
    factors[i].resize(deg + 1);
    for (int e = 0; e <= deg; ++e) {
      factors[i][e].resize(e + 1);
      for (int k = 0; k <= e; ++k) {
        Rational ak, bk;
        mpz_class an, ad, bn, bd;
        mpz_pow_ui(an.get_mpz_t(), a[i].get_num_mpz_t(), k);
        mpz_pow_ui(ad.get_mpz_t(), a[i].get_den_mpz_t(), k);
        mpz_pow_ui(bn.get_mpz_t(), b[i].get_num_mpz_t(), e - k);
        mpz_pow_ui(bd.get_mpz_t(), b[i].get_den_mpz_t(), e - k);
        factors[i][e][k] = make_rational(Integer(binom[e][k] * an * bn), Integer(ad * bd));
      }
    }
  }
  Exponent out_e(s);
  for (const auto& [e, c] : p.terms()) {
    // Odometer over k_i in [0, e_i].
    std::vector<int> k(s, 0);
    while (true) {
      Rational t = c;
      for (std::size_t i = 0; i < s && sgn(t) != 0; ++i) t *= factors[i][e[i]][k[i]];
      if (sgn(t) != 0) {
        for (std::size_t i = 0; i < s; ++i) out_e[i] = k[i];
        out.add_term(out_e, t);
      }
      std::size_t i = 0;
      while (i < s && k[i] == e[i]) k[i++] = 0;
      if (i == s) break;
      ++k[i];
    }
  }
  return out;
}

}  // namespace

MultiPoly poly_compose_affine(const MultiPoly& p, const RationalMatrix& a, const RationalVector& b) {
  std::size_t s = p.dim();
  if (a.rows() != s || a.cols() != s || b.size() != s)
    fail(ErrorKind::InvalidArgument, "affine map dimension does not match polynomial");
  if (a.is_signed_permutation()) {
    // y_i = sign_i x_{sigma(i)} + b_i: expand in z_i = x_{sigma(i)}, then rename.
    RationalVector sign(s);
    std::vector<std::size_t> sigma(s);
    for (std::size_t r = 0; r < s; ++r)
      for (std::size_t c = 0; c < s; ++c)
        if (sgn(a(r, c)) != 0) {
          sigma[r] = c;
          sign[r] = a(r, c);
        }
    MultiPoly z = substitute_diagonal(p, sign, b);
    MultiPoly out(s);
    Exponent e2(s);
    for (const auto& [e, c] : z.terms()) {
      for (std::size_t i = 0; i < s; ++i) e2[sigma[i]] = e[i];
      out.add_term(e2, c);
    }
    return out;
  }
  std::vector<MultiPoly> forms;
  for (std::size_t i = 0; i < s; ++i) {
    MultiPoly f = MultiPoly::constant(s, b[i]);
    for (std::size_t j = 0; j < s; ++j)
      if (sgn(a(i, j)) != 0) f += MultiPoly::variable(s, j) * a(i, j);
    forms.push_back(std::move(f));
  }
  std::vector<std::vector<MultiPoly>> powers(s);
  auto power = [&](std::size_t i, int k) -> const MultiPoly& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(MultiPoly::constant(s, 1));
    while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * forms[i]);
    return pw[k];
  };
  MultiPoly out(s);
  for (const auto& [e, c] : p.terms()) {
    MultiPoly t = MultiPoly::constant(s, c);
    for (std::size_t i = 0; i < s; ++i)
      if (e[i] > 0) t = t * power(i, e[i]);
    out += t;
  }
  return out;
}

MultiPoly poly_translate(const MultiPoly& p, const RationalVector& shift) {
  return substitute_diagonal(p, RationalVector(p.dim(), Rational(1)), shift);
}

std::size_t monomial_count(std::size_t dim, int degree) {
  // C(dim + degree, dim)
  Integer c = 1;
  for (std::size_t i = 1; i <= dim; ++i) c = c * (degree + i) / i;
  return static_cast<std::size_t>(c.get_ui());
}

std::vector<Exponent> monomials_up_to(std::size_t dim, int degree) {
  std::vector<Exponent> out;
  Exponent e(dim, 0);
  for (int total = 0; total <= degree; ++total) {
    // Compositions of total into dim parts, lexicographically descending in e[0].
    std::vector<Exponent> level;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == dim) {
        e[i] = left;
        level.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[i] = k;
        rec(i + 1, left - k);
      }
    };
    if (dim == 0) {
      if (total == 0) out.push_back({});
      continue;
    }
    rec(0, total);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace fastspline
