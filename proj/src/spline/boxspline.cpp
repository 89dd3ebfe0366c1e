#include "spline/boxspline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "common/combinatorics.hpp"
#include "common/error.hpp"

namespace fastspline {

DirectionMatrix::DirectionMatrix(std::vector<RationalVector> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) fail(ErrorKind::InvalidArgument, "direction matrix has no columns");
  dim_ = columns_[0].size();
  for (const auto& c : columns_)
    if (c.size() != dim_ || dim_ == 0) fail(ErrorKind::InvalidArgument, "direction columns differ in length");
  if (columns_.size() < dim_ || rank_of(columns_) != dim_)
    fail(ErrorKind::InvalidArgument, "direction matrix columns do not span");
}

DirectionMatrix DirectionMatrix::from_int_columns(const std::vector<IntVector>& columns) {
  std::vector<RationalVector> cols;
  for (const auto& c : columns) cols.push_back(to_rational(c));
  return DirectionMatrix(std::move(cols));
}

namespace {

using i128 = __int128;

struct Overflow {};

i128 mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}

i128 plus(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}

int leading_sign(const RationalVector& row) {
  for (const auto& v : row)
    if (sgn(v) != 0) return sgn(v);
  return 0;
}

}  // namespace

struct BoxSplineEvaluator::Impl {
  std::size_t s = 0;
  std::vector<RationalVector> dirs;  // distinct directions
  std::vector<int> mult;
  std::size_t n = 0;
  bool integral = true;
  std::vector<IntVector> idirs;

  struct MaskInfo {
    bool ready = false;
    bool spans = false;
    std::vector<std::size_t> basis;           // direction indices
    RationalMatrix inverse;                   // B^{-1}
    Rational abs_det;
    std::vector<std::vector<i128>> scaled;    // Delta * B^{-1}
    std::vector<int> lead;                    // leading sign per row of B^{-1}
    i128 base = 0;                            // Delta / |det B|
  };
  std::vector<MaskInfo> masks;
  Integer delta = 1;
  bool delta_fits = true;
  i128 delta128 = 1;

  // State layout: digit per direction, radix (m+1)^2, value r*(m+1)+a.
  std::vector<std::size_t> radix_stride;
  std::size_t state_count = 1;

  std::vector<i128> memo;
  std::vector<std::uint32_t> stamp;
  std::uint32_t generation = 0;

  // Per-evaluation data.
  i128 q = 1, qdelta = 1;
  std::vector<i128> X;
  std::map<std::vector<int>, Rational> rmemo;
  RationalVector rx;

  explicit Impl(const DirectionMatrix& xi) : s(xi.dim()), n(xi.size()) {
    std::map<RationalVector, int> seen;
    for (const auto& c : xi.columns()) {
      if (is_zero(c)) fail(ErrorKind::InvalidArgument, "zero direction");
      auto it = seen.find(c);
      if (it == seen.end()) {
        seen.emplace(c, static_cast<int>(dirs.size()));
        dirs.push_back(c);
        mult.push_back(1);
      } else {
        ++mult[it->second];
      }
    }
    if (dirs.size() > 20) fail(ErrorKind::Budget, "too many distinct directions");
    for (const auto& d : dirs) {
      IntVector v;
      for (const auto& c : d) {
        if (!is_integer(c) || !c.get_num().fits_slong_p()) {
          integral = false;
          break;
        }
        v.push_back(c.get_num().get_si());
      }
      idirs.push_back(v);
    }
    masks.resize(std::size_t{1} << dirs.size());
    // Delta: lcm of |det| over all bases, so Delta * B^{-1} is integral.
    for_each_subset(dirs.size(), s, [&](const std::vector<std::size_t>& pick) {
      RationalMatrix b(s, s);
      for (std::size_t k = 0; k < s; ++k)
        for (std::size_t i = 0; i < s; ++i) b(i, k) = dirs[pick[k]][i];
      Rational d = abs(determinant(b));
      if (sgn(d) != 0) {
        if (!is_integer(d)) integral = false;
        else mpz_lcm(delta.get_mpz_t(), delta.get_mpz_t(), d.get_num_mpz_t());
      }
    });
    delta_fits = delta.fits_slong_p();
    if (delta_fits) delta128 = delta.get_si();
    std::size_t stride = 1;
    for (int m : mult) {
      radix_stride.push_back(stride);
      stride *= static_cast<std::size_t>((m + 1) * (m + 1));
    }
    state_count = stride;
    if (integral && delta_fits && state_count <= (std::size_t{1} << 24)) {
      memo.assign(state_count, 0);
      stamp.assign(state_count, 0);
    } else {
      integral = false;
    }
  }

  const MaskInfo& info(std::size_t mask) {
    MaskInfo& mi = masks[mask];
    if (mi.ready) return mi;
    mi.ready = true;
    std::vector<RationalVector> chosen;
    for (std::size_t j = 0; j < dirs.size() && mi.basis.size() < s; ++j) {
      if (!((mask >> j) & 1)) continue;
      chosen.push_back(dirs[j]);
      if (rank_of(chosen) == chosen.size())
        mi.basis.push_back(j);
      else
        chosen.pop_back();
    }
    if (mi.basis.size() < s) return mi;
    mi.spans = true;
    RationalMatrix b = RationalMatrix::from_columns(chosen);
    mi.inverse = *inverse(b);
    mi.abs_det = abs(determinant(b));
    for (std::size_t r = 0; r < s; ++r) mi.lead.push_back(leading_sign(mi.inverse.row(r)));
    if (integral) {
      mi.scaled.assign(s, std::vector<i128>(s));
      for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) {
          Rational v = mi.inverse(r, c) * Rational(delta);
          mi.scaled[r][c] = v.get_num().get_si();
        }
      mi.base = Rational(Rational(delta) / mi.abs_det).get_num().get_si();
    }
    return mi;
  }

  // Scaled recursion; r and a are digits per direction.
  i128 rec(std::vector<int>& r, std::vector<int>& a, int nr) {
    std::size_t key = 0, mask = 0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      key += radix_stride[j] * static_cast<std::size_t>(r[j] * (mult[j] + 1) + a[j]);
      if (r[j] > 0) mask |= std::size_t{1} << j;
    }
    if (stamp[key] == generation) return memo[key];
    i128 result = compute(r, a, nr, mask);
    stamp[key] = generation;
    memo[key] = result;
    return result;
  }

  i128 compute(std::vector<int>& r, std::vector<int>& a, int nr, std::size_t mask) {
    std::vector<i128> y(X);
    for (std::size_t j = 0; j < dirs.size(); ++j)
      if (a[j])
        for (std::size_t i = 0; i < s; ++i) y[i] -= q * a[j] * idirs[j][i];
    // Outside the closed bounding box of the remaining zonotope: zero even
    // after perturbation.
    for (std::size_t i = 0; i < s; ++i) {
      i128 lo = 0, hi = 0;
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        i128 v = static_cast<i128>(r[j]) * idirs[j][i];
        (v > 0 ? hi : lo) += v;
      }
      if (y[i] < q * lo || y[i] > q * hi) return 0;
    }
    const MaskInfo& mi = info(mask);
    if (!mi.spans) return 0;
    std::vector<i128> coeff(s);
    for (std::size_t k = 0; k < s; ++k) {
      i128 acc = 0;
      for (std::size_t i = 0; i < s; ++i) acc = plus(acc, mul(mi.scaled[k][i], y[i]));
      coeff[k] = acc;
    }
    if (nr == static_cast<int>(s)) {
      // Remaining directions are exactly the basis when they span.
      for (std::size_t k = 0; k < s; ++k) {
        i128 c = coeff[k];
        bool in = (c > 0 && c < qdelta) || (c == 0 && mi.lead[k] > 0) || (c == qdelta && mi.lead[k] < 0);
        if (!in) return 0;
      }
      return mi.base;
    }
    i128 sum = 0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (r[j] == 0) continue;
      i128 t = 0;
      for (std::size_t k = 0; k < s; ++k)
        if (mi.basis[k] == j) t = coeff[k];
      i128 other = plus(mul(r[j], qdelta), -t);
      --r[j];
      if (t != 0) sum = plus(sum, mul(t, rec(r, a, nr - 1)));
      if (other != 0) {
        ++a[j];
        sum = plus(sum, mul(other, rec(r, a, nr - 1)));
        --a[j];
      }
      ++r[j];
    }
    return sum;
  }

  Rational rational_rec(std::vector<int>& r, std::vector<int>& a, int nr) {
    std::vector<int> key = r;
    key.insert(key.end(), a.begin(), a.end());
    if (auto it = rmemo.find(key); it != rmemo.end()) return it->second;
    Rational result = rational_compute(r, a, nr);
    rmemo.emplace(std::move(key), result);
    return result;
  }

  Rational rational_compute(std::vector<int>& r, std::vector<int>& a, int nr) {
    RationalVector y = rx;
    std::size_t mask = 0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (r[j] > 0) mask |= std::size_t{1} << j;
      if (a[j])
        for (std::size_t i = 0; i < s; ++i) y[i] -= dirs[j][i] * a[j];
    }
    for (std::size_t i = 0; i < s; ++i) {
      Rational lo = 0, hi = 0;
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        Rational v = dirs[j][i] * r[j];
        (sgn(v) > 0 ? hi : lo) += v;
      }
      if (y[i] < lo || y[i] > hi) return 0;
    }
    const MaskInfo& mi = info(mask);
    if (!mi.spans) return 0;
    RationalVector t = mi.inverse.apply(y);
    if (nr == static_cast<int>(s)) {
      for (std::size_t k = 0; k < s; ++k) {
        bool in = (t[k] > 0 && t[k] < 1) || (t[k] == 0 && mi.lead[k] > 0) || (t[k] == 1 && mi.lead[k] < 0);
        if (!in) return 0;
      }
      return 1 / mi.abs_det;
    }
    Rational sum = 0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (r[j] == 0) continue;
      Rational tj = 0;
      for (std::size_t k = 0; k < s; ++k)
        if (mi.basis[k] == j) tj = t[k];
      Rational other = Rational(r[j]) - tj;
      --r[j];
      if (sgn(tj) != 0) sum += tj * rational_rec(r, a, nr - 1);
      if (sgn(other) != 0) {
        ++a[j];
        sum += other * rational_rec(r, a, nr - 1);
        --a[j];
      }
      ++r[j];
    }
    return sum / (nr - static_cast<int>(s));
  }

  Rational evaluate(const RationalVector& x) {
    if (x.size() != s) fail(ErrorKind::InvalidArgument, "box spline point has wrong dimension");
    std::vector<int> r(mult), a(dirs.size(), 0);
    if (integral) {
      Integer qq = lcm_of_denominators(x);
      bool fits = qq.fits_slong_p();
      for (const auto& v : x) fits = fits && Rational(v * Rational(qq)).get_num().fits_slong_p();
      if (fits) {
        try {
          q = qq.get_si();
          qdelta = mul(q, delta128);
          X.resize(s);
          for (std::size_t i = 0; i < s; ++i) X[i] = Rational(x[i] * Rational(qq)).get_num().get_si();
          if (++generation == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            generation = 1;
          }
          i128 num = rec(r, a, static_cast<int>(n));
          // M = N / ((q Delta)^(n-s) (n-s)! Delta)
          Integer den = delta;
          Integer qd = qq * delta;
          for (std::size_t k = 0; k < n - s; ++k) den *= qd * static_cast<unsigned long>(k + 1);
          return make_rational(to_integer(num), den);
        } catch (const Overflow&) {
          r = mult;
          std::fill(a.begin(), a.end(), 0);
        }
      }
    }
    rx = x;
    rmemo.clear();
    return rational_rec(r, a, static_cast<int>(n));
  }

  static Integer to_integer(i128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    Integer hi = static_cast<unsigned long>(u >> 64);
    Integer lo = static_cast<unsigned long>(u & ~std::uint64_t{0});
    Integer out = (hi << 64) + lo;
    return neg ? Integer(-out) : out;
  }
};

BoxSplineEvaluator::BoxSplineEvaluator(const DirectionMatrix& xi) : impl_(std::make_unique<Impl>(xi)) {}
BoxSplineEvaluator::~BoxSplineEvaluator() = default;
BoxSplineEvaluator::BoxSplineEvaluator(BoxSplineEvaluator&&) noexcept = default;

Rational BoxSplineEvaluator::operator()(const RationalVector& x) { return impl_->evaluate(x); }

Rational boxspline_eval_exact(const DirectionMatrix& xi, const RationalVector& x) {
  BoxSplineEvaluator eval(xi);
  return eval(x);
}

ConvexPolytope boxspline_support(const DirectionMatrix& xi) { return minkowski_sum_segments(xi.columns()); }

std::vector<Hyperplane> boxspline_mesh_planes(const DirectionMatrix& xi) {
  std::size_t s = xi.dim();
  ConvexPolytope support = boxspline_support(xi);
  std::vector<RationalVector> distinct;
  for (const auto& c : xi.columns())
    if (std::find(distinct.begin(), distinct.end(), c) == distinct.end()) distinct.push_back(c);
  std::set<RationalVector> normals;
  for_each_subset(distinct.size(), s - 1, [&](const std::vector<std::size_t>& pick) {
    std::vector<RationalVector> sub;
    for (auto k : pick) sub.push_back(distinct[k]);
    if (rank_of(sub) + 1 == s) normals.insert(make_hyperplane(orthogonal_complement(sub, s), 0).normal);
  });
  std::set<Hyperplane> planes;
  for (const auto& nm : normals) {
    std::set<Rational> offsets{Rational(0)};
    for (const auto& c : xi.columns()) {
      Rational v = dot(nm, c);
      std::set<Rational> next = offsets;
      for (const auto& o : offsets) next.insert(o + v);
      offsets = std::move(next);
    }
    for (const auto& o : offsets) {
      Hyperplane h{nm, o};
      if (support.crossed_by(h)) planes.insert(h);
    }
  }
  return {planes.begin(), planes.end()};
}

Arrangement boxspline_mesh(const DirectionMatrix& xi) {
  return build_arrangement(boxspline_support(xi), boxspline_mesh_planes(xi));
}

}  // namespace fastspline
