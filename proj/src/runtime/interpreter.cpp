#include "runtime/interpreter.hpp"

#include <cmath>

#include "analysis/region.hpp"
#include "common/error.hpp"

namespace fastspline {

PlanInterpreter::PlanInterpreter(EvaluationPlan plan) : plan_(std::move(plan)) {
  std::size_t s = plan_.dim;
  if (s == 0 || s > 8) fail(ErrorKind::InvalidArgument, "plan dimension must be 1..8");
  if (plan_.sigma.size() != plan_.r || plan_.subregions.empty()) fail(ErrorKind::Validation, "plan has no code table");
  for (const auto& h : plan_.planes) {
    std::vector<double> n;
    for (const auto& q : h.normal) n.push_back(q.get_d());
    plane_normal_.push_back(std::move(n));
    plane_offset_.push_back(h.offset.get_d());
  }
  for (const auto& sr : plan_.subregions) {
    std::vector<double> a;
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t l = 0; l < s; ++l) a.push_back(sr.a(i, l).get_d());
    a_.push_back(std::move(a));
    std::vector<double> b;
    for (const auto& q : sr.b) b.push_back(q.get_d());
    b_.push_back(std::move(b));
  }
  for (const auto& k : plan_.kernels) {
    std::vector<CompiledGroup> groups;
    for (const auto& g : k.schedule) {
      CompiledGroup cg{horner_factor(g.g), {}};
      scratch_size_ = std::max(scratch_size_, cg.g.ops().size());
      for (const auto& n : g.numer) {
        cg.numer.push_back(horner_factor(n));
        scratch_size_ = std::max(scratch_size_, cg.numer.back().ops().size());
      }
      groups.push_back(std::move(cg));
    }
    programs_.push_back(std::move(groups));
  }
}

void PlanInterpreter::check_grid(const CoefficientGrid& grid) const {
  if (grid.diagonal() != plan_.diagonal || grid.shifts() != plan_.coset_shifts)
    fail(ErrorKind::Mismatch, "grid coset layout does not match the plan");
}

std::size_t PlanInterpreter::subregion_of(std::span<const double> y) const {
  std::uint64_t q = 0;
  for (std::size_t p = 0; p < plane_normal_.size(); ++p) {
    double t = plane_normal_[p][0] * y[0];
    for (std::size_t i = 1; i < plan_.dim; ++i) t = t + plane_normal_[p][i] * y[i];
    if (t >= plane_offset_[p]) q |= std::uint64_t{1} << p;
  }
  long long j = plan_.sigma[q % plan_.r];
  return j < 0 ? 0 : static_cast<std::size_t>(j);
}

double PlanInterpreter::kernel_value(std::size_t kernel, std::size_t j, std::size_t coset, const double* y,
                                     const double* rho, const bool* flip, const CoefficientGrid& grid,
                                     std::vector<double>& scratch) const {
  std::size_t s = plan_.dim;
  const PlanKernel& pk = plan_.kernels[kernel];
  // Sub-regions that use another kernel read the reference sub-region's
  // tables, as the emitted program does.
  std::size_t jj = plan_.subregions[j].kernel == kernel ? j : pk.reference;
  const PlanSubRegion& sr = plan_.subregions[jj];
  const std::vector<double>& a = a_[jj];
  double z[8];
  for (std::size_t i = 0; i < s; ++i) {
    double t = a[i * s] * y[0];
    for (std::size_t l = 1; l < s; ++l) t = t + a[i * s + l] * y[l];
    z[i] = t + b_[jj][i];
  }
  std::span<const double> zs(z, s);
  auto site = [&](std::size_t member, double* out) {
    const IntVector& m = sr.site_map[member];
    for (std::size_t i = 0; i < s; ++i) {
      double mi = static_cast<double>(m[i]);
      out[i] = plan_.fold && flip[i] ? static_cast<double>(plan_.fold_reflect[i]) - mi : mi;
    }
  };
  double acc = 0.0;
  for (std::size_t gi = 0; gi < pk.schedule.size(); ++gi) {
    const FetchGroup& g = pk.schedule[gi];
    const CompiledGroup& cg = programs_[kernel][gi];
    double gw = cg.g.evaluate(zs, scratch);
    double n0[8];
    site(g.members[0], n0);
    if (g.axes.empty()) {
      long long cell[8];
      for (std::size_t i = 0; i < s; ++i) cell[i] = static_cast<long long>((rho[i] + n0[i]) / static_cast<double>(plan_.diagonal[i]));
      acc = acc + gw * grid.fetch_nearest(coset, std::span<const long long>(cell, s));
      continue;
    }
    double u[3];
    for (std::size_t ax = 0; ax < g.axes.size(); ++ax) {
      double num = cg.numer[ax].evaluate(zs, scratch);
      u[ax] = gw == 0.0 ? 0.0 : num / gw;
    }
    double coord[8];
    for (std::size_t i = 0; i < s; ++i) coord[i] = (rho[i] + n0[i]) / static_cast<double>(plan_.diagonal[i]);
    for (std::size_t ax = 0; ax < g.axes.size(); ++ax) {
      const IntVector& m0 = sr.site_map[g.members[0]];
      const IntVector& m1 = sr.site_map[g.members[std::size_t{1} << ax]];
      for (std::size_t i = 0; i < s; ++i) {
        double dir = static_cast<double>(m1[i] - m0[i]) / static_cast<double>(plan_.diagonal[i]);
        if (plan_.fold && flip[i]) dir = -dir;
        coord[i] = coord[i] + dir * u[ax];
      }
    }
    if (plan_.options.half_texel)
      for (std::size_t i = 0; i < s; ++i) coord[i] = coord[i] + 0.5;
    acc = acc + gw * grid.fetch_linear(coset, std::span<const double>(coord, s), plan_.options.half_texel);
  }
  return acc;
}

double PlanInterpreter::evaluate(std::span<const double> x, const CoefficientGrid& grid) const {
  std::size_t s = plan_.dim;
  if (x.size() != s) fail(ErrorKind::InvalidArgument, "point has wrong dimension");
  std::vector<double> scratch(scratch_size_);
  double total = 0.0;
  for (std::size_t k = 0; k < plan_.coset_count(); ++k) {
    double y[8], rho[8];
    bool flip[8] = {};
    for (std::size_t i = 0; i < s; ++i) {
      double d = static_cast<double>(plan_.diagonal[i]);
      double xp = x[i] - static_cast<double>(plan_.coset_shifts[k][i]);
      double r = d * std::floor(xp / d);
      double yi = xp - r;
      bool hi = yi >= d;
      yi = hi ? yi - d : yi;
      r = hi ? r + d : r;
      bool lo = yi < 0.0;
      yi = lo ? yi + d : yi;
      r = lo ? r - d : r;
      if (plan_.fold) {
        flip[i] = yi > d * 0.5;
        yi = flip[i] ? d - yi : yi;
      }
      y[i] = yi;
      rho[i] = r;
    }
    std::size_t j = subregion_of(std::span<const double>(y, s));
    double val = 0.0;
    if (plan_.options.predication) {
      for (std::size_t kk = 0; kk < plan_.kernels.size(); ++kk) {
        double v = kernel_value(kk, j, k, y, rho, flip, grid, scratch);
        val = plan_.subregions[j].kernel == kk ? v : val;
      }
    } else {
      val = kernel_value(plan_.subregions[j].kernel, j, k, y, rho, flip, grid, scratch);
    }
    total = total + val;
  }
  return total;
}

Rational grid_value_exact(const CoefficientGrid& grid, std::size_t coset, const IntVector& cell) {
  return Rational(grid.fetch_nearest(coset, std::span<const long long>(cell.data(), cell.size())));
}

Rational PlanInterpreter::evaluate_exact(const RationalVector& x, const CoefficientGrid& grid) const {
  std::size_t s = plan_.dim;
  if (x.size() != s) fail(ErrorKind::InvalidArgument, "point has wrong dimension");
  Rational total = 0;
  for (std::size_t k = 0; k < plan_.coset_count(); ++k) {
    RationalVector xp = sub(x, plan_.coset_shifts[k]);
    IntVector r = rho(xp, plan_.diagonal);
    RationalVector y = sub(xp, r);
    std::vector<bool> flip(s, false);
    if (plan_.fold)
      for (std::size_t i = 0; i < s; ++i) {
        flip[i] = 2 * y[i] > make_rational(plan_.diagonal[i]);
        if (flip[i]) y[i] = make_rational(plan_.diagonal[i]) - y[i];
      }
    long long jv = plan_.sigma[region_code(plan_.planes, y) % plan_.r];
    if (jv < 0) fail(ErrorKind::Internal, "exact point maps to an empty code slot");
    const PlanSubRegion& sr = plan_.subregions[static_cast<std::size_t>(jv)];
    const PlanKernel& pk = plan_.kernels[sr.kernel];
    RationalVector z = sr.a.apply(y);
    for (std::size_t i = 0; i < s; ++i) z[i] += sr.b[i];
    auto site = [&](std::size_t member) {
      IntVector n = sr.site_map[member];
      for (std::size_t i = 0; i < s; ++i)
        if (flip[i]) n[i] = plan_.fold_reflect[i] - n[i];
      return n;
    };
    for (const auto& g : pk.schedule) {
      Rational gw = g.g.evaluate(z);
      IntVector n0 = site(g.members[0]);
      RationalVector coord(s);
      for (std::size_t i = 0; i < s; ++i) coord[i] = make_rational(r[i] + n0[i], plan_.diagonal[i]);
      for (std::size_t ax = 0; ax < g.axes.size(); ++ax) {
        if (gw == 0) break;
        Rational u = g.numer[ax].evaluate(z) / gw;
        IntVector n1 = site(g.members[std::size_t{1} << ax]);
        for (std::size_t i = 0; i < s; ++i) coord[i] += u * make_rational(n1[i] - n0[i], plan_.diagonal[i]);
      }
      IntVector base(s);
      RationalVector frac(s);
      for (std::size_t i = 0; i < s; ++i) {
        base[i] = to_int64(floor_of(coord[i]));
        frac[i] = coord[i] - make_rational(base[i]);
      }
      Rational value = 0;
      for (std::size_t corner = 0; corner < (std::size_t{1} << s); ++corner) {
        Rational w = 1;
        IntVector cell = base;
        for (std::size_t i = 0; i < s && w != 0; ++i) {
          bool up = corner >> i & 1;
          w *= up ? frac[i] : Rational(1 - frac[i]);
          cell[i] += up;
        }
        if (w != 0) value += w * grid_value_exact(grid, k, cell);
      }
      total += gw * value;
    }
  }
  return total;
}

namespace {

// Cells m with D m in [lo, hi].
template <class F>
void for_cells_between(const IntVector& diagonal, const std::vector<long long>& lo, const std::vector<long long>& hi,
                       F&& f) {
  std::size_t s = diagonal.size();
  IntVector a(s), b(s);
  for (std::size_t i = 0; i < s; ++i) {
    double d = static_cast<double>(diagonal[i]);
    a[i] = static_cast<long long>(std::ceil(static_cast<double>(lo[i]) / d));
    b[i] = static_cast<long long>(std::floor(static_cast<double>(hi[i]) / d));
    if (a[i] > b[i]) return;
  }
  IntVector m = a;
  while (true) {
    f(static_cast<const IntVector&>(m));
    std::size_t i = 0;
    while (i < s && m[i] == b[i]) m[i] = a[i], ++i;
    if (i == s) return;
    ++m[i];
  }
}

}  // namespace

double eval_bruteforce(const SplineOnLattice& sol, const CoefficientGrid& grid, std::span<const double> x) {
  std::size_t s = grid.dim();
  RationalVector lo = sol.spline.support().lower_bound(), hi = sol.spline.support().upper_bound();
  double w = sol.weight.get_d();
  double total = 0.0;
  std::vector<double> rel(s);
  for (std::size_t k = 0; k < grid.coset_count(); ++k) {
    // Integer window on (x - shift) - supp, widened by one for rounding.
    std::vector<long long> a(s), b(s);
    for (std::size_t i = 0; i < s; ++i) {
      double base = x[i] - static_cast<double>(grid.shifts()[k][i]);
      a[i] = static_cast<long long>(std::floor(base - hi[i].get_d())) - 1;
      b[i] = static_cast<long long>(std::ceil(base - lo[i].get_d())) + 1;
    }
    for_cells_between(grid.diagonal(), a, b, [&](const IntVector& m) {
      for (std::size_t i = 0; i < s; ++i)
        rel[i] = x[i] - static_cast<double>(grid.shifts()[k][i] + grid.diagonal()[i] * m[i]);
      double phi = sol.spline.evaluate(std::span<const double>(rel));
      if (phi != 0.0) total += grid.fetch_nearest(k, std::span<const long long>(m.data(), s)) * (w * phi);
    });
  }
  return total;
}

Rational eval_bruteforce_exact(const SplineOnLattice& sol, const CoefficientGrid& grid, const RationalVector& x) {
  Rational total = 0;
  for (const auto& n : contributing_sites(sol, x)) {
    CoefficientIndex idx = sol.cosets.index_of(n);
    std::size_t k = idx.coset;
    // The grid may order cosets differently from the decomposition.
    if (grid.shifts()[k] != sol.cosets.shifts()[k]) {
      k = grid.coset_count();
      for (std::size_t c = 0; c < grid.coset_count(); ++c)
        if (grid.shifts()[c] == sol.cosets.shifts()[idx.coset]) k = c;
      if (k == grid.coset_count()) fail(ErrorKind::Mismatch, "grid lacks a coset of the lattice");
    }
    total += grid_value_exact(grid, k, idx.cell) * sol.spline.evaluate(sub(x, n)) * sol.weight;
  }
  return total;
}

}  // namespace fastspline
