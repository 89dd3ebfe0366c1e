#include "harness/convergence.hpp"

#include <cmath>
#include <sstream>

#include "common/error.hpp"
#include "harness/numeric.hpp"
#include "runtime/interpreter.hpp"
#include "spline/corpus.hpp"

namespace fastspline {

Prefilter Prefilter::identity(std::size_t dim) { return {{{IntVector(dim, 0), Rational(1)}}}; }

bool Prefilter::is_identity() const {
  return taps.size() == 1 && taps[0].second == 1 &&
         std::all_of(taps[0].first.begin(), taps[0].first.end(), [](long long v) { return v == 0; });
}

Prefilter builtin_prefilter(const std::string& spline, std::size_t dim) {
  if (spline == "bcc-quintic-rd") {
    // Cancels the second-moment term of the quintic RD on BCC: 5/3 at the
    // centre, -1/12 at the eight nearest neighbours.
    Prefilter p{{{IntVector{0, 0, 0}, make_rational(5, 3)}}};
    for (int m = 0; m < 8; ++m)
      p.taps.push_back({IntVector{m & 1 ? 1 : -1, m & 2 ? 1 : -1, m & 4 ? 1 : -1}, make_rational(-1, 12)});
    return p;
  }
  return Prefilter::identity(dim);
}

Prefilter parse_prefilter(std::string_view text, std::size_t dim) {
  Prefilter p;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != dim + 1) fail(ErrorKind::Parse, "prefilter tap needs " + std::to_string(dim) + " offsets and a weight");
    IntVector off(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      std::size_t used = 0;
      off[i] = std::stoll(tok[i], &used);
      if (used != tok[i].size()) fail(ErrorKind::Parse, "bad prefilter offset '" + tok[i] + "'");
    }
    p.taps.push_back({off, parse_rational(tok[dim])});
  }
  if (p.taps.empty()) fail(ErrorKind::Parse, "prefilter has no taps");
  return p;
}

TargetFunction gaussian_target(double sigma) {
  double k = 1.0 / (2.0 * sigma * sigma);
  return [k](std::span<const double> x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return std::exp(-k * r2);
  };
}

double fit_order(const std::vector<double>& scales, const std::vector<double>& errors) {
  std::size_t n = scales.size();
  if (n < 2) return 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = -std::log2(scales[i]), y = -std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  return den == 0 ? 0 : (n * sxy - sx * sy) / den;
}

CoefficientGrid grid_for_box(const EvaluationPlan& plan, double h, double half_width, double margin,
                             BoundaryPolicy policy) {
  std::size_t s = plan.dim;
  IntVector origin(s), extent(s);
  for (std::size_t i = 0; i < s; ++i) {
    double d = static_cast<double>(plan.diagonal[i]);
    double lo = -half_width / h - margin, hi = half_width / h + margin;
    long long a = static_cast<long long>(std::floor(lo / d)) - 1;
    long long b = static_cast<long long>(std::ceil(hi / d)) + 1;
    origin[i] = a;
    extent[i] = b - a + 1;
  }
  return CoefficientGrid(plan.diagonal, plan.coset_shifts, extent, origin, policy);
}

ConvergenceReport run_convergence(const SplineOnLattice& sol, const EvaluationPlan& plan, const TargetFunction& f,
                                  const Prefilter& prefilter, const ConvergenceOptions& opts) {
  std::size_t s = plan.dim;
  if (opts.halvings < 0 || opts.samples == 0) fail(ErrorKind::InvalidArgument, "need samples and halvings >= 0");
  for (const auto& [off, w] : prefilter.taps) {
    if (off.size() != s) fail(ErrorKind::InvalidArgument, "prefilter tap of wrong dimension");
    if (!sol.lattice.contains(off)) fail(ErrorKind::InvalidArgument, "prefilter offset is not a lattice vector");
  }
  ConvergenceReport rep;
  rep.spline = plan.spline;
  rep.lattice = plan.lattice;
  rep.seed = opts.seed;
  rep.samples = opts.samples;
  for (const auto& e : spline_corpus())
    if (e.name == plan.spline) rep.expected_order = e.order;

  double h0 = opts.h0 > 0 ? opts.h0 : 0.125 / std::pow(sol.lattice.index().get_d(), 1.0 / static_cast<double>(s));
  RationalVector lo = sol.spline.support().lower_bound(), hi = sol.spline.support().upper_bound();
  double radius = 0;
  for (std::size_t i = 0; i < s; ++i) radius = std::max({radius, std::abs(lo[i].get_d()), std::abs(hi[i].get_d())});
  PlanInterpreter interp(plan);
  std::vector<std::pair<std::vector<double>, double>> taps;
  for (const auto& [off, w] : prefilter.taps)
    taps.push_back({std::vector<double>(off.begin(), off.end()), w.get_d()});

  for (int level = 0; level <= opts.halvings; ++level) {
    double h = std::ldexp(h0, -level);
    CoefficientGrid grid = grid_for_box(plan, h, opts.half_width, radius, opts.policy);
    std::size_t total = grid.cells_per_coset() * grid.coset_count();
    if (total > opts.site_budget)
      fail(ErrorKind::Budget, "convergence grid needs " + std::to_string(total) + " sites, budget " +
                                  std::to_string(opts.site_budget));
    std::size_t cells = grid.cells_per_coset();
    for (std::size_t k = 0; k < grid.coset_count(); ++k) {
      std::vector<double>& data = grid.coset(k);
      parallel_for(cells, opts.threads, [&](std::size_t flat) {
        std::vector<double> site(s), p(s);
        std::size_t rest = flat;
        for (std::size_t i = 0; i < s; ++i) {
          long long m = grid.origin()[i] + static_cast<long long>(rest % static_cast<std::size_t>(grid.extent()[i]));
          rest /= static_cast<std::size_t>(grid.extent()[i]);
          site[i] = static_cast<double>(grid.shifts()[k][i] + grid.diagonal()[i] * m);
        }
        double c = 0;
        for (const auto& [off, w] : taps) {
          for (std::size_t i = 0; i < s; ++i) p[i] = h * (site[i] + off[i]);
          c += w * f(p);
        }
        data[flat] = c;
      });
    }
    std::vector<double> sq(opts.samples);
    parallel_for(opts.samples, opts.threads, [&](std::size_t n) {
      std::vector<double> p(s), x(s);
      for (std::size_t i = 0; i < s; ++i) {
        p[i] = opts.half_width * (2.0 * counter_uniform(opts.seed, n * s + i) - 1.0);
        x[i] = p[i] / h;
      }
      double e = f(p) - interp.evaluate(x, grid);
      sq[n] = e * e;
    });
    double volume = std::pow(2.0 * opts.half_width, static_cast<double>(s));
    rep.scales.push_back(h);
    rep.errors.push_back(std::sqrt(volume * pairwise_sum(sq) / static_cast<double>(opts.samples)));
    rep.sites.push_back(total);
  }
  rep.fitted_order = fit_order(rep.scales, rep.errors);
  return rep;
}

}  // namespace fastspline
