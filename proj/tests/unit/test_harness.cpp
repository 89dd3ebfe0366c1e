#include <cmath>
#include <random>

#include "doctest.h"
#include "harness/convergence.hpp"
#include "harness/numeric.hpp"
#include "harness/render.hpp"
#include "runtime/interpreter.hpp"
#include "spline/corpus.hpp"

using namespace fastspline;

TEST_CASE("pairwise sum and the counter generator") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(counter_uniform(7, 3) == counter_uniform(7, 3));
  CHECK(counter_uniform(7, 3) != counter_uniform(8, 3));
  // Known SplitMix64 output for state 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  double mean = 0;
  for (int i = 0; i < 20000; ++i) {
    double u = counter_uniform(1, static_cast<std::uint64_t>(i));
    CHECK((u >= 0 && u < 1));
    mean += u / 20000;
  }
  CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("parallel_for visits each index once and forwards exceptions") {
  std::vector<int> hits(101, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
}

TEST_CASE("order fit on synthetic data") {
  std::vector<double> h{0.1, 0.05, 0.025, 0.0125}, e;
  for (double x : h) e.push_back(3 * x * x * x);
  CHECK(fit_order(h, e) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("prefilters") {
  Prefilter id = Prefilter::identity(2);
  CHECK(id.is_identity());
  CHECK(builtin_prefilter("tp2", 2).is_identity());
  Prefilter q = builtin_prefilter("bcc-quintic-rd", 3);
  Rational sum = 0;
  for (const auto& [off, w] : q.taps) sum += w;
  CHECK(sum == 1);
  Prefilter parsed = parse_prefilter("# centre\n0 0 2\n1 1 -1/2\n-1 -1 -1/2\n", 2);
  CHECK(parsed.taps.size() == 3);
  CHECK(parsed.taps[1].second == make_rational(-1, 2));
  CHECK_THROWS(parse_prefilter("1 2\n", 2));
  CHECK_THROWS(parse_prefilter("", 2));
}

// With the quasi-interpolation prefilter an order-4 spline reproduces cubic
// polynomials from their unit-scale samples; without it only linear ones.
TEST_CASE("quintic prefilter restores cubic reproduction") {
  SplineOnLattice sol = corpus_spline_on_lattice("bcc-quintic-rd");
  PlanOptions o;
  o.grouped = true;
  EvaluationPlan plan = compile_plan(sol, o);
  PlanInterpreter in(plan);
  auto f = [](double x, double y, double z) { return x * x * y - 0.5 * z * z * z + x * z + 0.3 * y; };
  Prefilter pre = builtin_prefilter("bcc-quintic-rd", 3);
  IntVector ext(3, 10), org(3, -5);
  CoefficientGrid raw(plan.diagonal, plan.coset_shifts, ext, org), filtered = raw;
  auto sample = [&](const IntVector& n) { return f(n[0], n[1], n[2]); };
  raw.fill(sample);
  filtered.fill([&](const IntVector& n) {
    double v = 0;
    for (const auto& [t, w] : pre.taps) v += w.get_d() * sample(IntVector{n[0] + t[0], n[1] + t[1], n[2] + t[2]});
    return v;
  });
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst_filtered = 0, worst_raw = 0;
  for (int n = 0; n < 100; ++n) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    double exact = f(x[0], x[1], x[2]);
    worst_filtered = std::max(worst_filtered, std::abs(in.evaluate(x, filtered) - exact));
    worst_raw = std::max(worst_raw, std::abs(in.evaluate(x, raw) - exact));
  }
  CHECK(worst_filtered < 1e-10);
  CHECK(worst_raw > 1e-3);
}

TEST_CASE("convergence of a constant target is exact") {
  SplineOnLattice sol = corpus_spline_on_lattice("tp2");
  EvaluationPlan plan = compile_plan(sol, PlanOptions{});
  ConvergenceOptions opts;
  opts.halvings = 2;
  opts.samples = 500;
  ConvergenceReport r = run_convergence(sol, plan, [](std::span<const double>) { return 2.5; },
                                        Prefilter::identity(2), opts);
  for (double e : r.errors) CHECK(e < 1e-13);
}

TEST_CASE("convergence reports are reproducible") {
  SplineOnLattice sol = corpus_spline_on_lattice("tp2");
  EvaluationPlan plan = compile_plan(sol, PlanOptions{});
  ConvergenceOptions opts;
  opts.halvings = 3;
  opts.samples = 2000;
  opts.threads = 3;
  ConvergenceReport a = run_convergence(sol, plan, gaussian_target(0.125), Prefilter::identity(2), opts);
  opts.threads = 1;
  ConvergenceReport b = run_convergence(sol, plan, gaussian_target(0.125), Prefilter::identity(2), opts);
  CHECK(a.errors == b.errors);
  CHECK(a.fitted_order == doctest::Approx(2).epsilon(0.15));
  CHECK(a.expected_order == 2);
}

TEST_CASE("Marschner-Lobb and the renderer") {
  // At the origin rho_r = cos(2 pi fm) = 1.
  double v0 = marschner_lobb(0, 0, 0, 6, 0.25);
  CHECK(v0 == doctest::Approx((1.0 + 0.25 * (1.0 + 1.0)) / 2.5));
  SplineOnLattice sol = corpus_spline_on_lattice("cc-trilinear");
  EvaluationPlan plan = compile_plan(sol, PlanOptions{});
  SampledVolume vol = sample_marschner_lobb(plan, sol.lattice, 16, 6, 0.25);
  RenderJob job;
  job.plan = &plan;
  job.volume = &vol.grid;
  job.h = vol.h;
  job.width = job.height = 24;
  job.transfer = default_transfer();
  job.threads = 2;
  Image a = render_volume(job);
  job.threads = 1;
  Image b = render_volume(job);
  CHECK(a.rgb == b.rgb);
  std::string ppm = a.to_ppm();
  Image back = parse_ppm(ppm);
  CHECK(back.width == 24);
  CHECK(back.rgb == a.rgb);
  bool lit = false;
  for (auto c : a.rgb) lit = lit || c != a.rgb[0];
  CHECK(lit);
}
