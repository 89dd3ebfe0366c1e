#include <cstdio>
#include <random>

#include "common/error.hpp"
#include "doctest.h"
#include "plancompile/plan.hpp"
#include "analysis/region.hpp"
#include "runtime/grid.hpp"
#include "runtime/interpreter.hpp"
#include "runtime/kernel_lang.hpp"
#include "spline/corpus.hpp"

using namespace fastspline;

namespace {

struct Setup {
  SplineOnLattice sol;
  EvaluationPlan plan;
};

const Setup& setup(const std::string& name, bool grouped = false) {
  static std::map<std::pair<std::string, bool>, Setup> cache;
  auto key = std::make_pair(name, grouped);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  SplineOnLattice sol = corpus_spline_on_lattice(name);
  PlanOptions o;
  o.grouped = grouped;
  EvaluationPlan plan = compile_plan(sol, o);
  return cache.emplace(key, Setup{std::move(sol), std::move(plan)}).first->second;
}

CoefficientGrid grid_for(const EvaluationPlan& plan, long long half = 5) {
  IntVector ext(plan.dim, 2 * half), org(plan.dim, -half);
  return CoefficientGrid(plan.diagonal, plan.coset_shifts, ext, org);
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim, double a) {
  std::uniform_real_distribution<double> u(-a, a);
  std::vector<double> x(dim);
  for (auto& v : x) v = u(rng);
  return x;
}

const std::string kSplines[] = {"tp2", "zp", "qc-tp", "bcc-linear-rd", "fcc-6dir"};

}  // namespace

TEST_CASE("boundary policies") {
  CoefficientGrid g(IntVector{1}, {IntVector{0}}, IntVector{4}, IntVector{0});
  for (long long m = 0; m < 4; ++m) g.at(0, {m}) = static_cast<double>(10 + m);
  auto at = [&](long long m) { return g.fetch_nearest(0, std::span<const long long>(&m, 1)); };
  CHECK(at(-1) == 0);
  CHECK(at(4) == 0);
  g.set_policy(BoundaryPolicy::Clamp);
  CHECK(at(-3) == 10);
  CHECK(at(9) == 13);
  g.set_policy(BoundaryPolicy::Mirror);
  CHECK(at(-1) == 11);
  CHECK(at(-2) == 12);
  CHECK(at(4) == 12);
  CHECK(at(5) == 11);
  CHECK(at(6) == 10);
  CHECK(at(7) == 11);
  CHECK(parse_boundary_policy("mirror") == BoundaryPolicy::Mirror);
  CHECK_THROWS(parse_boundary_policy("wrap"));
}

TEST_CASE("linear fetch equals the weighted corner sum") {
  CoefficientGrid g(IntVector{2, 2, 2}, {IntVector{0, 0, 0}}, IntVector{4, 4, 4}, IntVector{-2, -2, -2});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1), c(-2.5, 2.5);
  for (auto& v : g.coset(0)) v = u(rng);
  for (int n = 0; n < 100; ++n) {
    double p[3] = {c(rng), c(rng), c(rng)};
    long long base[3];
    double f[3];
    for (int i = 0; i < 3; ++i) {
      base[i] = static_cast<long long>(std::floor(p[i]));
      f[i] = p[i] - std::floor(p[i]);
    }
    double expect = 0;
    for (int corner = 0; corner < 8; ++corner) {
      long long m[3];
      double w = 1;
      for (int i = 0; i < 3; ++i) {
        bool up = corner >> i & 1;
        m[i] = base[i] + up;
        w *= up ? f[i] : 1 - f[i];
      }
      expect += w * g.fetch_nearest(0, m);
    }
    CHECK(g.fetch_linear(0, p, false) == doctest::Approx(expect).epsilon(1e-14));
    double shifted[3] = {p[0] + 0.5, p[1] + 0.5, p[2] + 0.5};
    CHECK(g.fetch_linear(0, shifted, true) == doctest::Approx(expect).epsilon(1e-14));
  }
  long long a[3] = {0, 0, 0}, b[3] = {1, 0, 0};
  double mid[3] = {0.5, 0, 0};
  CHECK(g.fetch_linear(0, mid, false) == doctest::Approx((g.fetch_nearest(0, a) + g.fetch_nearest(0, b)) / 2));
}

TEST_CASE("volume files round trip") {
  const EvaluationPlan& plan = setup("bcc-linear-rd").plan;
  CoefficientGrid g = grid_for(plan, 3);
  g.set_policy(BoundaryPolicy::Mirror);
  g.fill([](const IntVector& n) { return 0.25 * static_cast<double>(n[0]) - static_cast<double>(n[2]) / 3.0; });
  std::string path = "fastspline_test_volume.bin";
  save_grid(g, path);
  CoefficientGrid back = load_grid(path);
  std::remove(path.c_str());
  CHECK(back.policy() == BoundaryPolicy::Mirror);
  CHECK(back.extent() == g.extent());
  CHECK(back.origin() == g.origin());
  for (std::size_t k = 0; k < g.coset_count(); ++k) CHECK(back.coset(k) == g.coset(k));
  CHECK_THROWS(load_grid("no_such_volume.bin"));
}

TEST_CASE("plan equals brute force, float and exact") {
  std::mt19937_64 rng(5);
  for (const std::string& name : kSplines) {
    for (bool grouped : {false, true}) {
      CAPTURE(name);
      CAPTURE(grouped);
      const Setup& s = setup(name, grouped);
      PlanInterpreter in(s.plan);
      CoefficientGrid g = grid_for(s.plan);
      std::uniform_real_distribution<double> u(0.5, 1.5);
      for (std::size_t k = 0; k < g.coset_count(); ++k)
        for (auto& v : g.coset(k)) v = u(rng);
      double worst = 0;
      for (int n = 0; n < 200; ++n) {
        auto x = random_point(rng, s.plan.dim, 3);
        double a = in.evaluate(x, g), b = eval_bruteforce(s.sol, g, x);
        worst = std::max(worst, std::abs(a - b) / std::abs(b));
      }
      CHECK(worst <= 1e-12);
      for (int n = 0; n < 20; ++n) {
        RationalVector x(s.plan.dim);
        for (auto& v : x) v = make_rational(static_cast<long long>(rng() % 49) - 24, 8);
        CHECK(in.evaluate_exact(x, g) == eval_bruteforce_exact(s.sol, g, x));
      }
    }
  }
}

TEST_CASE("partition of unity through the plan") {
  std::mt19937_64 rng(6);
  for (const std::string& name : kSplines) {
    CAPTURE(name);
    const Setup& s = setup(name, true);
    PlanInterpreter in(s.plan);
    CoefficientGrid g = grid_for(s.plan);
    g.fill([](const IntVector&) { return 1.0; });
    for (int n = 0; n < 200; ++n) CHECK(in.evaluate(random_point(rng, s.plan.dim, 3), g) == doctest::Approx(1.0).epsilon(1e-12));
    RationalVector x(s.plan.dim, make_rational(1, 3));
    CHECK(in.evaluate_exact(x, g) == 1);
  }
}

TEST_CASE("a single coefficient reproduces the shifted basis function") {
  std::mt19937_64 rng(7);
  for (std::string name : {"zp", "bcc-linear-rd"}) {
    CAPTURE(name);
    const Setup& s = setup(name);
    PlanInterpreter in(s.plan);
    CoefficientGrid g = grid_for(s.plan);
    IntVector site = s.sol.cosets.site_of({s.sol.cosets.size() - 1, IntVector(s.plan.dim, 0)});
    g.fill([&](const IntVector& n) { return n == site ? 1.0 : 0.0; });
    for (int n = 0; n < 100; ++n) {
      auto x = random_point(rng, s.plan.dim, 2.5);
      std::vector<double> rel(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) rel[i] = x[i] - static_cast<double>(site[i]);
      double expect = s.sol.weight.get_d() * s.sol.spline.evaluate(rel);
      CHECK(in.evaluate(x, g) == doctest::Approx(expect).epsilon(1e-12).scale(1));
    }
  }
}

// A box spline not centred at the origin reproduces the linear function
// shifted by its support centroid.
TEST_CASE("linear functions are reproduced") {
  std::mt19937_64 rng(8);
  for (std::string name : {"tp2", "bcc-linear-rd", "fcc-6dir"}) {
    CAPTURE(name);
    const Setup& s = setup(name, true);
    PlanInterpreter in(s.plan);
    CoefficientGrid g = grid_for(s.plan, 6);
    std::vector<double> a{0.7, -1.3, 0.4};
    auto lin = [&](auto&& p) {
      double v = 0.25;
      for (std::size_t i = 0; i < s.plan.dim; ++i) v += a[i] * static_cast<double>(p[i]);
      return v;
    };
    g.fill([&](const IntVector& n) { return lin(n); });
    RationalVector c = s.sol.spline.support().vertex_centroid();
    for (int n = 0; n < 100; ++n) {
      auto x = random_point(rng, s.plan.dim, 2.5);
      std::vector<double> xc(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xc[i] = x[i] - c[i].get_d();
      CHECK(in.evaluate(x, g) == doctest::Approx(lin(xc)).epsilon(1e-11).scale(1));
    }
  }
}

TEST_CASE("lattice shifts of the data shift the reconstruction") {
  std::mt19937_64 rng(9);
  const Setup& s = setup("fcc-6dir", true);
  PlanInterpreter in(s.plan);
  CoefficientGrid g = grid_for(s.plan, 6), h = grid_for(s.plan, 6);
  IntVector t{1, 0, 1};  // an FCC vector off the coset sub-lattice
  REQUIRE(s.sol.lattice.contains(t));
  auto data = [](const IntVector& n) {
    return std::sin(0.3 * static_cast<double>(n[0]) + 0.11 * static_cast<double>(n[1] * n[2]));
  };
  g.fill(data);
  h.fill([&](const IntVector& n) { return data(IntVector{n[0] - t[0], n[1] - t[1], n[2] - t[2]}); });
  for (int n = 0; n < 100; ++n) {
    auto x = random_point(rng, 3, 2);
    std::vector<double> xt{x[0] + 1, x[1], x[2] + 1};
    CHECK(in.evaluate(xt, h) == doctest::Approx(in.evaluate(x, g)).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("plan classification matches the analysis") {
  std::mt19937_64 rng(10);
  const Setup& s = setup("bcc-linear-rd");
  PlanInterpreter in(s.plan);
  RegionOfEvaluation roe = enumerate_subregions(s.sol);
  std::uniform_real_distribution<double> u(0, 2);
  for (int n = 0; n < 200; ++n) {
    std::vector<double> y{u(rng), u(rng), u(rng)};
    RationalVector yr{from_double(y[0]), from_double(y[1]), from_double(y[2])};
    CHECK(in.subregion_of(y) == classify(roe, yr));
  }
}

TEST_CASE("grids with the wrong layout are refused") {
  const Setup& s = setup("bcc-linear-rd");
  PlanInterpreter in(s.plan);
  CoefficientGrid wrong(IntVector{1, 1, 1}, {IntVector{0, 0, 0}}, IntVector{4, 4, 4}, IntVector{0, 0, 0});
  CHECK_THROWS(in.check_grid(wrong));
}

TEST_CASE("kernel language") {
  CoefficientGrid g(IntVector{1, 1}, {IntVector{0, 0}}, IntVector{3, 3}, IntVector{0, 0});
  g.fill([](const IntVector& n) { return static_cast<double>(n[0] + 10 * n[1]); });
  std::string text =
      "fastspline-kernel 1\n"
      "dim 2\n"
      "half_texel 0\n"
      "input x0 x1\n"
      "table t = [2, -1.5, 4]\n"
      "# comment\n"
      "let a = floor(x0) + t[1]\n"
      "let b = select(x1 >= 1, 3, 5) * mod(7, 4)\n"
      "let c = fetch_nearest(0, 1, 2) + fetch_linear(0, 0.5, 0)\n"
      "out fma(a, 2, b) - -c / 2\n";
  KernelProgram p = KernelProgram::parse(text);
  CHECK(p.dim() == 2);
  CHECK(p.statement_count() == 3);
  CHECK(p.fetch_count() == 2);
  std::vector<double> x{2.7, 1.0};
  // a = 0.5, b = 9, c = 21 + 0.5
  CHECK(p.evaluate(x, g) == doctest::Approx(1 + 9 + 10.75));

  auto kind = [](const std::string& src) {
    try {
      KernelProgram::parse(src);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  std::string head = "fastspline-kernel 1\ndim 1\nhalf_texel 0\ninput x\n";
  CHECK(kind("fastspline-kernel 2\ndim 1\nhalf_texel 0\ninput x\nout x\n") == ErrorKind::Version);
  CHECK(kind(head + "out y\n") == ErrorKind::Parse);
  CHECK(kind(head + "let a = 1\nlet a = 2\nout a\n") == ErrorKind::Parse);
  CHECK(kind(head + "out (x + 1\n") == ErrorKind::Parse);
  CHECK(kind(head + "let a = 1\n") == ErrorKind::Parse);
  CoefficientGrid one(IntVector{1}, {IntVector{0}}, IntVector{2}, IntVector{0});
  KernelProgram bad = KernelProgram::parse(head + "out fetch_nearest(3, x)\n");
  std::vector<double> x1{0.0};
  CHECK_THROWS(bad.evaluate(x1, one));
}
