// One line per acceptance criterion: "criterion N PASS|FAIL name: detail".
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "analysis/region.hpp"
#include "harness/convergence.hpp"
#include "harness/render.hpp"
#include "plancompile/emit.hpp"
#include "plancompile/plan.hpp"
#include "plancompile/planio.hpp"
#include "runtime/interpreter.hpp"
#include "runtime/kernel_lang.hpp"
#include "spline/corpus.hpp"

using namespace fastspline;

namespace {

// Pinned tolerances and sizes.
constexpr int kPoints = 10000;
constexpr double kOracleRel = 1e-9;
constexpr double kUnityAbs = 1e-10;
constexpr double kGroupedRel = 1e-9;
constexpr double kOrderTol = 0.3;
constexpr int kRenderVolume = 64;

const std::vector<std::string> kOracleSplines{"tp2", "zp", "qc-tp", "bcc-linear-rd", "bcc-quintic-rd", "fcc-6dir"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

const SplineOnLattice& sol_of(const std::string& name) {
  static std::map<std::string, SplineOnLattice> cache;
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  return cache.emplace(name, corpus_spline_on_lattice(name)).first->second;
}

const EvaluationPlan& plan_of(const std::string& name, bool grouped) {
  static std::map<std::pair<std::string, bool>, EvaluationPlan> cache;
  auto key = std::make_pair(name, grouped);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  PlanOptions o;
  o.grouped = grouped;
  return cache.emplace(key, compile_plan(sol_of(name), o)).first->second;
}

// Random coefficients in [0.5, 1.5]: the reconstruction stays away from zero
// so a relative error is meaningful.
CoefficientGrid random_grid(const EvaluationPlan& plan, std::uint64_t seed) {
  IntVector ext(plan.dim, 10), org(plan.dim, -5);
  CoefficientGrid g(plan.diagonal, plan.coset_shifts, ext, org);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (std::size_t k = 0; k < g.coset_count(); ++k)
    for (auto& v : g.coset(k)) v = u(rng);
  return g;
}

std::vector<std::vector<double>> random_points(std::size_t dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& v : p) v = u(rng);
  return pts;
}

// Rationals with dyadic and non-dyadic denominators.
RationalVector random_rational_point(std::mt19937_64& rng, std::size_t dim) {
  static const long long dens[] = {8, 64, 3, 7, 9, 12};
  RationalVector x(dim);
  for (auto& v : x) {
    long long d = dens[rng() % 6];
    v = make_rational(static_cast<long long>(rng() % static_cast<std::uint64_t>(6 * d + 1)) - 3 * d, d);
  }
  return x;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

Outcome oracle_equivalence(int exact_points) {
  Outcome out;
  for (const auto& name : kOracleSplines) {
    const EvaluationPlan& plan = plan_of(name, false);
    PlanInterpreter in(plan);
    CoefficientGrid g = random_grid(plan, 101);
    double worst = 0;
    for (const auto& x : random_points(plan.dim, kPoints, 102)) {
      double a = in.evaluate(x, g), b = eval_bruteforce(sol_of(name), g, x);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
    int mismatches = 0;
    std::mt19937_64 rng(103);
    for (int n = 0; n < exact_points; ++n) {
      RationalVector x = random_rational_point(rng, plan.dim);
      mismatches += in.evaluate_exact(x, g) != eval_bruteforce_exact(sol_of(name), g, x);
    }
    bool ok = worst <= kOracleRel && mismatches == 0;
    out.pass = out.pass && ok;
    out.detail += " " + name + "(rel " + fmt(worst) + ", exact " + std::to_string(exact_points - mismatches) + "/" +
                  std::to_string(exact_points) + ")";
  }
  return out;
}

Outcome partition_of_unity() {
  Outcome out;
  for (const auto& name : kOracleSplines) {
    const EvaluationPlan& plan = plan_of(name, true);
    PlanInterpreter in(plan);
    IntVector ext(plan.dim, 10), org(plan.dim, -5);
    CoefficientGrid g(plan.diagonal, plan.coset_shifts, ext, org);
    g.fill([](const IntVector&) { return 1.0; });
    double worst = 0;
    for (const auto& x : random_points(plan.dim, kPoints, 201)) worst = std::max(worst, std::abs(in.evaluate(x, g) - 1.0));
    out.pass = out.pass && worst <= kUnityAbs;
    out.detail += " " + name + "(" + fmt(worst) + ")";
  }
  return out;
}

Outcome lookup_counts() {
  Outcome out;
  for (auto [name, want] : std::vector<std::pair<std::string, std::size_t>>{
           {"cc-trilinear", 8}, {"bcc-linear-rd", 4}, {"bcc-quintic-rd", 32}, {"fcc-6dir", 16}}) {
    std::size_t got = plan_of(name, false).nearest_fetches();
    out.pass = out.pass && got == want;
    out.detail += " " + name + "=" + std::to_string(got) + "/" + std::to_string(want);
  }
  return out;
}

Outcome branch_free_tables() {
  Outcome out;
  for (const auto& name : kOracleSplines) {
    RegionOfEvaluation roe = enumerate_subregions(sol_of(name));
    RationalVector hi = roe.box.upper_bound();
    std::mt19937_64 rng(301);
    int wrong = 0;
    for (int n = 0; n < kPoints; ++n) {
      RationalVector y(roe.dim);
      for (std::size_t i = 0; i < roe.dim; ++i) y[i] = hi[i] * make_rational(static_cast<long long>(rng() % 100003), 100003);
      long long j = roe.sigma[region_code(roe.planes, y) % roe.r];
      std::size_t owner = roe.subregions.size(), owners = 0;
      for (std::size_t i = 0; i < roe.subregions.size(); ++i)
        if (roe.subregions[i].cell.contains_perturbed(y)) {
          owner = i;
          ++owners;
        }
      wrong += owners != 1 || j != static_cast<long long>(owner);
    }
    out.pass = out.pass && wrong == 0;
    out.detail += " " + name + "(Q=" + std::to_string(roe.plane_count()) + ", " + std::to_string(wrong) + " wrong)";
  }
  std::size_t q = enumerate_subregions(sol_of("bcc-quartic-trd")).plane_count();
  out.pass = out.pass && q == 9;
  out.detail += " bcc-quartic-trd(Q=" + std::to_string(q) + ")";
  return out;
}

Outcome fetch_grouping() {
  Outcome out;
  std::vector<std::string> names = kOracleSplines;
  names.push_back("tp2-quadratic");
  names.push_back("cc-trilinear");
  for (const auto& name : names) {
    const EvaluationPlan& ug = plan_of(name, false);
    const EvaluationPlan& gr = plan_of(name, true);
    PlanInterpreter a(ug), b(gr);
    CoefficientGrid g = random_grid(ug, 401);
    double worst = 0;
    for (const auto& x : random_points(ug.dim, kPoints, 402)) {
      double u = a.evaluate(x, g), v = b.evaluate(x, g);
      worst = std::max(worst, std::abs(u - v) / std::abs(u));
    }
    out.pass = out.pass && worst <= kGroupedRel;
    out.detail += " " + name + "(" + std::to_string(ug.scheduled_fetches()) + "->" +
                  std::to_string(gr.scheduled_fetches()) + ", " + fmt(worst) + ")";
  }
  // The four groups of the biquadratic kernel, in fetch order D, C, B, A.
  const EvaluationPlan& q = plan_of("tp2-quadratic", true);
  std::vector<Footprint> fps;
  for (const auto& g : q.kernels.at(0).schedule) fps.push_back(group_footprint(q, 0, g));
  bool four = fps.size() == 4;
  std::size_t dcba = four ? schedule_cost(fps, {0, 1, 2, 3}) : 0, dbca = four ? schedule_cost(fps, {0, 2, 1, 3}) : 0;
  out.pass = out.pass && dcba == 10 && dbca == 12;
  out.detail += " D-C-B-A=" + std::to_string(dcba) + " D-B-C-A=" + std::to_string(dbca);
  return out;
}

Outcome convergence() {
  Outcome out;
  for (auto [name, want] :
       std::vector<std::pair<std::string, int>>{{"tp2", 2}, {"bcc-linear-rd", 2}, {"bcc-quintic-rd", 4}}) {
    ConvergenceOptions opts;
    opts.halvings = 4;
    opts.samples = kPoints;
    ConvergenceReport r = run_convergence(sol_of(name), plan_of(name, true), gaussian_target(0.125),
                                          builtin_prefilter(name, sol_of(name).spline.dim()), opts);
    bool ok = std::abs(r.fitted_order - want) <= kOrderTol;
    out.pass = out.pass && ok;
    out.detail += " " + name + "(" + fmt(r.fitted_order) + " vs " + std::to_string(want) + ")";
  }
  return out;
}

Outcome determinism() {
  Outcome out;
  int trips = 0, kernels = 0, reruns = 0;
  for (const auto& name : kOracleSplines) {
    for (bool grouped : {false, true}) {
      const EvaluationPlan& plan = plan_of(name, grouped);
      std::string doc = serialize_plan(plan);
      bool trip = deserialize_plan(doc) == plan && serialize_plan(deserialize_plan(doc)) == doc;
      PlanOptions o;
      o.grouped = grouped;
      bool rerun = serialize_plan(compile_plan(sol_of(name), o)) == doc;

      PlanInterpreter in(plan);
      KernelProgram prog = KernelProgram::parse(emit_kernel(plan));
      CoefficientGrid g = random_grid(plan, 501);
      std::uniform_real_distribution<double> sign(-1, 1);
      std::mt19937_64 rng(502);
      for (std::size_t k = 0; k < g.coset_count(); ++k)
        for (auto& v : g.coset(k)) v = sign(rng);
      int differ = 0;
      for (const auto& x : random_points(plan.dim, kPoints, 503)) {
        double a = in.evaluate(x, g), b = prog.evaluate(x, g);
        differ += std::memcmp(&a, &b, sizeof a) != 0;
      }
      trips += trip;
      reruns += rerun;
      kernels += differ == 0;
      if (!trip || !rerun || differ)
        out.detail += " " + name + (grouped ? "/grouped" : "") + "(trip " + std::to_string(trip) + ", rerun " +
                      std::to_string(rerun) + ", " + std::to_string(differ) + " kernel diffs)";
    }
  }
  int total = static_cast<int>(kOracleSplines.size()) * 2;
  out.pass = trips == total && kernels == total && reruns == total;
  out.detail = " round-trip " + std::to_string(trips) + "/" + std::to_string(total) + ", kernel bit-identical " +
               std::to_string(kernels) + "/" + std::to_string(total) + ", rerun identical " + std::to_string(reruns) +
               "/" + std::to_string(total) + out.detail;
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome golden_renders(const std::string& dir, bool regenerate) {
  Outcome out;
  for (const char* name : {"cc-trilinear", "bcc-linear-rd", "fcc-6dir"}) {
    const EvaluationPlan& plan = plan_of(name, true);
    SampledVolume vol = sample_marschner_lobb(plan, sol_of(name).lattice, kRenderVolume);
    RenderJob job;
    job.plan = &plan;
    job.volume = &vol.grid;
    job.h = vol.h;
    auto t0 = std::chrono::steady_clock::now();
    std::string ppm = render_volume(job).to_ppm();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::string path = dir + "/" + name + ".ppm";
    if (regenerate) std::ofstream(path, std::ios::binary) << ppm;
    bool same = read_file(path) == ppm;
    out.pass = out.pass && same;
    out.detail += std::string(" ") + name + "(" + (same ? "match" : "differs") + ", " + fmt(ms) + " ms)";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string data = "tests/data";
  bool regenerate = false;
  int exact_points = kPoints;
  std::vector<int> only;
  app.add_option("--data", data, "directory with the golden images");
  app.add_flag("--regenerate", regenerate, "rewrite the golden images");
  app.add_option("--exact-points", exact_points, "points per spline in exact mode");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "plan equals brute force", [&] { return oracle_equivalence(exact_points); }},
      {2, "partition of unity", partition_of_unity},
      {3, "nearest lookup counts", lookup_counts},
      {4, "branch-free tables", branch_free_tables},
      {5, "fetch grouping", fetch_grouping},
      {6, "convergence order", convergence},
      {7, "determinism and round trip", determinism},
      {8, "golden renders", [&] { return golden_renders(data, regenerate); }},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string(" error: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.name << ":" << o.detail << " ["
              << fmt(s) << " s]" << std::endl;
  }
  return failed ? 1 : 0;
}
