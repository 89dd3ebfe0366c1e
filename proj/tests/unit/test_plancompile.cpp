#include <algorithm>
#include <cstring>
#include <json.hpp>
#include <map>
#include <random>

#include "common/error.hpp"
#include "doctest.h"
#include "plancompile/emit.hpp"
#include "plancompile/exact_cover.hpp"
#include "plancompile/ordering.hpp"
#include "plancompile/plan.hpp"
#include "plancompile/planio.hpp"
#include "runtime/interpreter.hpp"
#include "runtime/kernel_lang.hpp"
#include "spline/corpus.hpp"

using namespace fastspline;

namespace {

const EvaluationPlan& cached_plan(const std::string& name, bool grouped) {
  static std::map<std::pair<std::string, bool>, EvaluationPlan> cache;
  auto key = std::make_pair(name, grouped);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  PlanOptions o;
  o.grouped = grouped;
  return cache.emplace(key, compile_plan(corpus_spline_on_lattice(name), o)).first->second;
}

std::vector<std::size_t> group_sizes(const PlanKernel& k) {
  std::vector<std::size_t> out;
  for (const auto& g : k.schedule) out.push_back(g.members.size());
  return out;
}

ErrorKind kind_of(const std::string& doc) {
  try {
    deserialize_plan(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("minimum exact cover agrees with exhaustive enumeration") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t items = 4 + trial % 5;
    std::vector<std::vector<std::size_t>> options;
    for (std::size_t i = 0; i < items; ++i) options.push_back({i});
    for (int o = 0; o < 8; ++o) {
      std::vector<std::size_t> opt;
      for (std::size_t i = 0; i < items; ++i)
        if (rng() % 3 == 0) opt.push_back(i);
      if (!opt.empty()) options.push_back(opt);
    }
    auto all = all_exact_covers(items, options);
    REQUIRE_FALSE(all.empty());
    std::size_t best = items;
    std::vector<std::size_t> lex;
    for (auto c : all) {
      std::sort(c.begin(), c.end());
      if (c.size() < best || (c.size() == best && (lex.empty() || c < lex))) {
        best = c.size();
        lex = c;
      }
    }
    ExactCoverResult r = min_exact_cover(items, options);
    CHECK(r.exhausted);
    CHECK(r.options == lex);
  }
  CHECK(min_exact_cover(3, {{0, 1}, {1, 2}}).options.empty());
}

TEST_CASE("fetch ordering is optimal on small instances") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + trial % 5;
    std::vector<Footprint> fps(n);
    for (auto& fp : fps)
      for (int c = 0; c < 4; ++c) fp.insert(IntVector{static_cast<long long>(rng() % 4), static_cast<long long>(rng() % 4)});
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::size_t best = SIZE_MAX;
    std::vector<std::size_t> best_order;
    do {
      std::size_t c = schedule_cost(fps, perm);
      if (c < best) {
        best = c;
        best_order = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    FetchOrder o = order_fetches(fps);
    CHECK(o.exact);
    CHECK(o.cost == best);
    CHECK(o.order == best_order);
    CHECK(schedule_cost(fps, o.order) == o.cost);
  }
}

TEST_CASE("biquadratic grouping and its ordering costs") {
  const EvaluationPlan& plan = cached_plan("tp2-quadratic", true);
  REQUIRE(plan.kernels.size() == 1);
  const PlanKernel& k = plan.kernels[0];
  std::vector<std::size_t> sizes = group_sizes(k);
  std::vector<std::size_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{1, 2, 2, 4});
  // Name the groups in fetch order D, C, B, A.
  std::vector<Footprint> fps;
  for (const auto& g : k.schedule) fps.push_back(group_footprint(plan, 0, g));
  CHECK(schedule_cost(fps, {0, 1, 2, 3}) == 10);
  CHECK(schedule_cost(fps, {0, 2, 1, 3}) == 12);
  CHECK(transition_cost({}, fps[0]) == 4);
  CHECK(k.ordering_cost == 10);
}

TEST_CASE("grouped schedules are exact covers of valid groups") {
  struct Case {
    const char* name;
    std::size_t fetches;
  };
  for (Case c : {Case{"tp2", 1}, Case{"zp", 4}, Case{"cc-trilinear", 1}, Case{"bcc-linear-rd", 2}}) {
    INFO(c.name);
    const EvaluationPlan& plan = cached_plan(c.name, true);
    CHECK(plan.scheduled_fetches() == c.fetches);
    for (const auto& k : plan.kernels) {
      std::vector<int> seen(k.sites.size(), 0);
      for (const auto& g : k.schedule) {
        for (auto m : g.members) ++seen[m];
        CHECK(group_identity_holds(g, k.weights));
        for (const auto& sr : plan.subregions)
          if (&plan.kernels[sr.kernel] == &k) CHECK(group_image(plan, sr, g).has_value());
      }
      for (int v : seen) CHECK(v == 1);
    }
  }
}

TEST_CASE("group identity rejects a non-separable pair") {
  // Weights x and y on an edge: g = x + y, u = y/(x+y); g^0 w0 = x but the
  // product form gives g - numer = x, so a pair always factors. A square with
  // weights 1, 1, 1, 0 does not.
  std::vector<MultiPoly> w(4, MultiPoly::constant(2, Rational(1)));
  w[3] = MultiPoly(2);
  FetchGroup g;
  g.members = {0, 1, 2, 3};
  g.axes = {0, 1};
  fill_group_polys(g, w);
  CHECK_FALSE(group_identity_holds(g, w));
  w[3] = MultiPoly::constant(2, Rational(1));
  fill_group_polys(g, w);
  CHECK(group_identity_holds(g, w));
}

TEST_CASE("nearest fetch counts") {
  CHECK(cached_plan("cc-trilinear", false).nearest_fetches() == 8);
  CHECK(cached_plan("bcc-linear-rd", false).nearest_fetches() == 4);
  CHECK(cached_plan("fcc-6dir", false).nearest_fetches() == 16);
}

TEST_CASE("plan documents round trip") {
  for (std::string name : {"zp", "bcc-linear-rd"}) {
    const EvaluationPlan& plan = cached_plan(name, true);
    std::string doc = serialize_plan(plan);
    CHECK(deserialize_plan(doc) == plan);
    CHECK(serialize_plan(deserialize_plan(doc)) == doc);
  }
}

TEST_CASE("damaged plan documents are rejected with the right error") {
  const EvaluationPlan& plan = cached_plan("zp", false);
  std::string doc = serialize_plan(plan);
  CHECK(kind_of(doc.substr(0, doc.size() / 2)) == ErrorKind::Parse);
  CHECK(kind_of("[]") == ErrorKind::Parse);

  nlohmann::json j = nlohmann::json::parse(doc);
  j["plan"]["sigma"][0] = 1;
  CHECK(kind_of(j.dump()) == ErrorKind::Checksum);

  j = nlohmann::json::parse(doc);
  j["version"] = kPlanFormatVersion + 1;
  CHECK(kind_of(j.dump()) == ErrorKind::Version);

  // Consistent checksum over an invalid body.
  j = nlohmann::json::parse(doc);
  j["plan"]["sigma"][0] = 9999;
  j["checksum"] = sha256_hex(j["plan"].dump());
  CHECK(kind_of(j.dump()) == ErrorKind::Validation);

  j = nlohmann::json::parse(doc);
  j["plan"]["kernels"][0]["schedule"].erase(0);
  j["checksum"] = sha256_hex(j["plan"].dump());
  CHECK(kind_of(j.dump()) == ErrorKind::Validation);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("repeated compilation is deterministic") {
  PlanOptions o;
  o.grouped = true;
  SplineOnLattice sol = corpus_spline_on_lattice("bcc-linear-rd");
  CHECK(serialize_plan(compile_plan(sol, o)) == serialize_plan(compile_plan(sol, o)));
}

TEST_CASE("emitted kernels match the interpreter bit for bit") {
  std::mt19937_64 rng(14);
  for (std::string name : {"tp2", "zp", "qc-tp", "bcc-linear-rd"}) {
    for (int mode = 0; mode < 8; ++mode) {
      CAPTURE(name);
      CAPTURE(mode);
      PlanOptions o;
      o.grouped = mode & 1;
      o.fold = mode & 2;
      o.half_texel = mode & 4;
      EvaluationPlan plan = compile_plan(corpus_spline_on_lattice(name), o);
      PlanInterpreter in(plan);
      KernelProgram prog = KernelProgram::parse(emit_kernel(plan));
      CHECK(prog.dim() == plan.dim);
      CHECK(prog.half_texel() == o.half_texel);
      IntVector ext(plan.dim, 8), org(plan.dim, -4);
      CoefficientGrid grid(plan.diagonal, plan.coset_shifts, ext, org, BoundaryPolicy::Clamp);
      std::uniform_real_distribution<double> u(-1, 1), p(-3, 3);
      for (std::size_t k = 0; k < grid.coset_count(); ++k)
        for (auto& v : grid.coset(k)) v = u(rng);
      int differ = 0;
      for (int n = 0; n < 200; ++n) {
        std::vector<double> x(plan.dim);
        for (auto& v : x) v = p(rng);
        double a = in.evaluate(x, grid), b = prog.evaluate(x, grid);
        differ += std::memcmp(&a, &b, sizeof a) != 0;
      }
      CHECK(differ == 0);
    }
  }
}
