#include <random>

#include "analysis/region.hpp"
#include "analysis/symmetry.hpp"
#include "doctest.h"
#include "spline/corpus.hpp"

using namespace fastspline;

namespace {

RationalVector random_in_box(std::mt19937& rng, const RegionOfEvaluation& roe) {
  RationalVector hi = roe.box.upper_bound(), y(roe.dim);
  for (std::size_t i = 0; i < roe.dim; ++i) y[i] = hi[i] * make_rational(static_cast<long long>(rng() % 4096), 4096);
  return y;
}

}  // namespace

TEST_CASE("plane counts per spline") {
  struct Case {
    const char* name;
    std::size_t q;
  };
  for (Case c : {Case{"tp2", 0}, Case{"zp", 2}, Case{"qc-tp", 0}, Case{"bcc-linear-rd", 6}, Case{"fcc-6dir", 11}}) {
    INFO(c.name);
    RegionOfEvaluation roe = enumerate_subregions(corpus_spline_on_lattice(c.name));
    CHECK(roe.plane_count() == c.q);
  }
}

TEST_CASE("quartic BCC spline needs nine planes") {
  RegionOfEvaluation roe = enumerate_subregions(corpus_spline_on_lattice("bcc-quartic-trd"));
  CHECK(roe.plane_count() == 9);
}

TEST_CASE("sub-regions tile the box") {
  for (std::string name : {"zp", "bcc-linear-rd", "fcc-6dir"}) {
    CAPTURE(name);
    RegionOfEvaluation roe = enumerate_subregions(corpus_spline_on_lattice(name));
    Rational total = 0;
    for (const auto& sr : roe.subregions) total += sr.cell.volume();
    CHECK(total == roe.box.volume());
  }
}

TEST_CASE("sigma lookup agrees with polytope containment") {
  std::mt19937 rng(21);
  for (std::string name : {"tp2", "zp", "qc-tp", "bcc-linear-rd", "fcc-6dir"}) {
    CAPTURE(name);
    RegionOfEvaluation roe = enumerate_subregions(corpus_spline_on_lattice(name));
    for (int n = 0; n < 300; ++n) {
      RationalVector y = random_in_box(rng, roe);
      long long j = roe.sigma[region_code(roe.planes, y) % roe.r];
      std::vector<std::size_t> owners;
      for (std::size_t i = 0; i < roe.subregions.size(); ++i)
        if (roe.subregions[i].cell.contains_perturbed(y)) owners.push_back(i);
      REQUIRE(owners.size() == 1);
      CHECK(j == static_cast<long long>(owners[0]));
      CHECK(classify(roe, y) == owners[0]);
    }
  }
}

TEST_CASE("sub-region weights equal the shifted basis") {
  std::mt19937 rng(8);
  for (std::string name : {"zp", "bcc-linear-rd"}) {
    CAPTURE(name);
    SplineOnLattice sol = corpus_spline_on_lattice(name);
    RegionOfEvaluation roe = enumerate_subregions(sol);
    for (const auto& sr : roe.subregions) {
      for (std::size_t k = 0; k < sr.sites.size(); ++k) {
        RationalVector y = sr.witness;
        Rational direct = sol.weight * sol.spline.evaluate(sub(y, sr.sites[k]));
        CHECK(sr.weights[k].evaluate(y) == direct);
      }
    }
  }
}

TEST_CASE("code table compression is injective and minimal") {
  std::vector<std::uint64_t> codes{0, 3, 5, 6, 12};
  std::vector<std::size_t> targets{0, 1, 2, 3, 4};
  CodeTable t = compress_code_table(codes, targets);
  for (std::size_t i = 0; i < codes.size(); ++i) CHECK(t.sigma[codes[i] % t.r] == static_cast<long long>(targets[i]));
  for (std::size_t r = codes.size(); r < t.r; ++r) {
    std::vector<bool> seen(r, false);
    bool clash = false;
    for (auto c : codes) {
      clash = clash || seen[c % r];
      seen[c % r] = true;
    }
    CHECK(clash);
  }
}

TEST_CASE("signed permutation group") {
  auto g = signed_permutation_group(3);
  CHECK(g.size() == 48);
  CHECK(g.front() == RationalMatrix::identity(3));
  for (const auto& m : g) CHECK(m.is_signed_permutation());
}

TEST_CASE("bipartite matching finds a perfect matching") {
  std::vector<std::vector<std::size_t>> edges{{0, 1}, {0}, {1, 2}};
  auto match = bipartite_matching(3, 3, edges);
  CHECK(match[0] == 1);
  CHECK(match[1] == 0);
  CHECK(match[2] == 2);
  std::vector<std::vector<std::size_t>> starved{{0}, {0}};
  auto partial = bipartite_matching(2, 1, starved);
  CHECK((partial[0] == -1) != (partial[1] == -1));
}

TEST_CASE("symmetry search collapses equivalent sub-regions") {
  struct Case {
    const char* name;
    std::size_t max_kernels;
  };
  for (Case c : {Case{"tp2", 1}, Case{"zp", 2}, Case{"bcc-linear-rd", 1}}) {
    INFO(c.name);
    RegionOfEvaluation roe = enumerate_subregions(corpus_spline_on_lattice(c.name));
    SymmetryAssignment sym = search_symmetry(roe, signed_permutation_group(roe.dim));
    CHECK(sym.kernels.size() <= c.max_kernels);
    for (std::size_t i = 0; i < roe.subregions.size(); ++i) CHECK(verify_transform(roe, sym, i));
    SymmetryAssignment none = search_symmetry(roe, {RationalMatrix::identity(roe.dim)});
    CHECK(none.kernels.size() >= sym.kernels.size());
  }
}

TEST_CASE("octant fold only for reflection-symmetric splines") {
  SplineOnLattice tp2 = corpus_spline_on_lattice("tp2");
  AnalysisOptions fold;
  fold.fold = true;
  RegionOfEvaluation roe = enumerate_subregions(tp2, fold);
  CHECK(roe.fold.enabled);
  CHECK(has_axis_reflection_symmetry(tp2.spline, tp2.spline.support().vertex_centroid()));
  SplineOnLattice zp = corpus_spline_on_lattice("zp");
  CHECK(has_axis_reflection_symmetry(zp.spline, zp.spline.support().vertex_centroid()));
}
