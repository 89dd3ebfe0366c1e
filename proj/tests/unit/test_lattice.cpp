#include "doctest.h"
#include "lattice/lattice.hpp"

using namespace fastspline;

TEST_CASE("named lattices have the expected density") {
  CHECK(named_lattice("CC3").index() == 1);
  CHECK(named_lattice("QC").index() == 2);
  CHECK(named_lattice("BCC").index() == 4);
  CHECK(named_lattice("FCC").index() == 2);
  CHECK(named_lattice("D4").index() == 2);
}

TEST_CASE("lattice membership") {
  IntegerLattice bcc = named_lattice("BCC");
  CHECK(bcc.contains(IntVector{0, 0, 0}));
  CHECK(bcc.contains(IntVector{1, 1, 1}));
  CHECK(bcc.contains(IntVector{2, 0, 0}));
  CHECK_FALSE(bcc.contains(IntVector{1, 0, 0}));
  IntegerLattice fcc = named_lattice("FCC");
  CHECK(fcc.contains(IntVector{1, 1, 0}));
  CHECK_FALSE(fcc.contains(IntVector{1, 0, 0}));
}

TEST_CASE("coset decompositions") {
  struct Case {
    const char* name;
    std::size_t cosets;
  };
  for (Case c : {Case{"CC3", 1}, Case{"QC", 2}, Case{"BCC", 2}, Case{"FCC", 4}}) {
    INFO(c.name);
    IntegerLattice lat = named_lattice(c.name);
    CosetDecomposition dec = decompose_cartesian(lat);
    CHECK(dec.size() == c.cosets);
    // Coset density times |det L| equals det D.
    long det_d = 1;
    for (auto d : dec.diagonal()) det_d *= d;
    CHECK(Integer(det_d) == lat.index() * static_cast<long>(dec.size()));
    // Every site in a window maps to exactly one coset and back.
    std::size_t s = lat.dim();
    IntVector site(s, -3);
    while (true) {
      if (lat.contains(site)) {
        CoefficientIndex idx = dec.index_of(site);
        CHECK(dec.site_of(idx) == site);
        CHECK(dec.coset_of(site) == idx.coset);
      } else {
        CHECK(dec.coset_of(site) == CosetDecomposition::npos);
      }
      std::size_t i = 0;
      while (i < s && ++site[i] > 3) site[i++] = -3;
      if (i == s) break;
    }
  }
}

TEST_CASE("rho places x in the box") {
  IntVector d{2, 2, 2};
  std::vector<double> x{-0.5, 3.999, 2.0};
  IntVector k = rho(x, d);
  CHECK(k == IntVector{-2, 2, 2});
  RationalVector xr{make_rational(-1, 2), make_rational(4), make_rational(7, 3)};
  CHECK(rho(xr, d) == IntVector{-2, 4, 2});
}

TEST_CASE("lattice files round trip") {
  IntegerLattice fcc = named_lattice("FCC");
  IntegerLattice back = parse_lattice(format_lattice(fcc), "again");
  CHECK(back.generator() == fcc.generator());
  IntegerLattice custom = parse_lattice("# hex-like\n2\n2 1\n0 1\n");
  CHECK(custom.index() == 2);
}

TEST_CASE("lattice sites in a polytope") {
  IntegerLattice bcc = named_lattice("BCC");
  RationalVector lo = to_rational(IntVector{0, 0, 0}), hi = to_rational(IntVector{2, 2, 2});
  auto sites = lattice_sites_in_polytope(bcc, ConvexPolytope::box(lo, hi));
  CHECK(sites.size() == 9);  // 8 corners and the centre
}
