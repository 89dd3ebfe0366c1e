#include "spline/corpus.hpp"

#include <map>
#include <mutex>

#include "common/error.hpp"

namespace fastspline {

const std::vector<CorpusEntry>& spline_corpus() {
  static const std::vector<CorpusEntry> corpus = {
      {"tp2", "CC2", {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, 2, 4, "bilinear tensor-product hat"},
      {"zp", "CC2", {{1, 0}, {0, 1}, {1, 1}, {1, -1}}, 3, 0, "Zwart-Powell element"},
      {"qc-tp", "QC", {{2, 0}, {0, 2}, {-2, 0}, {0, -2}}, 2, 0, "dilated tensor hat on the quincunx lattice"},
      {"tp2-quadratic", "CC2", {{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1}}, 3, 9, "biquadratic tensor B-spline"},
      {"cc-trilinear", "CC3", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, 2, 8,
       "trilinear B-spline (CC Voronoi spline 1)"},
      {"bcc-linear-rd", "BCC", {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, 2, 4, "linear rhombic dodecahedron"},
      {"bcc-quintic-rd",
       "BCC",
       {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}},
       4,
       32,
       "quintic rhombic dodecahedron"},
      {"bcc-quartic-trd",
       "BCC",
       {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {2, 0, 0}, {0, 2, 0}, {0, 0, 2}},
       4,
       30,
       "quartic truncated rhombic dodecahedron"},
      {"fcc-6dir",
       "FCC",
       {{1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}},
       3,
       16,
       "cubic truncated octahedron (6-direction box spline)"},
      {"d4-8dir",
       "D4",
       {{1, 1, 1, 1},
        {1, 1, -1, 1},
        {1, -1, 1, 1},
        {1, -1, -1, 1},
        {-1, 1, 1, 1},
        {-1, 1, -1, 1},
        {-1, -1, 1, 1},
        {-1, -1, -1, 1}},
       4,
       0,
       "8-direction box spline on D4"},
  };
  return corpus;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  for (const auto& e : spline_corpus())
    if (e.name == name) return e;
  fail(ErrorKind::InvalidArgument, "unknown corpus spline '" + name + "'");
}

DirectionMatrix corpus_directions(const CorpusEntry& entry) { return DirectionMatrix::from_int_columns(entry.directions); }

PiecewisePolySpline corpus_spline(const CorpusEntry& entry) {
  // Extraction is the expensive step; cache per process.
  static std::mutex mu;
  static std::map<std::string, PiecewisePolySpline> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(entry.name); it != cache.end()) return it->second;
  }
  DirectionMatrix xi = corpus_directions(entry);
  PiecewisePolySpline pp = extract_pp_form(xi, boxspline_mesh(xi), entry.name);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(entry.name, pp);
  return pp;
}

SplineOnLattice corpus_spline_on_lattice(const std::string& name, const std::string& lattice) {
  const CorpusEntry& e = corpus_entry(name);
  return make_spline_on_lattice(corpus_spline(e), named_lattice(lattice.empty() ? e.lattice : lattice));
}

}  // namespace fastspline
