#pragma once

#include <string>
#include <vector>

#include "spline/ppspline.hpp"

namespace fastspline {

struct CorpusEntry {
  std::string name;
  std::string lattice;
  std::vector<IntVector> directions;  // columns of the direction matrix
  int order = 0;                      // approximation order
  int lookups = 0;                    // expected nearest fetches, 0 if unknown
  std::string description;
};

const std::vector<CorpusEntry>& spline_corpus();
const CorpusEntry& corpus_entry(const std::string& name);

DirectionMatrix corpus_directions(const CorpusEntry& entry);
PiecewisePolySpline corpus_spline(const CorpusEntry& entry);
SplineOnLattice corpus_spline_on_lattice(const std::string& name, const std::string& lattice = "");

}  // namespace fastspline
