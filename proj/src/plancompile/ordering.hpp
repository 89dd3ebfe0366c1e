#pragma once

#include <set>
#include <vector>

#include "exactmath/rational.hpp"

namespace fastspline {

// Texels a fetch pulls into cache.
using Footprint = std::set<IntVector>;

// Texels of next that the previous fetch did not already load.
std::size_t transition_cost(const Footprint& prev, const Footprint& next);
// First fetch pays its whole footprint.
std::size_t schedule_cost(const std::vector<Footprint>& footprints, const std::vector<std::size_t>& order);

struct FetchOrder {
  std::vector<std::size_t> order;
  std::size_t cost = 0;
  bool exact = true;
};

// Minimum-cost path through all fetches: Held-Karp up to exact_limit fetches,
// nearest neighbour above. Ties go to the lexicographically smallest order.
FetchOrder order_fetches(const std::vector<Footprint>& footprints, std::size_t exact_limit = 10);

}  // namespace fastspline
