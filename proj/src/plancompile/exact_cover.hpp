#pragma once

#include <cstdint>
#include <vector>

namespace fastspline {

struct ExactCoverResult {
  std::vector<std::size_t> options;  // chosen option indices, ascending
  std::uint64_t nodes = 0;
  bool exhausted = true;  // false when the node budget cut the search short
};

// Minimum-cardinality exact cover by Algorithm X on dancing links. Among
// covers of equal size the lexicographically smallest sorted option list
// wins. Returns an empty option list if no cover exists.
ExactCoverResult min_exact_cover(std::size_t items, const std::vector<std::vector<std::size_t>>& options,
                                 std::uint64_t node_budget = 20'000'000);

// Every exact cover, in search order. For tests on small instances.
std::vector<std::vector<std::size_t>> all_exact_covers(std::size_t items,
                                                       const std::vector<std::vector<std::size_t>>& options);

}  // namespace fastspline
