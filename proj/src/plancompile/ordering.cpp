#include "plancompile/ordering.hpp"

#include <algorithm>
#include <limits>

#include "common/error.hpp"

namespace fastspline {

std::size_t transition_cost(const Footprint& prev, const Footprint& next) {
  std::size_t miss = 0;
  for (const auto& t : next)
    if (!prev.count(t)) ++miss;
  return miss;
}

std::size_t schedule_cost(const std::vector<Footprint>& footprints, const std::vector<std::size_t>& order) {
  std::size_t cost = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    cost += i == 0 ? footprints.at(order[0]).size() : transition_cost(footprints.at(order[i - 1]), footprints.at(order[i]));
  return cost;
}

FetchOrder order_fetches(const std::vector<Footprint>& footprints, std::size_t exact_limit) {
  std::size_t n = footprints.size();
  FetchOrder out;
  if (n == 0) return out;
  std::vector<std::vector<std::size_t>> cost(n, std::vector<std::size_t>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) cost[a][b] = transition_cost(footprints[a], footprints[b]);

  if (n <= exact_limit && n <= 20) {
    // rest[mask][v]: cheapest completion after visiting mask, standing at v.
    // Reconstructing forward with the smallest index at each step gives the
    // lexicographically smallest optimal order.
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
    std::size_t full = (std::size_t{1} << n) - 1;
    std::vector<std::vector<std::size_t>> rest(full + 1, std::vector<std::size_t>(n, inf));
    for (std::size_t v = 0; v < n; ++v) rest[full][v] = 0;
    for (std::size_t mask = full; mask-- > 0;) {
      for (std::size_t v = 0; v < n; ++v) {
        if (!(mask >> v & 1)) continue;
        std::size_t best = inf;
        for (std::size_t u = 0; u < n; ++u)
          if (!(mask >> u & 1)) best = std::min(best, cost[v][u] + rest[mask | std::size_t{1} << u][u]);
        rest[mask][v] = best;
      }
    }
    std::size_t best = inf, start = 0;
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t c = footprints[v].size() + rest[std::size_t{1} << v][v];
      if (c < best) {
        best = c;
        start = v;
      }
    }
    out.order.push_back(start);
    std::size_t mask = std::size_t{1} << start;
    std::size_t remaining = best - footprints[start].size();
    while (mask != full) {
      std::size_t v = out.order.back();
      for (std::size_t u = 0; u < n; ++u) {
        if (mask >> u & 1) continue;
        std::size_t c = cost[v][u] + rest[mask | std::size_t{1} << u][u];
        if (c == remaining) {
          out.order.push_back(u);
          mask |= std::size_t{1} << u;
          remaining -= cost[v][u];
          break;
        }
      }
    }
    out.cost = best;
    return out;
  }

  out.exact = false;
  std::vector<char> used(n, 0);
  std::size_t start = 0;
  for (std::size_t v = 1; v < n; ++v)
    if (footprints[v].size() < footprints[start].size()) start = v;
  out.order.push_back(start);
  used[start] = 1;
  while (out.order.size() < n) {
    std::size_t v = out.order.back(), pick = n;
    for (std::size_t u = 0; u < n; ++u)
      if (!used[u] && (pick == n || cost[v][u] < cost[v][pick])) pick = u;
    used[pick] = 1;
    out.order.push_back(pick);
  }
  out.cost = schedule_cost(footprints, out.order);
  return out;
}

}  // namespace fastspline
