#include "plancompile/exact_cover.hpp"

#include <algorithm>
#include <functional>

#include "common/error.hpp"

namespace fastspline {

namespace {

// Knuth's node layout: nodes 1..items are column headers, node 0 the root.
class Dlx {
 public:
  Dlx(std::size_t items, const std::vector<std::vector<std::size_t>>& options) : items_(items) {
    std::size_t n = items + 1;
    left_.resize(n);
    right_.resize(n);
    up_.resize(n);
    down_.resize(n);
    col_.resize(n);
    row_.assign(n, 0);
    size_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      left_[i] = i == 0 ? items : i - 1;
      right_[i] = i == items ? 0 : i + 1;
      up_[i] = down_[i] = col_[i] = i;
    }
    for (std::size_t r = 0; r < options.size(); ++r) {
      std::vector<std::size_t> cols = options[r];
      std::sort(cols.begin(), cols.end());
      if (std::adjacent_find(cols.begin(), cols.end()) != cols.end())
        fail(ErrorKind::InvalidArgument, "exact cover option repeats an item");
      std::size_t first = 0;
      for (std::size_t c : cols) {
        if (c >= items) fail(ErrorKind::InvalidArgument, "exact cover option names an unknown item");
        std::size_t node = left_.size();
        std::size_t h = c + 1;
        left_.push_back(node);
        right_.push_back(node);
        up_.push_back(up_[h]);
        down_.push_back(h);
        col_.push_back(h);
        row_.push_back(r);
        size_.push_back(0);
        down_[up_[h]] = node;
        up_[h] = node;
        ++size_[h];
        if (first == 0) {
          first = node;
        } else {
          left_[node] = left_[first];
          right_[node] = first;
          right_[left_[first]] = node;
          left_[first] = node;
        }
      }
    }
  }

  void cover(std::size_t c) {
    right_[left_[c]] = right_[c];
    left_[right_[c]] = left_[c];
    for (std::size_t i = down_[c]; i != c; i = down_[i])
      for (std::size_t j = right_[i]; j != i; j = right_[j]) {
        down_[up_[j]] = down_[j];
        up_[down_[j]] = up_[j];
        --size_[col_[j]];
      }
  }

  void uncover(std::size_t c) {
    for (std::size_t i = up_[c]; i != c; i = up_[i])
      for (std::size_t j = left_[i]; j != i; j = left_[j]) {
        ++size_[col_[j]];
        down_[up_[j]] = j;
        up_[down_[j]] = j;
      }
    right_[left_[c]] = c;
    left_[right_[c]] = c;
  }

  // Visits every exact cover; the visitor returns false to prune below the
  // current partial solution. depth_ok(depth, uncovered) also prunes.
  void search(const std::function<void(const std::vector<std::size_t>&)>& found,
              const std::function<bool(std::size_t, std::size_t)>& keep_going, std::uint64_t budget,
              std::uint64_t& nodes, bool& exhausted) {
    std::vector<std::size_t> partial;
    std::size_t uncovered = items_;
    std::function<void()> rec = [&]() {
      if (nodes >= budget) {
        exhausted = false;
        return;
      }
      ++nodes;
      if (right_[0] == 0) {
        found(partial);
        return;
      }
      if (!keep_going(partial.size(), uncovered)) return;
      // Column with the fewest candidates, leftmost on ties.
      std::size_t best = right_[0];
      for (std::size_t c = right_[0]; c != 0; c = right_[c])
        if (size_[c] < size_[best]) best = c;
      if (size_[best] == 0) return;
      cover(best);
      for (std::size_t r = down_[best]; r != best; r = down_[r]) {
        partial.push_back(row_[r]);
        std::size_t width = 1;
        for (std::size_t j = right_[r]; j != r; j = right_[j]) {
          cover(col_[j]);
          ++width;
        }
        uncovered -= width;
        rec();
        uncovered += width;
        for (std::size_t j = left_[r]; j != r; j = left_[j]) uncover(col_[j]);
        partial.pop_back();
      }
      uncover(best);
    };
    rec();
  }

 private:
  std::size_t items_;
  std::vector<std::size_t> left_, right_, up_, down_, col_, row_, size_;
};

}  // namespace

ExactCoverResult min_exact_cover(std::size_t items, const std::vector<std::vector<std::size_t>>& options,
                                 std::uint64_t node_budget) {
  ExactCoverResult result;
  if (items == 0) return result;
  std::size_t widest = 1;
  for (const auto& o : options) widest = std::max(widest, o.size());
  Dlx dlx(items, options);
  bool have = false;
  std::vector<std::size_t> best;
  auto found = [&](const std::vector<std::size_t>& partial) {
    std::vector<std::size_t> sorted = partial;
    std::sort(sorted.begin(), sorted.end());
    if (!have || sorted.size() < best.size() || (sorted.size() == best.size() && sorted < best)) {
      best = std::move(sorted);
      have = true;
    }
  };
  auto keep_going = [&](std::size_t depth, std::size_t uncovered) {
    if (!have) return true;
    std::size_t bound = depth + (uncovered + widest - 1) / widest;
    return bound <= best.size();
  };
  dlx.search(found, keep_going, node_budget, result.nodes, result.exhausted);
  result.options = std::move(best);
  return result;
}

std::vector<std::vector<std::size_t>> all_exact_covers(std::size_t items,
                                                       const std::vector<std::vector<std::size_t>>& options) {
  std::vector<std::vector<std::size_t>> out;
  Dlx dlx(items, options);
  std::uint64_t nodes = 0;
  bool exhausted = true;
  dlx.search([&](const std::vector<std::size_t>& p) { out.push_back(p); }, [](std::size_t, std::size_t) { return true; },
             ~std::uint64_t{0}, nodes, exhausted);
  return out;
}

}  // namespace fastspline
