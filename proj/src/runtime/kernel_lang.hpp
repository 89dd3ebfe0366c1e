#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runtime/grid.hpp"

namespace fastspline {

// Straight-line float programs as emitted by emit_kernel.
//
//   fastspline-kernel 1
//   dim N / half_texel 0|1 / input NAME...
//   table NAME = [v, ...]
//   let NAME = EXPR
//   out EXPR
//
// EXPR has + - * / unary -, comparisons (1 or 0), parentheses, NAME[EXPR]
// and the calls floor, fma, mod, select, fetch_nearest, fetch_linear.
class KernelProgram {
 public:
  static KernelProgram parse(std::string_view text);

  std::size_t dim() const { return inputs_.size(); }
  bool half_texel() const { return half_texel_; }
  std::size_t statement_count() const { return lets_.size(); }
  std::size_t fetch_count() const { return fetches_; }

  double evaluate(std::span<const double> x, const CoefficientGrid& grid) const;

  struct Node;

 private:
  std::vector<std::string> inputs_;
  bool half_texel_ = false;
  std::vector<std::vector<double>> tables_;
  std::vector<std::shared_ptr<const Node>> lets_;  // slot dim()+i
  std::shared_ptr<const Node> out_;
  std::size_t fetches_ = 0;
};

}  // namespace fastspline
