#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exactmath/rational.hpp"

namespace fastspline {

enum class BoundaryPolicy { Zero, Clamp, Mirror };

BoundaryPolicy parse_boundary_policy(std::string_view name);
std::string to_string(BoundaryPolicy p);

// Coefficients of a lattice split into Cartesian cosets. Coset k holds the
// sites shift_k + D m for m in origin + [0, extent).
class CoefficientGrid {
 public:
  CoefficientGrid() = default;
  CoefficientGrid(IntVector diagonal, std::vector<IntVector> shifts, IntVector extent, IntVector origin,
                  BoundaryPolicy policy = BoundaryPolicy::Zero);

  std::size_t dim() const { return diagonal_.size(); }
  std::size_t coset_count() const { return shifts_.size(); }
  const IntVector& diagonal() const { return diagonal_; }
  const std::vector<IntVector>& shifts() const { return shifts_; }
  const IntVector& extent() const { return extent_; }
  const IntVector& origin() const { return origin_; }
  BoundaryPolicy policy() const { return policy_; }
  void set_policy(BoundaryPolicy p) { policy_ = p; }

  std::size_t cells_per_coset() const;
  std::vector<double>& coset(std::size_t k) { return data_.at(k); }
  const std::vector<double>& coset(std::size_t k) const { return data_.at(k); }

  // Storage offset of cell m, or -1 once the policy maps it outside (zero).
  long long offset_of(const IntVector& m) const;
  double& at(std::size_t k, const IntVector& m);
  // Value at cell m under the boundary policy.
  double fetch_nearest(std::size_t k, std::span<const long long> m) const;
  // Multilinear interpolation between cells, coordinates in cell units. With
  // half_texel the coordinate of cell m is m + 1/2, as on texture hardware.
  double fetch_linear(std::size_t k, std::span<const double> coord, bool half_texel) const;

  // Fills every coset from f(lattice site).
  template <class F>
  void fill(F&& f);

 private:
  IntVector diagonal_;
  std::vector<IntVector> shifts_;
  IntVector extent_, origin_;
  BoundaryPolicy policy_ = BoundaryPolicy::Zero;
  std::vector<std::vector<double>> data_;
};

template <class F>
void CoefficientGrid::fill(F&& f) {
  std::size_t s = dim();
  std::size_t n = cells_per_coset();
  for (std::size_t k = 0; k < coset_count(); ++k) {
    for (std::size_t flat = 0; flat < n; ++flat) {
      IntVector site(s);
      std::size_t rest = flat;
      for (std::size_t i = 0; i < s; ++i) {
        long long m = origin_[i] + static_cast<long long>(rest % static_cast<std::size_t>(extent_[i]));
        rest /= static_cast<std::size_t>(extent_[i]);
        site[i] = shifts_[k][i] + diagonal_[i] * m;
      }
      data_[k][flat] = f(static_cast<const IntVector&>(site));
    }
  }
}

// Volume files: a JSON header line, then the cosets as little-endian float64
// in storage order (axis 0 fastest).
void save_grid(const CoefficientGrid& g, const std::string& path);
CoefficientGrid load_grid(const std::string& path);

}  // namespace fastspline
