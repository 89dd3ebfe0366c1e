#pragma once

#include <span>

#include "plancompile/plan.hpp"
#include "runtime/grid.hpp"
#include "spline/ppspline.hpp"

namespace fastspline {

// Executes an evaluation plan against coset memory. The float path performs
// the same operations in the same order as the emitted kernel program.
class PlanInterpreter {
 public:
  explicit PlanInterpreter(EvaluationPlan plan);

  const EvaluationPlan& plan() const { return plan_; }
  // Checks that a grid is laid out the way the plan expects.
  void check_grid(const CoefficientGrid& grid) const;

  double evaluate(std::span<const double> x, const CoefficientGrid& grid) const;
  // Exact debug mode: rational arithmetic throughout, grid values read as
  // the exact rationals of their doubles.
  Rational evaluate_exact(const RationalVector& x, const CoefficientGrid& grid) const;

  // Sub-region index the plan selects for y in the (folded) box.
  std::size_t subregion_of(std::span<const double> y) const;

  struct CompiledGroup {
    HornerProgram g;
    std::vector<HornerProgram> numer;
  };
  const std::vector<std::vector<CompiledGroup>>& programs() const { return programs_; }

 private:
  double kernel_value(std::size_t kernel, std::size_t j, std::size_t coset, const double* y, const double* rho,
                      const bool* flip, const CoefficientGrid& grid, std::vector<double>& scratch) const;

  EvaluationPlan plan_;
  std::vector<std::vector<CompiledGroup>> programs_;  // per kernel, per scheduled group
  std::vector<std::vector<double>> plane_normal_;
  std::vector<double> plane_offset_;
  // Per sub-region: A row-major and b.
  std::vector<std::vector<double>> a_, b_;
  std::size_t scratch_size_ = 0;
};

// Reference evaluation: sum over every lattice site of c_n W phi(x - n).
double eval_bruteforce(const SplineOnLattice& sol, const CoefficientGrid& grid, std::span<const double> x);
Rational eval_bruteforce_exact(const SplineOnLattice& sol, const CoefficientGrid& grid, const RationalVector& x);

// Exact rational value of the coefficient at a lattice site, policy applied.
Rational grid_value_exact(const CoefficientGrid& grid, std::size_t coset, const IntVector& cell);

}  // namespace fastspline
