#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plancompile/plan.hpp"
#include "runtime/grid.hpp"

namespace fastspline {

// Discrete filter applied to samples: c_n = sum_t w_t f(h (n + t)), offsets
// t being lattice vectors.
struct Prefilter {
  std::vector<std::pair<IntVector, Rational>> taps;

  static Prefilter identity(std::size_t dim);
  bool is_identity() const;
};

// Quasi-interpolation filter for a corpus spline where one is built in; the
// identity otherwise.
Prefilter builtin_prefilter(const std::string& spline, std::size_t dim);
// Text form: one tap per line, lattice offset coordinates then the weight.
Prefilter parse_prefilter(std::string_view text, std::size_t dim);

using TargetFunction = std::function<double(std::span<const double>)>;

// exp(-|x|^2 / (2 sigma^2)).
TargetFunction gaussian_target(double sigma);

struct ConvergenceOptions {
  int halvings = 4;
  std::size_t samples = 10000;
  double h0 = 0;  // 0: 0.125 / |det L|^(1/s)
  std::uint64_t seed = 0x5eed;
  double half_width = 0.5;
  std::size_t site_budget = 20'000'000;
  unsigned threads = 1;
  BoundaryPolicy policy = BoundaryPolicy::Zero;
};

struct ConvergenceReport {
  std::string spline, lattice;
  std::vector<double> scales;
  std::vector<double> errors;
  std::vector<std::size_t> sites;
  double fitted_order = 0;
  int expected_order = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

// Samples f at h L-sites for each scale, prefilters, reconstructs through the
// plan and measures the L2 error on [-a, a]^s by Monte Carlo.
ConvergenceReport run_convergence(const SplineOnLattice& sol, const EvaluationPlan& plan, const TargetFunction& f,
                                  const Prefilter& prefilter, const ConvergenceOptions& opts);

// Least-squares slope of -log2(error) against -log2(h).
double fit_order(const std::vector<double>& scales, const std::vector<double>& errors);

// Grid covering h-scaled lattice sites over [-a, a]^s with `margin` extra
// lattice units on every side.
CoefficientGrid grid_for_box(const EvaluationPlan& plan, double h, double half_width, double margin,
                             BoundaryPolicy policy);

}  // namespace fastspline
