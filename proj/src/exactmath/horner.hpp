#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "exactmath/multipoly.hpp"

namespace fastspline {

enum class HornerOpCode : std::uint8_t { LoadVar, LoadConst, Add, Mul, Fma };

// Register i is defined by op i. Add: a+b. Mul: a*b. Fma: a*b+c.
// LoadVar uses arg as variable index, LoadConst as index into constants.
struct HornerOp {
  HornerOpCode code;
  int a = -1, b = -1, c = -1;
  int arg = -1;
};

class HornerProgram {
 public:
  HornerProgram() = default;
  HornerProgram(std::size_t dim, std::vector<HornerOp> ops, std::vector<Rational> constants);

  std::size_t dim() const { return dim_; }
  const std::vector<HornerOp>& ops() const { return ops_; }
  const std::vector<Rational>& constants() const { return constants_; }
  const std::vector<double>& constant_values() const { return constant_values_; }

  // scratch must hold ops().size() doubles.
  double evaluate(std::span<const double> x, std::span<double> scratch) const;
  double evaluate(std::span<const double> x) const;
  Rational evaluate(const RationalVector& x) const;
  MultiPoly expand() const;

  std::size_t multiplication_count() const;

 private:
  std::size_t dim_ = 0;
  std::vector<HornerOp> ops_;
  std::vector<Rational> constants_;
  std::vector<double> constant_values_;
};

HornerProgram horner_factor(const MultiPoly& p);

// Monomial-by-monomial cost: a term of degree d needs d-1 products, plus one
// for a coefficient other than 1.
std::size_t naive_multiplication_count(const MultiPoly& p);

}  // namespace fastspline
