#pragma once

#include <span>
#include <string>
#include <string_view>

#include "exactmath/matrix.hpp"
#include "polytope/polytope.hpp"

namespace fastspline {

class IntegerLattice {
 public:
  IntegerLattice() = default;
  IntegerLattice(std::string name, RationalMatrix generator);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return generator_.rows(); }
  const RationalMatrix& generator() const { return generator_; }
  const RationalMatrix& generator_inverse() const { return inverse_; }
  // |det L|: inverse density of sites.
  Integer index() const;

  bool contains(const RationalVector& p) const;
  bool contains(const IntVector& p) const;

 private:
  std::string name_;
  RationalMatrix generator_;
  RationalMatrix inverse_;
};

// CC (CC2/CC3/CC4 or CC with explicit dim), QC, BCC, FCC, D4.
IntegerLattice named_lattice(std::string_view name, std::size_t dim = 0);
std::vector<std::string> lattice_names();
// Lines: dimension, then one row of the generator per line. '#' starts a comment.
IntegerLattice parse_lattice(std::string_view text, std::string name = "custom");
std::string format_lattice(const IntegerLattice& lat);

struct CoefficientIndex {
  std::size_t coset = 0;
  IntVector cell;
  bool operator==(const CoefficientIndex&) const = default;
};

class CosetDecomposition {
 public:
  CosetDecomposition() = default;
  CosetDecomposition(IntegerLattice parent, IntVector diagonal, std::vector<IntVector> shifts);

  const IntegerLattice& parent() const { return parent_; }
  std::size_t dim() const { return diagonal_.size(); }
  const IntVector& diagonal() const { return diagonal_; }
  const std::vector<IntVector>& shifts() const { return shifts_; }
  std::size_t size() const { return shifts_.size(); }

  CoefficientIndex index_of(const IntVector& site) const;
  IntVector site_of(const CoefficientIndex& idx) const;
  // Coset of a site given by residues modulo D, or npos.
  std::size_t coset_of(const IntVector& site) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  IntegerLattice parent_;
  IntVector diagonal_;
  std::vector<IntVector> shifts_;
  std::vector<std::size_t> residue_to_coset_;  // mixed radix over diagonal
};

CosetDecomposition decompose_cartesian(const IntegerLattice& lat);

// k in D Z^s with x - k in prod [0, d_i).
IntVector rho(std::span<const double> x, const IntVector& diagonal);
IntVector rho(const RationalVector& x, const IntVector& diagonal);

std::vector<IntVector> lattice_sites_in_polytope(const IntegerLattice& lat, const ConvexPolytope& p);

}  // namespace fastspline
