#pragma once

#include <optional>
#include <span>
#include <string>

#include "exactmath/horner.hpp"
#include "lattice/lattice.hpp"
#include "polytope/polytope.hpp"
#include "spline/boxspline.hpp"

namespace fastspline {

struct SplinePiece {
  ConvexPolytope region;
  MultiPoly poly;
};

class PiecewisePolySpline {
 public:
  PiecewisePolySpline() = default;

  // Full validation: disjoint interiors, no gaps, unit integral, continuity
  // across shared facets, degree bound.
  static PiecewisePolySpline create(std::string name, std::size_t dim, int degree_bound, std::vector<SplinePiece> pieces);
  // Pieces taken from one arrangement are disjoint and tile the ambient by
  // construction; only the integral, continuity and sign checks run.
  static PiecewisePolySpline from_arrangement_pieces(std::string name, std::size_t dim, int degree_bound,
                                                     std::vector<SplinePiece> pieces);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  int degree_bound() const { return degree_bound_; }
  const std::vector<SplinePiece>& pieces() const { return pieces_; }
  const ConvexPolytope& support() const { return support_; }
  bool nonnegative() const { return nonnegative_; }

  // Piece containing x under the lower-closed perturbation convention.
  std::optional<std::size_t> locate(const RationalVector& x) const;
  std::optional<std::size_t> locate(std::span<const double> x) const;
  Rational evaluate(const RationalVector& x) const;
  double evaluate(std::span<const double> x) const;

  // Distinct supporting planes of all piece facets.
  std::vector<Hyperplane> breakpoint_planes() const;

 private:
  static PiecewisePolySpline assemble(std::string name, std::size_t dim, int degree_bound,
                                      std::vector<SplinePiece> pieces, bool check_tiling);
  void build_locator();
  std::vector<std::size_t> candidates(std::span<const double> x) const;
  std::vector<std::size_t> candidates_near(const RationalVector& lo, const RationalVector& hi) const;

  std::string name_;
  std::size_t dim_ = 0;
  int degree_bound_ = 0;
  std::vector<SplinePiece> pieces_;
  ConvexPolytope support_;
  bool nonnegative_ = false;

  // Float rendition for fast evaluation.
  struct FloatPiece {
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    std::vector<int> lead;
    HornerProgram program;
  };
  std::vector<FloatPiece> float_pieces_;
  std::vector<double> grid_lo_, grid_step_;
  std::vector<std::size_t> grid_size_;
  std::vector<std::vector<std::size_t>> grid_cells_;
};

// Fits each mesh cell's polynomial from exact box-spline samples and checks
// it on an equally large holdout set.
PiecewisePolySpline extract_pp_form(const DirectionMatrix& xi, const Arrangement& mesh, std::string name = "boxspline");

PiecewisePolySpline import_pp_spline(std::string_view document);
std::string export_pp_spline(const PiecewisePolySpline& spline);

struct SplineOnLattice {
  PiecewisePolySpline spline;
  IntegerLattice lattice;
  CosetDecomposition cosets;
  // Each shift is weighted by |det L| so the shifts sum to one.
  Rational weight;
};

// Checks partition of unity on the lattice at the piece witnesses.
SplineOnLattice make_spline_on_lattice(PiecewisePolySpline spline, IntegerLattice lattice);

// Sites n of the lattice with x in n + supp(phi) (perturbed), exact.
std::vector<IntVector> contributing_sites(const SplineOnLattice& sol, const RationalVector& x);

}  // namespace fastspline
