#include "lattice/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "common/error.hpp"

namespace fastspline {

IntegerLattice::IntegerLattice(std::string name, RationalMatrix generator)
    : name_(std::move(name)), generator_(std::move(generator)) {
  if (generator_.rows() == 0 || generator_.rows() != generator_.cols())
    fail(ErrorKind::InvalidArgument, "lattice generator must be square");
  if (!generator_.is_integral()) fail(ErrorKind::InvalidArgument, "lattice generator must be integral");
  auto inv = inverse(generator_);
  if (!inv) fail(ErrorKind::InvalidArgument, "lattice generator is singular");
  inverse_ = std::move(*inv);
}

Integer IntegerLattice::index() const { return Rational(abs(determinant(generator_))).get_num(); }

bool IntegerLattice::contains(const RationalVector& p) const {
  for (const auto& c : inverse_.apply(p))
    if (!is_integer(c)) return false;
  return true;
}

bool IntegerLattice::contains(const IntVector& p) const { return contains(to_rational(p)); }

IntegerLattice named_lattice(std::string_view raw, std::size_t dim) {
  std::string name(raw);
  std::transform(name.begin(), name.end(), name.begin(), ::toupper);
  if (name == "CC2") return IntegerLattice("CC2", RationalMatrix::identity(2));
  if (name == "CC3") return IntegerLattice("CC3", RationalMatrix::identity(3));
  if (name == "CC4") return IntegerLattice("CC4", RationalMatrix::identity(4));
  if (name == "CC") {
    std::size_t s = dim ? dim : 3;
    return IntegerLattice("CC" + std::to_string(s), RationalMatrix::identity(s));
  }
  if (name == "QC") return IntegerLattice("QC", RationalMatrix::from_rows({{1, -1}, {1, 1}}));
  if (name == "BCC") return IntegerLattice("BCC", RationalMatrix::from_rows({{-1, 1, 1}, {1, -1, 1}, {1, 1, -1}}));
  if (name == "FCC") return IntegerLattice("FCC", RationalMatrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
  if (name == "D4")
    return IntegerLattice("D4", RationalMatrix::from_rows({{-1, 0, 0, 0}, {1, 0, -1, -1}, {0, -1, 0, 1}, {0, -1, 1, 0}}));
  fail(ErrorKind::InvalidArgument, "unknown lattice '" + std::string(raw) + "'");
}

std::vector<std::string> lattice_names() { return {"CC2", "CC3", "CC4", "QC", "BCC", "FCC", "D4"}; }

IntegerLattice parse_lattice(std::string_view text, std::string name) {
  std::vector<IntVector> rows;
  long long dim = -1;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    IntVector vals;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        vals.push_back(v);
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, "lattice file: bad integer '" + tok + "'");
      }
    }
    if (vals.empty()) continue;
    if (dim < 0) {
      if (vals.size() != 1 || vals[0] <= 0) fail(ErrorKind::Parse, "lattice file must start with the dimension");
      dim = vals[0];
      continue;
    }
    if (static_cast<long long>(vals.size()) != dim) fail(ErrorKind::Parse, "lattice file: row length differs from dimension");
    rows.push_back(std::move(vals));
  }
  if (dim < 0 || static_cast<long long>(rows.size()) != dim)
    fail(ErrorKind::Parse, "lattice file: expected " + std::to_string(dim) + " rows");
  return IntegerLattice(std::move(name), RationalMatrix::from_rows(rows));
}

std::string format_lattice(const IntegerLattice& lat) {
  std::ostringstream out;
  out << "# " << lat.name() << "\n" << lat.dim() << "\n";
  for (std::size_t r = 0; r < lat.dim(); ++r) {
    for (std::size_t c = 0; c < lat.dim(); ++c) out << (c ? " " : "") << lat.generator()(r, c).get_str();
    out << "\n";
  }
  return out.str();
}

CosetDecomposition::CosetDecomposition(IntegerLattice parent, IntVector diagonal, std::vector<IntVector> shifts)
    : parent_(std::move(parent)), diagonal_(std::move(diagonal)), shifts_(std::move(shifts)) {
  std::size_t cells = 1;
  for (long long d : diagonal_) cells *= static_cast<std::size_t>(d);
  residue_to_coset_.assign(cells, npos);
  for (std::size_t k = 0; k < shifts_.size(); ++k) {
    std::size_t key = 0;
    for (std::size_t i = 0; i < diagonal_.size(); ++i) key = key * diagonal_[i] + static_cast<std::size_t>(shifts_[k][i]);
    residue_to_coset_[key] = k;
  }
}

std::size_t CosetDecomposition::coset_of(const IntVector& site) const {
  std::size_t key = 0;
  for (std::size_t i = 0; i < diagonal_.size(); ++i) {
    long long d = diagonal_[i];
    long long r = ((site[i] % d) + d) % d;
    key = key * d + static_cast<std::size_t>(r);
  }
  return residue_to_coset_[key];
}

CoefficientIndex CosetDecomposition::index_of(const IntVector& site) const {
  std::size_t k = coset_of(site);
  if (k == npos) fail(ErrorKind::InvalidArgument, "point is not a lattice site");
  CoefficientIndex idx{k, IntVector(dim())};
  for (std::size_t i = 0; i < dim(); ++i) idx.cell[i] = (site[i] - shifts_[k][i]) / diagonal_[i];
  return idx;
}

IntVector CosetDecomposition::site_of(const CoefficientIndex& idx) const {
  IntVector out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = diagonal_[i] * idx.cell[i] + shifts_.at(idx.coset)[i];
  return out;
}

CosetDecomposition decompose_cartesian(const IntegerLattice& lat) {
  std::size_t s = lat.dim();
  // d_i e_i must be in L Z^s, i.e. d_i * column i of L^{-1} integral.
  IntVector diag(s);
  for (std::size_t i = 0; i < s; ++i) {
    Integer l = lcm_of_denominators(lat.generator_inverse().column(i));
    diag[i] = to_int64(l);
  }
  std::vector<IntVector> shifts;
  IntVector r(s, 0);
  while (true) {
    if (lat.contains(r)) shifts.push_back(r);
    std::size_t i = s;
    while (i > 0 && r[i - 1] == diag[i - 1] - 1) r[--i] = 0;
    if (i == 0) break;
    ++r[i - 1];
  }
  return CosetDecomposition(lat, std::move(diag), std::move(shifts));
}

IntVector rho(std::span<const double> x, const IntVector& diagonal) {
  IntVector k(diagonal.size());
  for (std::size_t i = 0; i < diagonal.size(); ++i) {
    double d = static_cast<double>(diagonal[i]);
    k[i] = diagonal[i] * static_cast<long long>(std::floor(x[i] / d));
  }
  return k;
}

IntVector rho(const RationalVector& x, const IntVector& diagonal) {
  IntVector k(diagonal.size());
  for (std::size_t i = 0; i < diagonal.size(); ++i)
    k[i] = diagonal[i] * to_int64(floor_of(x[i] / Rational(static_cast<long>(diagonal[i]))));
  return k;
}

std::vector<IntVector> lattice_sites_in_polytope(const IntegerLattice& lat, const ConvexPolytope& p) {
  std::vector<IntVector> out;
  if (p.is_empty()) return out;
  std::size_t s = lat.dim();
  RationalVector lo = p.lower_bound(), hi = p.upper_bound();
  IntVector a(s), b(s);
  for (std::size_t i = 0; i < s; ++i) {
    a[i] = to_int64(floor_of(lo[i]));
    b[i] = to_int64(floor_of(hi[i]));
  }
  IntVector z = a;
  while (true) {
    RationalVector q = to_rational(z);
    if (lat.contains(q) && p.contains(q)) out.push_back(z);
    std::size_t i = s;
    while (i > 0 && z[i - 1] == b[i - 1]) {
      z[i - 1] = a[i - 1];
      --i;
    }
    if (i == 0) break;
    ++z[i - 1];
  }
  return out;
}

}  // namespace fastspline
