#include "runtime/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "common/error.hpp"

namespace fastspline {

BoundaryPolicy parse_boundary_policy(std::string_view name) {
  if (name == "zero") return BoundaryPolicy::Zero;
  if (name == "clamp") return BoundaryPolicy::Clamp;
  if (name == "mirror") return BoundaryPolicy::Mirror;
  fail(ErrorKind::InvalidArgument, "unknown boundary policy '" + std::string(name) + "'");
}

std::string to_string(BoundaryPolicy p) {
  switch (p) {
    case BoundaryPolicy::Zero: return "zero";
    case BoundaryPolicy::Clamp: return "clamp";
    case BoundaryPolicy::Mirror: return "mirror";
  }
  return "zero";
}

CoefficientGrid::CoefficientGrid(IntVector diagonal, std::vector<IntVector> shifts, IntVector extent, IntVector origin,
                                 BoundaryPolicy policy)
    : diagonal_(std::move(diagonal)),
      shifts_(std::move(shifts)),
      extent_(std::move(extent)),
      origin_(std::move(origin)),
      policy_(policy) {
  std::size_t s = diagonal_.size();
  if (s == 0 || extent_.size() != s || origin_.size() != s) fail(ErrorKind::InvalidArgument, "grid shape mismatch");
  for (auto n : extent_)
    if (n <= 0) fail(ErrorKind::InvalidArgument, "grid extent must be positive");
  if (s > 8) fail(ErrorKind::InvalidArgument, "grids support at most 8 dimensions");
  if (shifts_.empty()) fail(ErrorKind::InvalidArgument, "grid needs at least one coset");
  for (const auto& sh : shifts_)
    if (sh.size() != s) fail(ErrorKind::InvalidArgument, "coset shift of wrong dimension");
  data_.assign(shifts_.size(), std::vector<double>(cells_per_coset(), 0.0));
}

std::size_t CoefficientGrid::cells_per_coset() const {
  std::size_t n = 1;
  for (auto e : extent_) n *= static_cast<std::size_t>(e);
  return n;
}

long long CoefficientGrid::offset_of(const IntVector& m) const {
  long long off = 0, stride = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    long long n = extent_[i];
    long long j = m[i] - origin_[i];
    if (j < 0 || j >= n) {
      switch (policy_) {
        case BoundaryPolicy::Zero: return -1;
        case BoundaryPolicy::Clamp: j = j < 0 ? 0 : n - 1; break;
        case BoundaryPolicy::Mirror:
          if (n == 1) {
            j = 0;
            break;
          }
          // Reflect about the end cells without repeating them.
          j %= 2 * (n - 1);
          if (j < 0) j += 2 * (n - 1);
          if (j >= n) j = 2 * (n - 1) - j;
          break;
      }
    }
    off += j * stride;
    stride *= n;
  }
  return off;
}

double& CoefficientGrid::at(std::size_t k, const IntVector& m) {
  long long off = 0, stride = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    long long j = m[i] - origin_[i];
    if (j < 0 || j >= extent_[i]) fail(ErrorKind::InvalidArgument, "cell outside the grid");
    off += j * stride;
    stride *= extent_[i];
  }
  return data_.at(k)[static_cast<std::size_t>(off)];
}

double CoefficientGrid::fetch_nearest(std::size_t k, std::span<const long long> m) const {
  IntVector cell(m.begin(), m.end());
  long long off = offset_of(cell);
  return off < 0 ? 0.0 : data_[k][static_cast<std::size_t>(off)];
}

double CoefficientGrid::fetch_linear(std::size_t k, std::span<const double> coord, bool half_texel) const {
  std::size_t s = dim();
  long long base[8];
  double frac[8];
  for (std::size_t i = 0; i < s; ++i) {
    double t = half_texel ? coord[i] - 0.5 : coord[i];
    double f = std::floor(t);
    base[i] = static_cast<long long>(f);
    frac[i] = t - f;
  }
  double acc = 0.0;
  long long cell[8];
  for (std::size_t corner = 0; corner < (std::size_t{1} << s); ++corner) {
    double w = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
      bool up = corner >> i & 1;
      w = w * (up ? frac[i] : 1.0 - frac[i]);
      cell[i] = base[i] + (up ? 1 : 0);
    }
    acc = acc + w * fetch_nearest(k, std::span<const long long>(cell, s));
  }
  return acc;
}

void save_grid(const CoefficientGrid& g, const std::string& path) {
  nlohmann::json h = {{"format", "fastspline-volume"}, {"version", 1},         {"diagonal", g.diagonal()},
                      {"shifts", g.shifts()},          {"extent", g.extent()}, {"origin", g.origin()},
                      {"policy", to_string(g.policy())}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << h.dump() << '\n';
  for (std::size_t k = 0; k < g.coset_count(); ++k) {
    for (double v : g.coset(k)) {
      unsigned char b[8];
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
      out.write(reinterpret_cast<const char*>(b), 8);
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

CoefficientGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::string line;
  std::getline(in, line);
  auto h = nlohmann::json::parse(line, nullptr, false);
  if (h.is_discarded() || h.value("format", std::string()) != "fastspline-volume")
    fail(ErrorKind::Parse, path + " is not a volume file");
  if (h.value("version", 0) != 1) fail(ErrorKind::Version, "unsupported volume version");
  CoefficientGrid g;
  try {
    g = CoefficientGrid(h.at("diagonal").get<IntVector>(), h.at("shifts").get<std::vector<IntVector>>(),
                        h.at("extent").get<IntVector>(), h.at("origin").get<IntVector>(),
                        parse_boundary_policy(h.at("policy").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("volume header: ") + e.what());
  }
  for (std::size_t k = 0; k < g.coset_count(); ++k) {
    for (double& v : g.coset(k)) {
      unsigned char b[8];
      if (!in.read(reinterpret_cast<char*>(b), 8)) fail(ErrorKind::Parse, "volume data truncated");
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
      std::memcpy(&v, &bits, 8);
    }
  }
  return g;
}

}  // namespace fastspline
