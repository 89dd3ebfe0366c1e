#pragma once

#include <array>
#include <string>
#include <vector>

#include "plancompile/plan.hpp"
#include "runtime/grid.hpp"

namespace fastspline {

// Marschner-Lobb test signal on [-1, 1]^3, values in [0, 1].
double marschner_lobb(double x, double y, double z, double fm = 6.0, double alpha = 0.25);

// Samples of Marschner-Lobb at every lattice site of a volume covering
// [-1, 1]^3 with about n^3 sites. Site x maps to world -1 + h x.
struct SampledVolume {
  CoefficientGrid grid;
  double h = 0;
};
SampledVolume sample_marschner_lobb(const EvaluationPlan& plan, const IntegerLattice& lattice, int n, double fm = 6.0,
                                    double alpha = 0.25);

struct TransferPoint {
  double value;
  std::array<double, 4> rgba;  // colour and opacity per unit ray length
};

// Piecewise-linear lookup, clamped to the end points.
std::array<double, 4> transfer_lookup(const std::vector<TransferPoint>& tf, double v);
// Mostly transparent, with an opaque band around the 0.5 level.
std::vector<TransferPoint> default_transfer();

struct Camera {
  std::array<double, 3> direction{-1.0, -0.6, -0.8};  // view direction
  std::array<double, 3> up{0.0, 0.0, 1.0};
  double width = 3.2;  // orthographic view extent in world units
};

struct RenderJob {
  const EvaluationPlan* plan = nullptr;
  const CoefficientGrid* volume = nullptr;
  double h = 1;  // world units per lattice unit; world = -1 + h x
  Camera camera;
  int width = 128, height = 128;
  std::vector<TransferPoint> transfer = default_transfer();
  double step = 1.0 / 128.0;
  std::array<double, 3> background{0.0, 0.0, 0.0};
  unsigned threads = 1;
};

struct Image {
  int width = 0, height = 0;
  std::vector<unsigned char> rgb;
  // Binary portable pixmap (P6).
  std::string to_ppm() const;
};

// Orthographic front-to-back compositing through [-1, 1]^3.
Image render_volume(const RenderJob& job);

Image parse_ppm(std::string_view data);

}  // namespace fastspline
