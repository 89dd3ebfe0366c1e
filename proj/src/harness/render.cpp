#include "harness/render.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"
#include "harness/numeric.hpp"
#include "runtime/interpreter.hpp"

namespace fastspline {

double marschner_lobb(double x, double y, double z, double fm, double alpha) {
  double pi = std::numbers::pi;
  double r = std::sqrt(x * x + y * y);
  double rho = std::cos(2.0 * pi * fm * std::cos(pi * r / 2.0));
  return (1.0 - std::sin(pi * z / 2.0) + alpha * (1.0 + rho)) / (2.0 * (1.0 + alpha));
}

SampledVolume sample_marschner_lobb(const EvaluationPlan& plan, const IntegerLattice& lattice, int n, double fm,
                                    double alpha) {
  if (plan.dim != 3) fail(ErrorKind::InvalidArgument, "rendering needs a 3D plan");
  if (n < 2) fail(ErrorKind::InvalidArgument, "volume resolution must be at least 2");
  SampledVolume vol;
  // Same site count per unit volume as an n^3 Cartesian grid.
  vol.h = 2.0 / (n - 1) / std::cbrt(lattice.index().get_d());
  // Two extra cells per side keep the reconstruction inside the cube free of
  // boundary effects.
  IntVector origin(3), extent(3);
  for (std::size_t i = 0; i < 3; ++i) {
    long long d = plan.diagonal[i];
    long long top = static_cast<long long>(std::floor(2.0 / vol.h + 1e-9));
    origin[i] = -2;
    extent[i] = top / d + 5;
  }
  vol.grid = CoefficientGrid(plan.diagonal, plan.coset_shifts, extent, origin, BoundaryPolicy::Zero);
  vol.grid.fill([&](const IntVector& site) {
    double p[3];
    for (int i = 0; i < 3; ++i) p[i] = -1.0 + vol.h * static_cast<double>(site[i]);
    return marschner_lobb(p[0], p[1], p[2], fm, alpha);
  });
  return vol;
}

std::array<double, 4> transfer_lookup(const std::vector<TransferPoint>& tf, double v) {
  if (tf.empty()) return {0, 0, 0, 0};
  if (v <= tf.front().value) return tf.front().rgba;
  for (std::size_t i = 1; i < tf.size(); ++i) {
    if (v <= tf[i].value) {
      double t = (v - tf[i - 1].value) / (tf[i].value - tf[i - 1].value);
      std::array<double, 4> out;
      for (int c = 0; c < 4; ++c) out[c] = tf[i - 1].rgba[c] + t * (tf[i].rgba[c] - tf[i - 1].rgba[c]);
      return out;
    }
  }
  return tf.back().rgba;
}

std::vector<TransferPoint> default_transfer() {
  return {{0.0, {0.0, 0.0, 0.0, 0.0}},
          {0.42, {0.2, 0.3, 0.9, 0.0}},
          {0.5, {0.95, 0.85, 0.4, 40.0}},
          {0.58, {0.9, 0.3, 0.2, 0.0}},
          {1.0, {0.0, 0.0, 0.0, 0.0}}};
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 normalized(Vec3 v) {
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n == 0) fail(ErrorKind::InvalidArgument, "zero camera vector");
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Parametric interval of the ray inside [-1, 1]^3.
bool clip(const Vec3& o, const Vec3& d, double& t0, double& t1) {
  t0 = -1e300;
  t1 = 1e300;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0) {
      if (o[i] < -1 || o[i] > 1) return false;
      continue;
    }
    double a = (-1 - o[i]) / d[i], b = (1 - o[i]) / d[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 < t1;
}

unsigned char to_byte(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(c * 255.0));
}

}  // namespace

Image render_volume(const RenderJob& job) {
  if (!job.plan || !job.volume) fail(ErrorKind::InvalidArgument, "render job needs a plan and a volume");
  if (job.width <= 0 || job.height <= 0) fail(ErrorKind::InvalidArgument, "image extents must be positive");
  if (!(job.step > 0)) fail(ErrorKind::InvalidArgument, "step size must be positive");
  if (job.h <= 0) fail(ErrorKind::InvalidArgument, "volume scale must be positive");
  PlanInterpreter interp(*job.plan);
  interp.check_grid(*job.volume);
  if (job.plan->dim != 3) fail(ErrorKind::InvalidArgument, "rendering needs a 3D plan");

  Vec3 dir = normalized(job.camera.direction);
  Vec3 right = normalized(cross(dir, job.camera.up));
  Vec3 up = cross(right, dir);
  double pixel = job.camera.width / std::max(job.width, job.height);

  Image img;
  img.width = job.width;
  img.height = job.height;
  img.rgb.assign(static_cast<std::size_t>(job.width) * job.height * 3, 0);
  std::size_t n = static_cast<std::size_t>(job.width) * job.height;
  parallel_for(n, job.threads, [&](std::size_t idx) {
    int px = static_cast<int>(idx % job.width), py = static_cast<int>(idx / job.width);
    double sx = (px + 0.5 - job.width / 2.0) * pixel, sy = (job.height / 2.0 - py - 0.5) * pixel;
    // Start well outside the unit cube and march along dir.
    Vec3 o;
    for (int i = 0; i < 3; ++i) o[i] = sx * right[i] + sy * up[i] - 4.0 * dir[i];
    double color[3] = {0, 0, 0}, alpha = 0;
    double t0, t1;
    if (clip(o, dir, t0, t1)) {
      double x[3];
      for (double t = t0 + 0.5 * job.step; t < t1 && alpha < 0.995; t += job.step) {
        for (int i = 0; i < 3; ++i) x[i] = (o[i] + t * dir[i] + 1.0) / job.h;
        double v = interp.evaluate(std::span<const double>(x, 3), *job.volume);
        auto c = transfer_lookup(job.transfer, v);
        double a = 1.0 - std::exp(-c[3] * job.step);
        double wgt = (1.0 - alpha) * a;
        for (int i = 0; i < 3; ++i) color[i] += wgt * c[i];
        alpha += wgt;
      }
    }
    unsigned char* out = &img.rgb[idx * 3];
    for (int i = 0; i < 3; ++i) out[i] = to_byte(color[i] + (1.0 - alpha) * job.background[i]);
  });
  return img;
}

std::string Image::to_ppm() const {
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(rgb.begin(), rgb.end());
  return out;
}

Image parse_ppm(std::string_view data) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < data.size()) {
      if (std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
      else if (data[pos] == '#')
        while (pos < data.size() && data[pos] != '\n') ++pos;
      else break;
    }
    std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return std::string(data.substr(start, pos - start));
  };
  if (token() != "P6") fail(ErrorKind::Parse, "not a binary PPM");
  Image img;
  try {
    img.width = std::stoi(token());
    img.height = std::stoi(token());
    if (std::stoi(token()) != 255) fail(ErrorKind::Parse, "PPM max value must be 255");
  } catch (const std::logic_error&) {
    fail(ErrorKind::Parse, "bad PPM header");
  }
  ++pos;
  std::size_t bytes = static_cast<std::size_t>(img.width) * img.height * 3;
  if (img.width <= 0 || img.height <= 0 || data.size() < pos + bytes) fail(ErrorKind::Parse, "PPM data truncated");
  img.rgb.assign(data.begin() + pos, data.begin() + pos + bytes);
  return img;
}

}  // namespace fastspline
