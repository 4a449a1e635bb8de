#include "invrep/data/transform.hpp"

#include "invrep/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace invrep {

void rotate_image(std::span<const double> src, std::span<double> dst, int rows, int cols,
                  double degrees) {
  const double theta = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cx = (cols - 1) / 2.0;
  const double cy = (rows - 1) / 2.0;
  auto at = [&](int y, int x) -> double {
    if (x < 0 || y < 0 || x >= cols || y >= rows) return 0.0;
    return src[static_cast<std::size_t>(y) * static_cast<std::size_t>(cols) +
               static_cast<std::size_t>(x)];
  };
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      // Inverse map: destination pixel -> source location (image y axis points down).
      const double dx = x - cx;
      const double dy = y - cy;
      const double sx = c * dx - s * dy + cx;
      const double sy = s * dx + c * dy + cy;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double ax = sx - fx0;
      const double ay = sy - fy0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      double v = (1.0 - ax) * (1.0 - ay) * at(y0, x0);
      if (ax != 0.0) v += ax * (1.0 - ay) * at(y0, x0 + 1);
      if (ay != 0.0) v += (1.0 - ax) * ay * at(y0 + 1, x0);
      if (ax != 0.0 && ay != 0.0) v += ax * ay * at(y0 + 1, x0 + 1);
      dst[static_cast<std::size_t>(y) * static_cast<std::size_t>(cols) +
          static_cast<std::size_t>(x)] = v;
    }
  }
}

Dataset apply_transform(const Dataset& ds, const TransformSpec& t) {
  Dataset out = ds;
  if (t.kind == TransformSpec::Kind::invert) {
    if (ds.features.size() > 0 &&
        (ds.features.minCoeff() < 0.0 || ds.features.maxCoeff() > 1.0)) {
      throw InputError("invert: features must lie in [0, 1]");
    }
    out.features = (1.0 - ds.features.array()).matrix();
    return out;
  }

  if (!std::isfinite(t.degrees)) throw InputError("rotation angle must be finite");
  if (!ds.image_shape ||
      static_cast<Eigen::Index>(ds.image_shape->rows) * ds.image_shape->cols != ds.width()) {
    throw InputError("rotation needs image-shaped features, got width " +
                     std::to_string(ds.width()));
  }
  const int rows = ds.image_shape->rows;
  const int cols = ds.image_shape->cols;
  std::mt19937_64 rng(t.seed);
  std::uniform_real_distribution<double> angle(-t.degrees, t.degrees);
  for (Eigen::Index r = 0; r < ds.features.rows(); ++r) {
    const double deg = t.kind == TransformSpec::Kind::rotate ? t.degrees : angle(rng);
    rotate_image(row_span(ds.features, r),
                 {out.features.data() + r * out.features.cols(),
                  static_cast<std::size_t>(out.features.cols())},
                 rows, cols, deg);
  }
  return out;
}

}  // namespace invrep
