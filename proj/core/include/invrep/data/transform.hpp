#ifndef INVREP_DATA_TRANSFORM_HPP
#define INVREP_DATA_TRANSFORM_HPP

#include "invrep/data/dataset.hpp"

#include <cstdint>
#include <span>

namespace invrep {

struct TransformSpec {
  enum class Kind { invert, rotate, random_rotate };

  Kind kind = Kind::invert;
  /// Fixed angle for `rotate`; half-width of the uniform range for
  /// `random_rotate`. Degrees, counterclockwise as displayed.
  double degrees = 0.0;
  std::uint64_t seed = 0;

  static TransformSpec invert() { return {Kind::invert, 0.0, 0}; }
  static TransformSpec rotate(double degrees) { return {Kind::rotate, degrees, 0}; }
  static TransformSpec random_rotate(double range, std::uint64_t seed) {
    return {Kind::random_rotate, range, seed};
  }
};

/// Bilinear rotation about the image center; samples falling outside the
/// source image read as 0.
void rotate_image(std::span<const double> src, std::span<double> dst, int rows, int cols,
                  double degrees);

/// Row count, labels and groups are preserved. `invert` maps p to 1 - p and
/// requires features in [0, 1]; rotations require an image-shaped dataset.
Dataset apply_transform(const Dataset& ds, const TransformSpec& t);

}  // namespace invrep

#endif  // INVREP_DATA_TRANSFORM_HPP
