#include "invrep/data/synthetic.hpp"

#include "invrep/error.hpp"

#include <random>

namespace invrep {

Dataset make_synthetic_two_group(std::size_t n, std::size_t width, double leak,
                                 std::uint64_t seed) {
  if (n < 4 || n % 2 != 0) throw InputError("synthetic: n must be even and >= 4");
  if (width < 2) throw InputError("synthetic: width must be >= 2");
  if (!(leak >= 0.0 && leak <= 1.0)) throw InputError("synthetic: leak must lie in [0, 1]");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  ds.targets.resize(n);
  ds.groups.resize(n);
  ds.has_groups = true;
  for (std::size_t i = 0; i < n; ++i) {
    const int z = static_cast<int>(i % 2);
    const int y = static_cast<int>((i / 2) % 2);
    ds.groups[i] = z;
    ds.targets[i] = y;
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < ds.features.cols(); ++k) ds.features(r, k) = noise(rng);
    ds.features(r, 0) += y == 1 ? 2.0 : -2.0;
    ds.features(r, 1) += leak * (z == 1 ? 2.0 : -2.0);
  }
  return ds;
}

}  // namespace invrep
