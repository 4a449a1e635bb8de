#ifndef INVREP_DATA_SYNTHETIC_HPP
#define INVREP_DATA_SYNTHETIC_HPP

#include "invrep/data/dataset.hpp"

#include <cstddef>
#include <cstdint>

namespace invrep {

/// Two Gaussian class clusters (unit variance, means +-2 on feature 0) with
/// a group-dependent shift of +-2*leak on feature 1. Groups and classes are
/// balanced and independent. leak=0 makes the groups indistinguishable.
///
/// Requires n >= 4 and even, width >= 2, leak in [0, 1].
Dataset make_synthetic_two_group(std::size_t n, std::size_t width, double leak,
                                 std::uint64_t seed);

}  // namespace invrep

#endif  // INVREP_DATA_SYNTHETIC_HPP
