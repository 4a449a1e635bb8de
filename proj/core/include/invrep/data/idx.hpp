#ifndef INVREP_DATA_IDX_HPP
#define INVREP_DATA_IDX_HPP

#include "invrep/data/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace invrep {

// IDX layout (all header integers big-endian):
//
//   images: 0x00000803, count, rows, cols, then count*rows*cols unsigned bytes
//   labels: 0x00000801, count, then count unsigned bytes
//
// Pixels are row-major per image.

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Parses an image/label pair already in memory. Pixels are scaled to [0, 1].
/// Any structural problem throws ParseError with the offending byte offset;
/// nothing is returned partially.
Dataset parse_idx(std::span<const std::uint8_t> image_bytes,
                  std::span<const std::uint8_t> label_bytes);

Dataset load_idx_images(const std::filesystem::path& image_file,
                        const std::filesystem::path& label_file);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace invrep

#endif  // INVREP_DATA_IDX_HPP
