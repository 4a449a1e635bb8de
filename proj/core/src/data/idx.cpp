#include "invrep/data/idx.hpp"

#include "invrep/error.hpp"

#include <fstream>
#include <iterator>
#include <string>

namespace invrep {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset,
                        const char* file) {
  if (offset + 4 > bytes.size()) {
    throw ParseError(std::string(file) + ": truncated header at byte " + std::to_string(offset),
                     offset);
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

Dataset parse_idx(std::span<const std::uint8_t> image_bytes,
                  std::span<const std::uint8_t> label_bytes) {
  if (read_be32(image_bytes, 0, "images") != kIdxImageMagic) {
    throw ParseError("images: bad magic number", 0);
  }
  const std::uint32_t count = read_be32(image_bytes, 4, "images");
  const std::uint32_t rows = read_be32(image_bytes, 8, "images");
  const std::uint32_t cols = read_be32(image_bytes, 12, "images");
  if (rows == 0 || cols == 0) throw ParseError("images: zero image dimension", 8);
  const std::size_t pixels = std::size_t{rows} * cols;
  const std::size_t expected = 16 + std::size_t{count} * pixels;
  if (image_bytes.size() < expected) {
    throw ParseError("images: file truncated, expected " + std::to_string(expected) +
                         " bytes, got " + std::to_string(image_bytes.size()),
                     image_bytes.size());
  }
  if (image_bytes.size() > expected) {
    throw ParseError("images: trailing bytes after image data", expected);
  }

  if (read_be32(label_bytes, 0, "labels") != kIdxLabelMagic) {
    throw ParseError("labels: bad magic number", 0);
  }
  const std::uint32_t label_count = read_be32(label_bytes, 4, "labels");
  if (label_count != count) {
    throw ParseError("labels: count " + std::to_string(label_count) +
                         " does not match image count " + std::to_string(count),
                     4);
  }
  if (label_bytes.size() != 8 + std::size_t{count}) {
    throw ParseError("labels: file size does not match label count",
                     std::min<std::size_t>(label_bytes.size(), 8 + std::size_t{count}));
  }

  Dataset ds;
  ds.features.resize(count, static_cast<Eigen::Index>(pixels));
  const std::uint8_t* px = image_bytes.data() + 16;
  for (std::size_t k = 0; k < std::size_t{count} * pixels; ++k) {
    ds.features.data()[k] = static_cast<double>(px[k]) / 255.0;
  }
  ds.targets.resize(count);
  for (std::size_t i = 0; i < count; ++i) ds.targets[i] = label_bytes[8 + i];
  ds.groups.assign(count, 0);
  ds.image_shape = ImageShape{static_cast<int>(rows), static_cast<int>(cols)};
  return ds;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Dataset load_idx_images(const std::filesystem::path& image_file,
                        const std::filesystem::path& label_file) {
  const auto images = read_binary_file(image_file);
  const auto labels = read_binary_file(label_file);
  try {
    return parse_idx(images, labels);
  } catch (const ParseError& e) {
    throw ParseError(image_file.filename().string() + "/" + label_file.filename().string() +
                         ": " + e.what(),
                     e.position());
  }
}

}  // namespace invrep
