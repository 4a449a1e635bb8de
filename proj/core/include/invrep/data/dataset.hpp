#ifndef INVREP_DATA_DATASET_HPP
#define INVREP_DATA_DATASET_HPP

#include "invrep/nn/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invrep {

enum class Split { train, validation, test };

std::string_view split_name(Split s);

struct ColumnDescriptor {
  enum class Kind { continuous, one_hot };
  std::string name;
  Kind kind = Kind::continuous;
  std::string category;  // one-hot columns only
};

struct ImageShape {
  int rows = 0;
  int cols = 0;
};

/// Feature matrix with target labels and a binary sensitive attribute z.
struct Dataset {
  Tensor2 features;
  std::vector<int> targets;
  /// z in {0, 1}. All zero until assigned (`has_groups == false`).
  std::vector<int> groups;
  bool has_groups = false;
  Split split = Split::train;
  std::vector<ColumnDescriptor> schema;
  std::optional<ImageShape> image_shape;

  std::size_t size() const { return targets.size(); }
  Eigen::Index width() const { return features.cols(); }
  /// One more than the largest target label.
  int num_classes() const;

  /// Row counts agree, features finite, z in {0, 1}. Throws InputError.
  void validate() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Tensor2 gather_features(std::span<const std::size_t> rows) const;
  std::vector<int> gather_targets(std::span<const std::size_t> rows) const;
  std::vector<int> gather_groups(std::span<const std::size_t> rows) const;
};

/// Concatenates two datasets, tagging rows of `ds0` with z=0 and rows of
/// `ds1` with z=1.
Dataset merge_as_groups(const Dataset& ds0, const Dataset& ds1);

/// `n` distinct row indices drawn uniformly (sorted ascending).
std::vector<std::size_t> random_subsample(std::size_t population, std::size_t n,
                                          std::uint64_t seed);

/// `n` rows with equal counts per class (the first `n % classes` classes get
/// one extra). Throws InputError if a class cannot supply its quota.
std::vector<std::size_t> class_balanced_sample(const Dataset& ds, std::size_t n,
                                               std::uint64_t seed);

}  // namespace invrep

#endif  // INVREP_DATA_DATASET_HPP
