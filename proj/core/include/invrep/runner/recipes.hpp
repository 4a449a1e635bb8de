#ifndef INVREP_RUNNER_RECIPES_HPP
#define INVREP_RUNNER_RECIPES_HPP

#include "invrep/data/dataset.hpp"
#include "invrep/runner/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace invrep {

/// Datasets of one fairness recipe. `validation` is empty for the MNIST and
/// synthetic recipes.
struct PreparedData {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::vector<std::string> notes;

  const Dataset& split(Split s) const;
};

/// Builds the train/validation/test datasets for `cfg.recipe`. The data seed
/// (`cfg.data.seed`) alone decides subsampling and splits, so every run seed
/// sees the same data. mnist_rotated is handled by prepare_domain_data.
PreparedData prepare_data(const ExperimentConfig& cfg);

/// MNIST -> rotated MNIST. `source` is a random subset of the MNIST training
/// images (z=0); `target_pool` holds the remaining training images rotated
/// (z=1), from which labeled target rows are drawn; `target_test` is the full
/// rotated MNIST test set (z=1).
struct DomainData {
  Dataset source;
  Dataset target_pool;
  Dataset target_test;
};

DomainData prepare_domain_data(const ExperimentConfig& cfg);

struct MnistFiles {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};
MnistFiles mnist_files(const std::filesystem::path& root);
Dataset load_mnist(const std::filesystem::path& root, Split split);

}  // namespace invrep

#endif  // INVREP_RUNNER_RECIPES_HPP
