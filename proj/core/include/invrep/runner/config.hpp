#ifndef INVREP_RUNNER_CONFIG_HPP
#define INVREP_RUNNER_CONFIG_HPP

#include "invrep/affinity.hpp"
#include "invrep/data/dataset.hpp"
#include "invrep/data/sampler.hpp"
#include "invrep/interpret.hpp"
#include "invrep/nn/network.hpp"
#include "invrep/nn/optimizer.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace invrep {

/// Which dataset construction an experiment uses.
enum class Recipe {
  mnist_inverted,  // MNIST (z=0) + inverted MNIST (z=1), digit target
  mnist_rotated,   // MNIST source -> MNIST rotated target, domain id as z
  adult,           // UCI Adult income, sex as z
  synthetic,       // make_synthetic_two_group fixture
};

std::string_view recipe_name(Recipe r);
Recipe parse_recipe(std::string_view name);

/// Environment variable that overrides `data.root`.
inline constexpr const char* kDataRootEnv = "INVREP_DATA_ROOT";

struct DataSettings {
  std::filesystem::path root = "data";
  std::uint64_t seed = 0;  // subsampling / splitting, independent of the run seed

  // mnist_inverted: number of MNIST images per group (0 = all). Both groups
  // use the same images, one of them inverted.
  std::size_t train_subsample = 0;
  std::size_t test_subsample = 0;

  // adult
  bool exclude_z = true;
  bool drop_missing = false;
  double validation_fraction = 0.2;

  // synthetic
  std::size_t synthetic_n = 2000;
  std::size_t synthetic_width = 8;
  double leak = 0.0;

  // mnist_rotated
  std::size_t source_samples = 10000;
  std::size_t target_samples = 200;
  double rotation_degrees = 30.0;
  double augment_degrees = 30.0;
  /// Repeat the labeled target rows so both domains are equally frequent.
  bool balance_domains = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Recipe recipe = Recipe::mnist_inverted;
  DataSettings data;

  std::vector<std::size_t> hidden_widths = {128, 128, 20};
  Activation hidden_activation = Activation::relu;
  /// Defaults to the last hidden layer.
  std::optional<std::size_t> representation_index;

  OptimizerSettings optimizer;
  AffinityConfig affinity;
  BatchSampler batch{128, BatchPolicy::group_stratified, 0};
  std::size_t epochs = 30;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  bool run_probe = true;
  ProbeSettings probe;
  Split evaluation_split = Split::test;
  std::filesystem::path out_dir;  // empty: nothing is written

  std::size_t resolved_representation_index() const;
  /// Network shape for a dataset with `input_width` features and `classes` targets.
  ArchitectureSpec architecture(std::size_t input_width, std::size_t classes) const;
  /// Throws ConfigError on any invalid setting.
  void validate() const;
};

/// Parses the JSON config format. Unknown keys are rejected so typos do not
/// silently fall back to defaults.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// `INVREP_DATA_ROOT` when set, else `cfg.data.root`.
std::filesystem::path resolve_data_root(const ExperimentConfig& cfg);

}  // namespace invrep

#endif  // INVREP_RUNNER_CONFIG_HPP
