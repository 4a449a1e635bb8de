#include "invrep/data/dataset.hpp"

#include "invrep/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace invrep {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "unknown";
}

int Dataset::num_classes() const {
  if (targets.empty()) return 0;
  return *std::max_element(targets.begin(), targets.end()) + 1;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != targets.size() ||
      groups.size() != targets.size()) {
    throw InputError("dataset: features, targets and groups disagree on row count");
  }
  if (!all_finite(features)) throw InputError("dataset: non-finite feature value");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] != 0 && groups[i] != 1) {
      throw InputError("dataset: group id at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

Tensor2 Dataset::gather_features(std::span<const std::size_t> rows) const {
  Tensor2 out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> Dataset::gather_targets(std::span<const std::size_t> rows) const {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = targets[rows[i]];
  return out;
}

std::vector<int> Dataset::gather_groups(std::span<const std::size_t> rows) const {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = groups[rows[i]];
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  for (std::size_t r : rows) {
    if (r >= size()) throw InputError("dataset subset: row " + std::to_string(r) + " out of range");
  }
  Dataset out;
  out.features = gather_features(rows);
  out.targets = gather_targets(rows);
  out.groups = gather_groups(rows);
  out.has_groups = has_groups;
  out.split = split;
  out.schema = schema;
  out.image_shape = image_shape;
  return out;
}

Dataset merge_as_groups(const Dataset& ds0, const Dataset& ds1) {
  if (ds0.size() == 0 || ds1.size() == 0) {
    throw InputError("merge_as_groups: both datasets must be non-empty");
  }
  if (ds0.width() != ds1.width()) {
    throw InputError("merge_as_groups: feature widths differ (" + std::to_string(ds0.width()) +
                     " vs " + std::to_string(ds1.width()) + ")");
  }
  Dataset out;
  out.features.resize(ds0.features.rows() + ds1.features.rows(), ds0.width());
  out.features.topRows(ds0.features.rows()) = ds0.features;
  out.features.bottomRows(ds1.features.rows()) = ds1.features;
  out.targets = ds0.targets;
  out.targets.insert(out.targets.end(), ds1.targets.begin(), ds1.targets.end());
  out.groups.assign(ds0.size(), 0);
  out.groups.insert(out.groups.end(), ds1.size(), 1);
  out.has_groups = true;
  out.split = ds0.split;
  out.schema = ds0.schema;
  out.image_shape = ds0.image_shape;
  return out;
}

std::vector<std::size_t> random_subsample(std::size_t population, std::size_t n,
                                          std::uint64_t seed) {
  if (n > population) {
    throw InputError("cannot draw " + std::to_string(n) + " rows from " +
                     std::to_string(population));
  }
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::size_t> class_balanced_sample(const Dataset& ds, std::size_t n,
                                               std::uint64_t seed) {
  if (n > ds.size()) {
    throw InputError("cannot draw " + std::to_string(n) + " labeled rows from a dataset of " +
                     std::to_string(ds.size()));
  }
  const int classes = ds.num_classes();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.targets[i])].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  out.reserve(n);
  const std::size_t base = classes > 0 ? n / static_cast<std::size_t>(classes) : 0;
  const std::size_t extra = classes > 0 ? n % static_cast<std::size_t>(classes) : 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const std::size_t quota = base + (c < extra ? 1 : 0);
    auto& rows = by_class[c];
    if (rows.size() < quota) {
      throw InputError("class " + std::to_string(c) + " has only " + std::to_string(rows.size()) +
                       " rows, " + std::to_string(quota) + " requested");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    out.insert(out.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(quota));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace invrep
