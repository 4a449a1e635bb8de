#include "invrep/runner/recipes.hpp"

#include "invrep/data/adult.hpp"
#include "invrep/data/idx.hpp"
#include "invrep/data/synthetic.hpp"
#include "invrep/data/transform.hpp"
#include "invrep/error.hpp"


namespace invrep {

const Dataset& PreparedData::split(Split s) const {
  switch (s) {
    case Split::train: return train;
    case Split::validation: return validation;
    case Split::test: return test;
  }
  return test;
}

MnistFiles mnist_files(const std::filesystem::path& root) {
  const auto dir = root / "mnist";
  return {dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
          dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
}

Dataset load_mnist(const std::filesystem::path& root, Split split) {
  const MnistFiles f = mnist_files(root);
  const auto& images = split == Split::test ? f.test_images : f.train_images;
  const auto& labels = split == Split::test ? f.test_labels : f.train_labels;
  for (const auto& p : {images, labels}) {
    if (!std::filesystem::exists(p)) {
      throw InputError("missing MNIST file " + p.string() + " (set " + kDataRootEnv +
                       " or data.root; see tools/fetch_data.sh)");
    }
  }
  Dataset ds = load_idx_images(images, labels);
  ds.split = split;
  return ds;
}

namespace {

Dataset maybe_subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n >= ds.size()) return ds;
  const auto rows = random_subsample(ds.size(), n, seed);
  return ds.subset(rows);
}

PreparedData prepare_mnist_inverted(const ExperimentConfig& cfg) {
  const auto root = resolve_data_root(cfg);
  PreparedData out;
  // The same images appear in both groups, once as-is (z=0), once inverted (z=1).
  const Dataset train = maybe_subsample(load_mnist(root, Split::train), cfg.data.train_subsample,
                                        cfg.data.seed);
  const Dataset test = maybe_subsample(load_mnist(root, Split::test), cfg.data.test_subsample,
                                       cfg.data.seed + 1);
  out.train = merge_as_groups(train, apply_transform(train, TransformSpec::invert()));
  out.test = merge_as_groups(test, apply_transform(test, TransformSpec::invert()));
  out.train.split = Split::train;
  out.test.split = Split::test;
  return out;
}

PreparedData prepare_adult(const ExperimentConfig& cfg) {
  const auto root = resolve_data_root(cfg) / "adult";
  const auto train_csv = root / "adult.data";
  const auto test_csv = root / "adult.test";
  for (const auto& p : {train_csv, test_csv}) {
    if (!std::filesystem::exists(p)) {
      throw InputError("missing Adult file " + p.string() + " (set " + kDataRootEnv +
                       " or data.root; see tools/fetch_data.sh)");
    }
  }
  AdultOptions opt;
  opt.exclude_z = cfg.data.exclude_z;
  opt.drop_missing = cfg.data.drop_missing;
  opt.validation_fraction = cfg.data.validation_fraction;
  opt.split_seed = cfg.data.seed;
  AdultSplits s = load_adult(train_csv, test_csv, opt);
  PreparedData out;
  out.train = std::move(s.train);
  out.validation = std::move(s.validation);
  out.test = std::move(s.test);
  out.notes.push_back("adult_schema_checksum=" + std::to_string(s.encoder.checksum()));
  return out;
}

PreparedData prepare_synthetic(const ExperimentConfig& cfg) {
  PreparedData out;
  out.train = make_synthetic_two_group(cfg.data.synthetic_n, cfg.data.synthetic_width,
                                       cfg.data.leak, cfg.data.seed);
  out.test = make_synthetic_two_group(cfg.data.synthetic_n, cfg.data.synthetic_width,
                                      cfg.data.leak, cfg.data.seed + 0x51ed);
  out.train.split = Split::train;
  out.test.split = Split::test;
  return out;
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg) {
  switch (cfg.recipe) {
    case Recipe::mnist_inverted: return prepare_mnist_inverted(cfg);
    case Recipe::adult: return prepare_adult(cfg);
    case Recipe::synthetic: return prepare_synthetic(cfg);
    case Recipe::mnist_rotated:
      throw ConfigError("recipe mnist_rotated is a domain adaptation recipe; use adapt");
  }
  throw ConfigError("unknown recipe");
}

DomainData prepare_domain_data(const ExperimentConfig& cfg) {
  if (cfg.recipe != Recipe::mnist_rotated) {
    throw ConfigError("domain adaptation needs recipe mnist_rotated, got " +
                      std::string(recipe_name(cfg.recipe)));
  }
  const auto root = resolve_data_root(cfg);
  const Dataset train = load_mnist(root, Split::train);
  const Dataset test = load_mnist(root, Split::test);

  const auto source_rows = random_subsample(train.size(), cfg.data.source_samples, cfg.data.seed);
  std::vector<bool> taken(train.size(), false);
  for (std::size_t r : source_rows) taken[r] = true;
  std::vector<std::size_t> rest;
  rest.reserve(train.size() - source_rows.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (!taken[r]) rest.push_back(r);
  }

  DomainData out;
  out.source = train.subset(source_rows);
  out.source.groups.assign(out.source.size(), 0);
  out.source.has_groups = true;

  out.target_pool = apply_transform(train.subset(rest), TransformSpec::rotate(cfg.data.rotation_degrees));
  out.target_pool.groups.assign(out.target_pool.size(), 1);
  out.target_pool.has_groups = true;

  out.target_test = apply_transform(test, TransformSpec::rotate(cfg.data.rotation_degrees));
  out.target_test.groups.assign(out.target_test.size(), 1);
  out.target_test.has_groups = true;
  out.target_test.split = Split::test;
  return out;
}

}  // namespace invrep
