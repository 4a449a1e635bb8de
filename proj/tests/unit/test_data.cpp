#include "invrep/data/adult.hpp"
#include "invrep/data/dataset.hpp"
#include "invrep/data/idx.hpp"
#include "invrep/data/sampler.hpp"
#include "invrep/data/synthetic.hpp"
#include "invrep/data/transform.hpp"
#include "invrep/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <set>

using namespace invrep;

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::vector<std::uint8_t> idx_images(std::uint32_t count, std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::uint8_t> b;
  put_be32(b, kIdxImageMagic);
  put_be32(b, count);
  put_be32(b, rows);
  put_be32(b, cols);
  for (std::uint32_t i = 0; i < count * rows * cols; ++i) b.push_back(static_cast<std::uint8_t>(i * 37));
  return b;
}

std::vector<std::uint8_t> idx_labels(std::uint32_t count) {
  std::vector<std::uint8_t> b;
  put_be32(b, kIdxLabelMagic);
  put_be32(b, count);
  for (std::uint32_t i = 0; i < count; ++i) b.push_back(static_cast<std::uint8_t>(i % 10));
  return b;
}

std::size_t parse_error_position(const std::vector<std::uint8_t>& img,
                                 const std::vector<std::uint8_t>& lbl) {
  try {
    parse_idx(img, lbl);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "expected ParseError";
  return 0;
}

Dataset image_dataset(int rows, int cols, std::size_t n) {
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), rows * cols);
  for (Eigen::Index i = 0; i < ds.features.size(); ++i)
    ds.features.data()[i] = static_cast<double>((i * 7) % 11) / 10.0;
  ds.targets.assign(n, 0);
  ds.groups.assign(n, 0);
  ds.image_shape = ImageShape{rows, cols};
  return ds;
}

const char* kAdultFixture =
    "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K\n"
    "50, Self-emp-not-inc, 83311, Bachelors, 13, Married-civ-spouse, Exec-managerial, Husband, White, Male, 0, 0, 13, United-States, >50K\n"
    "\n"
    "38, Private, 215646, HS-grad, 9, Divorced, Handlers-cleaners, Not-in-family, White, Female, 0, 0, 40, ?, <=50K\n"
    "53, Private, 234721, 11th, 7, Married-civ-spouse, Handlers-cleaners, Husband, Black, Female, 0, 0, 40, United-States, >50K\n";

}  // namespace

TEST(Idx, ParsesSyntheticBytes) {
  const Dataset ds = parse_idx(idx_images(3, 2, 2), idx_labels(3));
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.width(), 4);
  ASSERT_TRUE(ds.image_shape);
  EXPECT_EQ(ds.image_shape->rows, 2);
  EXPECT_DOUBLE_EQ(ds.features(0, 1), 37.0 / 255.0);
  EXPECT_DOUBLE_EQ(ds.features(1, 0), static_cast<std::uint8_t>(4 * 37) / 255.0);
  EXPECT_EQ(ds.targets, (std::vector<int>{0, 1, 2}));
  EXPECT_GE(ds.features.minCoeff(), 0.0);
  EXPECT_LE(ds.features.maxCoeff(), 1.0);
}

TEST(Idx, BadMagicAtOffsetZero) {
  auto img = idx_images(2, 2, 2);
  img[3] = 0x01;
  EXPECT_EQ(parse_error_position(img, idx_labels(2)), 0u);
  auto lbl = idx_labels(2);
  lbl[3] = 0x03;
  EXPECT_EQ(parse_error_position(idx_images(2, 2, 2), lbl), 0u);
}

TEST(Idx, TruncatedFileReportsOffset) {
  auto img = idx_images(2, 2, 2);
  img.pop_back();
  EXPECT_EQ(parse_error_position(img, idx_labels(2)), img.size());
  const std::vector<std::uint8_t> stub{0, 0, 8};
  EXPECT_EQ(parse_error_position(stub, idx_labels(2)), 0u);
}

TEST(Idx, LabelCountMismatch) {
  EXPECT_EQ(parse_error_position(idx_images(2, 2, 2), idx_labels(3)), 4u);
  auto lbl = idx_labels(2);
  lbl.push_back(1);
  EXPECT_THROW(parse_idx(idx_images(2, 2, 2), lbl), ParseError);
}

TEST(Transform, InvertTwiceIsIdentity) {
  const Dataset ds = image_dataset(3, 3, 4);
  const Dataset once = apply_transform(ds, TransformSpec::invert());
  EXPECT_DOUBLE_EQ(once.features(0, 1), 1.0 - ds.features(0, 1));
  EXPECT_TRUE(apply_transform(once, TransformSpec::invert()).features.isApprox(ds.features, 1e-15));
  EXPECT_EQ(once.targets, ds.targets);
}

TEST(Transform, InvertRejectsOutOfRange) {
  Dataset ds = image_dataset(2, 2, 1);
  ds.features(0, 0) = 1.5;
  EXPECT_THROW(apply_transform(ds, TransformSpec::invert()), InputError);
}

TEST(Transform, RotateZeroAndFullTurn) {
  const Dataset ds = image_dataset(5, 5, 2);
  EXPECT_TRUE(apply_transform(ds, TransformSpec::rotate(0.0)).features.isApprox(ds.features, 1e-12));
  EXPECT_TRUE(apply_transform(ds, TransformSpec::rotate(360.0)).features.isApprox(ds.features, 1e-9));
}

TEST(Transform, QuarterTurnsCompose) {
  // 90 degree rotations of a square image land exactly on the pixel grid, so
  // four of them are lossless and +90 then -90 round-trips.
  const Dataset ds = image_dataset(4, 4, 1);
  Dataset r = ds;
  for (int k = 0; k < 4; ++k) r = apply_transform(r, TransformSpec::rotate(90.0));
  EXPECT_TRUE(r.features.isApprox(ds.features, 1e-9));
  const Dataset back =
      apply_transform(apply_transform(ds, TransformSpec::rotate(90.0)), TransformSpec::rotate(-90.0));
  EXPECT_TRUE(back.features.isApprox(ds.features, 1e-9));
}

TEST(Transform, QuarterTurnDirection) {
  // A single lit pixel top-right moves to top-left under a counterclockwise turn.
  Dataset ds = image_dataset(3, 3, 1);
  ds.features.setZero();
  ds.features(0, 2) = 1.0;
  const Dataset r = apply_transform(ds, TransformSpec::rotate(90.0));
  EXPECT_NEAR(r.features(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(r.features.sum(), 1.0, 1e-9);
}

TEST(Transform, RotationNeedsImageShape) {
  Dataset ds = image_dataset(2, 2, 1);
  ds.image_shape.reset();
  EXPECT_THROW(apply_transform(ds, TransformSpec::rotate(10.0)), InputError);
}

TEST(Transform, RandomRotationSeeded) {
  const Dataset ds = image_dataset(6, 6, 5);
  const Dataset a = apply_transform(ds, TransformSpec::random_rotate(30.0, 3));
  const Dataset b = apply_transform(ds, TransformSpec::random_rotate(30.0, 3));
  const Dataset c = apply_transform(ds, TransformSpec::random_rotate(30.0, 4));
  EXPECT_TRUE(a.features == b.features);
  EXPECT_FALSE(a.features == c.features);
}

TEST(Dataset, MergeTagsGroups) {
  const Dataset a = image_dataset(2, 2, 3);
  const Dataset b = apply_transform(a, TransformSpec::invert());
  const Dataset m = merge_as_groups(a, b);
  EXPECT_EQ(m.size(), 6u);
  EXPECT_TRUE(m.has_groups);
  EXPECT_EQ(m.groups, (std::vector<int>{0, 0, 0, 1, 1, 1}));
  EXPECT_TRUE(m.features.bottomRows(3) == b.features);
  EXPECT_THROW(merge_as_groups(a, image_dataset(3, 3, 1)), InputError);
}

TEST(Dataset, ValidateCatchesProblems) {
  Dataset ds = image_dataset(2, 2, 2);
  EXPECT_NO_THROW(ds.validate());
  ds.groups[1] = 3;
  EXPECT_THROW(ds.validate(), InputError);
  ds.groups[1] = 0;
  ds.features(1, 1) = std::nan("");
  EXPECT_THROW(ds.validate(), InputError);
}

TEST(Dataset, SubsampleAndBalancedSample) {
  const auto rows = random_subsample(100, 10, 5);
  EXPECT_EQ(rows.size(), 10u);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end()));
  EXPECT_EQ(std::set<std::size_t>(rows.begin(), rows.end()).size(), 10u);
  EXPECT_EQ(rows, random_subsample(100, 10, 5));
  EXPECT_THROW(random_subsample(5, 6, 1), InputError);

  Dataset ds = image_dataset(1, 1, 60);
  for (std::size_t i = 0; i < 60; ++i) ds.targets[i] = static_cast<int>(i % 3);
  const auto bal = class_balanced_sample(ds, 10, 2);
  std::array<int, 3> per{};
  for (auto r : bal) ++per[static_cast<std::size_t>(ds.targets[r])];
  EXPECT_EQ(per, (std::array<int, 3>{4, 3, 3}));
  EXPECT_THROW(class_balanced_sample(ds, 61, 2), InputError);
}

TEST(Sampler, EpochIsAPartition) {
  std::vector<int> groups(103);
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i] = i % 5 == 0;
  for (auto policy : {BatchPolicy::shuffled, BatchPolicy::group_stratified}) {
    const BatchSampler s{16, policy, 9};
    const auto batches = epoch_batches(groups, s, 0);
    std::vector<std::size_t> all;
    for (const auto& b : batches) {
      EXPECT_LE(b.size(), 16u);
      all.insert(all.end(), b.begin(), b.end());
    }
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), groups.size());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
    EXPECT_EQ(batches, epoch_batches(groups, s, 0));
    EXPECT_NE(batches, epoch_batches(groups, s, 1));
  }
}

TEST(Sampler, StratifiedBatchesSeeBothGroups) {
  std::vector<int> groups(200, 0);
  for (std::size_t i = 0; i < 20; ++i) groups[i * 10] = 1;
  const auto batches = epoch_batches(groups, BatchSampler{16, BatchPolicy::group_stratified, 3}, 0);
  for (const auto& b : batches) {
    const auto ones = std::count_if(b.begin(), b.end(), [&](std::size_t r) { return groups[r] == 1; });
    EXPECT_GE(ones, 1);
    EXPECT_LT(static_cast<std::size_t>(ones), b.size());
  }
}

TEST(Sampler, RejectsBadSizes) {
  const std::vector<int> groups(10, 0);
  EXPECT_THROW(epoch_batches(groups, BatchSampler{1, BatchPolicy::shuffled, 0}, 0), ConfigError);
  EXPECT_THROW(epoch_batches(groups, BatchSampler{11, BatchPolicy::shuffled, 0}, 0), InputError);
  EXPECT_THROW(parse_batch_policy("random"), ConfigError);
}

TEST(Synthetic, ShapeBalanceAndLeak) {
  const Dataset d0 = make_synthetic_two_group(4000, 6, 0.0, 1);
  EXPECT_EQ(d0.size(), 4000u);
  EXPECT_EQ(d0.width(), 6);
  EXPECT_EQ(std::count(d0.groups.begin(), d0.groups.end(), 1), 2000);
  EXPECT_EQ(std::count(d0.targets.begin(), d0.targets.end(), 1), 2000);
  auto group_mean_gap = [](const Dataset& d) {
    double s[2] = {0, 0};
    for (std::size_t i = 0; i < d.size(); ++i)
      s[d.groups[i]] += d.features(static_cast<Eigen::Index>(i), 1);
    return (s[1] - s[0]) / (static_cast<double>(d.size()) / 2);
  };
  EXPECT_NEAR(group_mean_gap(d0), 0.0, 0.15);
  EXPECT_NEAR(group_mean_gap(make_synthetic_two_group(4000, 6, 1.0, 1)), 4.0, 0.15);
  EXPECT_TRUE(make_synthetic_two_group(40, 2, 0.5, 7).features ==
              make_synthetic_two_group(40, 2, 0.5, 7).features);
  EXPECT_THROW(make_synthetic_two_group(5, 2, 0.0, 1), InputError);
  EXPECT_THROW(make_synthetic_two_group(8, 2, 1.5, 1), InputError);
}

TEST(Adult, ParsesAndSkipsBlankLines) {
  const auto rows = parse_adult_csv(kAdultFixture);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2].line, 4u);
  EXPECT_EQ(rows[2].fields[13], "?");
}

TEST(Adult, ErrorsCarryLineNumbers) {
  const std::string bad_count = std::string(kAdultFixture) + "1, 2, 3\n";
  try {
    parse_adult_csv(bad_count);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 6u);
  }
  const std::string bad_number =
      "x, Private, 1, HS-grad, 9, Divorced, Sales, Unmarried, White, Female, 0, 0, 40, Cuba, <=50K\n";
  try {
    parse_adult_csv(bad_number);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 1u);
    EXPECT_NE(std::string(e.what()).find("age"), std::string::npos);
  }
}

TEST(Adult, StandardizesWithTrainStatistics) {
  const auto rows = parse_adult_csv(kAdultFixture);
  const AdultEncoder enc = AdultEncoder::fit(rows, AdultOptions{});
  const Dataset ds = enc.encode(rows, Split::train);
  EXPECT_EQ(ds.targets, (std::vector<int>{0, 1, 0, 1}));
  EXPECT_EQ(ds.groups, (std::vector<int>{1, 1, 0, 0}));
  // Age is the first column: mean 45, population std sqrt(174 / 4).
  EXPECT_NEAR(ds.features(0, 0), (39 - 45) / std::sqrt(43.5), 1e-12);
  EXPECT_NEAR(ds.features.col(0).mean(), 0.0, 1e-12);
  for (const auto& c : ds.schema) EXPECT_NE(c.name, "sex");
  // One hot per categorical column and row.
  const double hot = ds.features.rightCols(ds.width() - 1).cwiseEqual(1.0).count();
  EXPECT_GE(hot, 4 * 7);
}

TEST(Adult, UnseenCategoryUsesUnknownColumn) {
  const auto rows = parse_adult_csv(kAdultFixture);
  const AdultEncoder enc = AdultEncoder::fit(rows, AdultOptions{});
  const auto test = parse_adult_csv(
      "30, Never-worked, 1, HS-grad, 9, Divorced, Sales, Unmarried, White, Female, 0, 0, 40, Cuba, <=50K.\n");
  const Dataset ds = enc.encode(test, Split::test);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.targets[0], 0);
  Eigen::Index unknown_hits = 0;
  for (std::size_t c = 0; c < ds.schema.size(); ++c) {
    if (ds.schema[c].category.empty() || ds.features(0, static_cast<Eigen::Index>(c)) != 1.0) continue;
    const auto& cat = ds.schema[c].category;
    if (ds.schema[c].name == "workclass" || ds.schema[c].name == "native-country") {
      EXPECT_NE(cat, "Never-worked");
      EXPECT_NE(cat, "Cuba");
      ++unknown_hits;
    }
  }
  EXPECT_EQ(unknown_hits, 2);
}

TEST(Adult, SchemaTextRoundTripAndChecksum) {
  const auto rows = parse_adult_csv(kAdultFixture);
  AdultOptions with_z;
  with_z.exclude_z = false;
  const AdultEncoder a = AdultEncoder::fit(rows, AdultOptions{});
  const AdultEncoder b = AdultEncoder::from_text(a.to_text());
  EXPECT_EQ(a.to_text(), b.to_text());
  EXPECT_EQ(a.checksum(), b.checksum());
  const AdultEncoder c = AdultEncoder::fit(rows, with_z);
  EXPECT_NE(a.checksum(), c.checksum());
  EXPECT_GT(c.schema().size(), a.schema().size());
  EXPECT_TRUE(b.encode(rows, Split::train).features == a.encode(rows, Split::train).features);
}

TEST(Adult, DropMissing) {
  const auto rows = parse_adult_csv(kAdultFixture);
  AdultOptions o;
  o.drop_missing = true;
  EXPECT_EQ(AdultEncoder::fit(rows, o).encode(rows, Split::train).size(), 3u);
}

TEST(Adult, RealFilesWhenPresent) {
  const std::filesystem::path root = INVREP_TEST_DATA_ROOT;
  const auto train = root / "adult" / "adult.data";
  if (!std::filesystem::exists(train)) GTEST_SKIP() << "Adult data not found under " << root;
  const AdultSplits s = load_adult(train, root / "adult" / "adult.test", AdultOptions{});
  EXPECT_EQ(s.train.size() + s.validation.size(), 32561u);
  EXPECT_EQ(s.test.size(), 16281u);
  EXPECT_EQ(s.validation.size(), 6512u);
}
