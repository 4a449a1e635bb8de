#ifndef INVREP_DATA_ADULT_HPP
#define INVREP_DATA_ADULT_HPP

#include "invrep/data/dataset.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace invrep {

/// UCI Adult column order. `income` is the target, `sex` the sensitive attribute.
inline constexpr std::array<const char*, 15> kAdultColumns = {
    "age",          "workclass",     "fnlwgt",       "education",      "education-num",
    "marital-status", "occupation",  "relationship", "race",           "sex",
    "capital-gain", "capital-loss",  "hours-per-week", "native-country", "income"};

struct AdultOptions {
  /// Keep `sex` out of the feature matrix (it is still exported as z).
  bool exclude_z = true;
  /// Drop rows containing "?"; otherwise "?" is an ordinary category.
  bool drop_missing = false;
  double validation_fraction = 0.2;
  std::uint64_t split_seed = 0;
};

struct AdultRow {
  std::array<std::string, 15> fields;
  std::size_t line = 0;
};

/// Reads an Adult CSV (adult.data or adult.test). Blank lines and lines
/// starting with '|' are skipped; a row with the wrong field count or a
/// non-numeric continuous value throws ParseError with its line number.
std::vector<AdultRow> read_adult_csv(const std::filesystem::path& path);
std::vector<AdultRow> parse_adult_csv(const std::string& text);

/// Train-fitted preprocessing: standardized continuous columns (train mean
/// and population std), one-hot categoricals with an extra "unknown" column
/// for categories unseen at fit time.
class AdultEncoder {
 public:
  static AdultEncoder fit(std::span<const AdultRow> train, const AdultOptions& options);

  Dataset encode(std::span<const AdultRow> rows, Split split) const;

  const std::vector<ColumnDescriptor>& schema() const { return schema_; }
  const AdultOptions& options() const { return options_; }

  /// Schema config as `key=value` lines; `from_text(to_text())` is lossless.
  std::string to_text() const;
  static AdultEncoder from_text(const std::string& text);
  /// FNV-1a 64 of `to_text()`.
  std::uint64_t checksum() const;

 private:
  AdultOptions options_;
  std::map<std::string, std::pair<double, double>> stats_;        // column -> (mean, std)
  std::map<std::string, std::vector<std::string>> categories_;  // column -> sorted categories
  std::vector<ColumnDescriptor> schema_;

  void build_schema();
};

struct AdultSplits {
  Dataset train;
  Dataset validation;
  Dataset test;
  AdultEncoder encoder;
};

/// Shuffles `train_csv` with `split_seed`, holds out
/// floor(validation_fraction * n) rows for validation, fits the encoder on the
/// remainder and encodes all three splits.
AdultSplits load_adult(const std::filesystem::path& train_csv,
                       const std::filesystem::path& test_csv, const AdultOptions& options);

/// Encodes one CSV with an already fitted encoder.
Dataset load_adult_csv(const std::filesystem::path& path, const AdultEncoder& encoder,
                       Split split);

}  // namespace invrep

#endif  // INVREP_DATA_ADULT_HPP
