#include "invrep/data/adult.hpp"

#include "invrep/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace invrep {

namespace {

constexpr std::array<std::size_t, 6> kContinuous = {0, 2, 4, 10, 11, 12};
constexpr std::array<std::size_t, 8> kCategorical = {1, 3, 5, 6, 7, 8, 9, 13};
constexpr std::size_t kSex = 9;
constexpr std::size_t kIncome = 14;
constexpr const char* kUnknown = "unknown";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& s, std::size_t line, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("adult: line " + std::to_string(line) + ": column " + column +
                         " is not numeric ('" + s + "')",
                     line);
  }
  return v;
}

bool has_missing(const AdultRow& r) {
  return std::any_of(r.fields.begin(), r.fields.end(),
                     [](const std::string& f) { return f == "?"; });
}

int income_label(const AdultRow& r) {
  std::string v = r.fields[kIncome];
  if (!v.empty() && v.back() == '.') v.pop_back();
  if (v == ">50K") return 1;
  if (v == "<=50K") return 0;
  throw ParseError("adult: line " + std::to_string(r.line) + ": unknown income '" +
                       r.fields[kIncome] + "'",
                   r.line);
}

int sex_group(const AdultRow& r) {
  if (r.fields[kSex] == "Male") return 1;
  if (r.fields[kSex] == "Female") return 0;
  throw ParseError("adult: line " + std::to_string(r.line) + ": unknown sex '" +
                       r.fields[kSex] + "'",
                   r.line);
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<AdultRow> parse_adult_csv(const std::string& text) {
  std::vector<AdultRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '|') continue;
    AdultRow row;
    row.line = line_no;
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      if (field >= row.fields.size()) {
        throw ParseError("adult: line " + std::to_string(line_no) + ": more than 15 fields",
                         line_no);
      }
      row.fields[field++] = trim(std::string_view(t).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != row.fields.size()) {
      throw ParseError("adult: line " + std::to_string(line_no) + ": expected 15 fields, got " +
                           std::to_string(field),
                       line_no);
    }
    for (std::size_t c : kContinuous) {
      if (row.fields[c] != "?") parse_number(row.fields[c], line_no, kAdultColumns[c]);
    }
    income_label(row);
    sex_group(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AdultRow> read_adult_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_adult_csv(ss.str());
}

AdultEncoder AdultEncoder::fit(std::span<const AdultRow> train, const AdultOptions& options) {
  AdultEncoder enc;
  enc.options_ = options;
  std::vector<const AdultRow*> rows;
  for (const auto& r : train) {
    if (options.drop_missing && has_missing(r)) continue;
    rows.push_back(&r);
  }
  if (rows.empty()) throw InputError("adult: no training rows to fit the encoder");

  for (std::size_t c : kContinuous) {
    double sum = 0.0;
    std::size_t n = 0;
    std::vector<double> values;
    values.reserve(rows.size());
    for (const AdultRow* r : rows) {
      if (r->fields[c] == "?") continue;
      values.push_back(parse_number(r->fields[c], r->line, kAdultColumns[c]));
      sum += values.back();
      ++n;
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = n > 0 ? std::sqrt(ss / static_cast<double>(n)) : 1.0;
    if (!(sd > 0.0)) sd = 1.0;
    enc.stats_[kAdultColumns[c]] = {mean, sd};
  }
  for (std::size_t c : kCategorical) {
    std::set<std::string> cats;
    for (const AdultRow* r : rows) cats.insert(r->fields[c]);
    enc.categories_[kAdultColumns[c]] = {cats.begin(), cats.end()};
  }
  enc.build_schema();
  return enc;
}

void AdultEncoder::build_schema() {
  schema_.clear();
  for (std::size_t c = 0; c < kIncome; ++c) {
    const std::string name = kAdultColumns[c];
    if (std::find(kContinuous.begin(), kContinuous.end(), c) != kContinuous.end()) {
      schema_.push_back({name, ColumnDescriptor::Kind::continuous, {}});
      continue;
    }
    if (c == kSex && options_.exclude_z) continue;
    for (const auto& cat : categories_.at(name)) {
      schema_.push_back({name, ColumnDescriptor::Kind::one_hot, cat});
    }
    schema_.push_back({name, ColumnDescriptor::Kind::one_hot, kUnknown});
  }
}

Dataset AdultEncoder::encode(std::span<const AdultRow> rows, Split split) const {
  std::vector<const AdultRow*> kept;
  for (const auto& r : rows) {
    if (options_.drop_missing && has_missing(r)) continue;
    kept.push_back(&r);
  }
  Dataset ds;
  ds.split = split;
  ds.schema = schema_;
  ds.has_groups = true;
  ds.features = Tensor2::Zero(static_cast<Eigen::Index>(kept.size()),
                              static_cast<Eigen::Index>(schema_.size()));
  ds.targets.reserve(kept.size());
  ds.groups.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const AdultRow& r = *kept[i];
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < kIncome; ++c) {
      const std::string name = kAdultColumns[c];
      if (auto it = stats_.find(name); it != stats_.end()) {
        // Missing continuous values sit at the train mean.
        if (r.fields[c] != "?") {
          const double v = parse_number(r.fields[c], r.line, kAdultColumns[c]);
          ds.features(row, col) = (v - it->second.first) / it->second.second;
        }
        ++col;
        continue;
      }
      if (c == kSex && options_.exclude_z) continue;
      const auto& cats = categories_.at(name);
      const auto pos = std::lower_bound(cats.begin(), cats.end(), r.fields[c]);
      const bool known = pos != cats.end() && *pos == r.fields[c];
      const auto offset = known ? pos - cats.begin() : static_cast<std::ptrdiff_t>(cats.size());
      ds.features(row, col + offset) = 1.0;
      col += static_cast<Eigen::Index>(cats.size()) + 1;
    }
    ds.targets.push_back(income_label(r));
    ds.groups.push_back(sex_group(r));
  }
  return ds;
}

std::string AdultEncoder::to_text() const {
  std::ostringstream out;
  out << "format=invrep-adult-schema\n";
  out << "version=1\n";
  out << "exclude_z=" << (options_.exclude_z ? 1 : 0) << '\n';
  out << "drop_missing=" << (options_.drop_missing ? 1 : 0) << '\n';
  out << "validation_fraction=" << format_double(options_.validation_fraction) << '\n';
  out << "split_seed=" << options_.split_seed << '\n';
  for (const auto& [name, st] : stats_) {
    out << "stat." << name << '=' << format_double(st.first) << ','
        << format_double(st.second) << '\n';
  }
  for (const auto& [name, cats] : categories_) {
    out << "categories." << name << '=';
    for (std::size_t i = 0; i < cats.size(); ++i) out << (i ? "|" : "") << cats[i];
    out << '\n';
  }
  return out.str();
}

AdultEncoder AdultEncoder::from_text(const std::string& text) {
  AdultEncoder enc;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool format_ok = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("adult schema: line " + std::to_string(line_no) + " has no '='",
                       line_no);
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "format") {
        format_ok = value == "invrep-adult-schema";
      } else if (key == "version") {
        if (value != "1") throw ParseError("adult schema: unsupported version", line_no);
      } else if (key == "exclude_z") {
        enc.options_.exclude_z = value == "1";
      } else if (key == "drop_missing") {
        enc.options_.drop_missing = value == "1";
      } else if (key == "validation_fraction") {
        enc.options_.validation_fraction = std::stod(value);
      } else if (key == "split_seed") {
        enc.options_.split_seed = std::stoull(value);
      } else if (key.rfind("stat.", 0) == 0) {
        const auto comma = value.find(',');
        if (comma == std::string::npos) throw ParseError("adult schema: bad stat", line_no);
        enc.stats_[key.substr(5)] = {std::stod(value.substr(0, comma)),
                                     std::stod(value.substr(comma + 1))};
      } else if (key.rfind("categories.", 0) == 0) {
        std::vector<std::string> cats;
        std::size_t start = 0;
        while (start <= value.size()) {
          const auto bar = value.find('|', start);
          cats.push_back(value.substr(start, bar == std::string::npos ? std::string::npos
                                                                       : bar - start));
          if (bar == std::string::npos) break;
          start = bar + 1;
        }
        enc.categories_[key.substr(11)] = std::move(cats);
      } else {
        throw ParseError("adult schema: unknown key '" + key + "'", line_no);
      }
    } catch (const std::logic_error&) {
      throw ParseError("adult schema: line " + std::to_string(line_no) + ": bad value", line_no);
    }
  }
  if (!format_ok) throw ParseError("adult schema: missing format tag", 1);
  for (std::size_t c : kContinuous) {
    if (!enc.stats_.count(kAdultColumns[c])) {
      throw ParseError(std::string("adult schema: missing stat for ") + kAdultColumns[c], 0);
    }
  }
  for (std::size_t c : kCategorical) {
    if (!enc.categories_.count(kAdultColumns[c])) {
      throw ParseError(std::string("adult schema: missing categories for ") + kAdultColumns[c],
                       0);
    }
  }
  enc.build_schema();
  return enc;
}

std::uint64_t AdultEncoder::checksum() const { return fnv1a(to_text()); }

AdultSplits load_adult(const std::filesystem::path& train_csv,
                       const std::filesystem::path& test_csv, const AdultOptions& options) {
  if (!(options.validation_fraction >= 0.0 && options.validation_fraction < 1.0)) {
    throw ConfigError("adult: validation_fraction must lie in [0, 1)");
  }
  std::vector<AdultRow> all = read_adult_csv(train_csv);
  if (options.drop_missing) {
    std::erase_if(all, has_missing);
  }
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.split_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::floor(options.validation_fraction * static_cast<double>(all.size())));
  std::vector<AdultRow> val_rows;
  std::vector<AdultRow> train_rows;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_val ? val_rows : train_rows).push_back(all[order[k]]);
  }
  // Restore file order inside each split so row order does not depend on the seed.
  auto by_line = [](const AdultRow& a, const AdultRow& b) { return a.line < b.line; };
  std::sort(train_rows.begin(), train_rows.end(), by_line);
  std::sort(val_rows.begin(), val_rows.end(), by_line);

  AdultSplits s{{}, {}, {}, AdultEncoder::fit(train_rows, options)};
  s.train = s.encoder.encode(train_rows, Split::train);
  s.validation = s.encoder.encode(val_rows, Split::validation);
  s.test = s.encoder.encode(read_adult_csv(test_csv), Split::test);
  return s;
}

Dataset load_adult_csv(const std::filesystem::path& path, const AdultEncoder& encoder,
                       Split split) {
  return encoder.encode(read_adult_csv(path), split);
}

}  // namespace invrep
