#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fuzzex {

enum class FeatureKind { kNumeric, kNominal };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  // Declared nominal values, in declaration order. Empty for numeric features.
  std::vector<std::string> domain;

  bool is_numeric() const { return kind == FeatureKind::kNumeric; }
  // Case-insensitive lookup of a nominal value; nullopt when absent.
  std::optional<std::size_t> find_value(std::string_view value) const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Original (min, max) of a numeric feature before min-max scaling.
struct Range {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const Range&, const Range&) = default;
};

// Tabular data. `features` excludes the class attribute; `rows[r][f]` holds a
// numeric value or, for nominal features, the index into the declared domain.
struct Dataset {
  std::string relation_name;
  std::vector<FeatureSpec> features;
  FeatureSpec class_feature;
  // Position of the class attribute among all declared attributes, so that
  // serialization reproduces the original attribute order.
  std::size_t class_position = 0;

  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> missing;
  std::vector<std::size_t> labels;  // class index per row

  // Per feature; only meaningful for numeric features after normalize().
  std::vector<std::optional<Range>> normalization_ranges;
  std::vector<std::string> warnings;

  std::size_t size() const { return rows.size(); }
  std::size_t feature_count() const { return features.size(); }
  const std::string& label_name(std::size_t row) const {
    return class_feature.domain[labels[row]];
  }
  // Case-insensitive feature lookup.
  std::optional<std::size_t> find_feature(std::string_view name) const;
  bool has_missing() const;

  // Data equality; warnings are diagnostics and do not participate.
  bool same_data(const Dataset& other) const;

  // Rows selected by index, preserving schema and normalization metadata.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct ArffOptions {
  // Name of the class attribute. Empty selects the last nominal attribute.
  std::string class_attribute;
};

Dataset parse_arff(std::istream& in, const ArffOptions& options = {});
Dataset parse_arff_text(const std::string& text, const ArffOptions& options = {});
Dataset load_arff(const std::string& path, const ArffOptions& options = {});

// Writes a dataset back as ARFF. Numeric values use shortest round-trip
// formatting so that parse(serialize(ds)) reproduces ds exactly.
void write_arff(const Dataset& ds, std::ostream& out);
std::string to_arff(const Dataset& ds);

// Mean imputation for numeric features, mode for nominal ones (ties go to the
// value declared first).
Dataset impute(const Dataset& ds);

// Min-max scaling of numeric features to [0, 1]. Constant features map to 0.
Dataset normalize(const Dataset& ds);

// Inverse of the min-max scaling for one numeric cell.
double denormalize(const Dataset& ds, std::size_t feature, double value);

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Stratified split. The train set has round(train_fraction * k) rows.
Split split(const Dataset& ds, const SplitConfig& cfg);

}  // namespace fuzzex
