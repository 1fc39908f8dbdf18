#include "fuzzex/dataset.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "fuzzex/errors.h"
#include "fuzzex/text_util.h"

namespace fuzzex {

std::optional<std::size_t> FeatureSpec::find_value(std::string_view value) const {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] == value) return i;
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (text::iequals(domain[i], value)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Dataset::find_feature(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (text::iequals(features[i].name, name)) return i;
  }
  return std::nullopt;
}

bool Dataset::has_missing() const {
  for (const auto& row : missing) {
    if (std::find(row.begin(), row.end(), true) != row.end()) return true;
  }
  return false;
}

bool Dataset::same_data(const Dataset& o) const {
  return relation_name == o.relation_name && features == o.features &&
         class_feature == o.class_feature && class_position == o.class_position &&
         rows == o.rows && missing == o.missing && labels == o.labels &&
         normalization_ranges == o.normalization_ranges;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.relation_name = relation_name;
  out.features = features;
  out.class_feature = class_feature;
  out.class_position = class_position;
  out.normalization_ranges = normalization_ranges;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) {
    out.rows.push_back(rows.at(i));
    out.missing.push_back(missing.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

namespace {

// Splits on commas outside quotes; quotes are stripped from each item.
std::vector<std::string> split_values(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  bool quoted_item = false;
  for (char c : line) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur.push_back(c);
      }
    } else if (c == '\'' || c == '"') {
      // Whitespace around a quoted value is not part of it.
      cur = text::trim(cur);
      quote = c;
      quoted_item = true;
    } else if (quoted_item && std::isspace(static_cast<unsigned char>(c))) {
      continue;
    } else if (c == ',') {
      out.push_back(quoted_item ? cur : text::trim(cur));
      cur.clear();
      quoted_item = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quote) throw ParseError("unterminated quote on line " + std::to_string(line_no), line_no);
  out.push_back(quoted_item ? cur : text::trim(cur));
  return out;
}

// Reads a possibly quoted identifier from the front of `rest`.
std::string take_name(std::string& rest, std::size_t line_no) {
  rest = text::trim(rest);
  if (rest.empty()) throw ParseError("missing name on line " + std::to_string(line_no), line_no);
  std::string name;
  if (rest[0] == '\'' || rest[0] == '"') {
    const char q = rest[0];
    const auto end = rest.find(q, 1);
    if (end == std::string::npos) {
      throw ParseError("unterminated quote on line " + std::to_string(line_no), line_no);
    }
    name = rest.substr(1, end - 1);
    rest = rest.substr(end + 1);
  } else {
    auto end = rest.find_first_of(" \t{");
    if (end == std::string::npos) end = rest.size();
    name = rest.substr(0, end);
    rest = rest.substr(end);
  }
  rest = text::trim(rest);
  return name;
}

bool starts_with_keyword(const std::string& line, std::string_view kw) {
  return line.size() >= kw.size() && text::iequals(std::string_view(line).substr(0, kw.size()), kw) &&
         (line.size() == kw.size() || std::isspace(static_cast<unsigned char>(line[kw.size()])));
}

double parse_number(const std::string& token, std::size_t line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError("invalid numeric value '" + token + "' on line " + std::to_string(line_no),
                     line_no);
  }
  return value;
}

}  // namespace

Dataset parse_arff(std::istream& in, const ArffOptions& options) {
  std::vector<FeatureSpec> attributes;
  std::string relation;
  bool saw_relation = false;
  bool in_data = false;
  std::vector<std::vector<std::string>> raw_rows;
  std::vector<std::size_t> row_lines;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '%') continue;

    if (in_data) {
      raw_rows.push_back(split_values(t, line_no));
      row_lines.push_back(line_no);
      continue;
    }
    if (t[0] != '@') {
      throw ParseError("unexpected text before @data on line " + std::to_string(line_no), line_no);
    }
    if (starts_with_keyword(t, "@relation")) {
      std::string rest = t.substr(9);
      relation = take_name(rest, line_no);
      saw_relation = true;
    } else if (starts_with_keyword(t, "@attribute")) {
      if (!saw_relation) {
        throw ParseError("@attribute before @relation on line " + std::to_string(line_no), line_no);
      }
      std::string rest = t.substr(10);
      FeatureSpec spec;
      spec.name = take_name(rest, line_no);
      for (const auto& a : attributes) {
        if (text::iequals(a.name, spec.name)) {
          throw ParseError("duplicate attribute '" + spec.name + "' on line " +
                               std::to_string(line_no),
                           line_no);
        }
      }
      if (!rest.empty() && rest[0] == '{') {
        const auto close = rest.rfind('}');
        if (close == std::string::npos) {
          throw ParseError("unterminated nominal domain on line " + std::to_string(line_no), line_no);
        }
        spec.kind = FeatureKind::kNominal;
        spec.domain = split_values(rest.substr(1, close - 1), line_no);
        std::set<std::string> seen;
        for (const auto& v : spec.domain) {
          if (v.empty() || !seen.insert(v).second) {
            throw ParseError("empty or duplicate nominal value in '" + spec.name + "' on line " +
                                 std::to_string(line_no),
                             line_no);
          }
        }
      } else {
        const std::string type = text::to_lower(rest);
        if (type != "numeric" && type != "real" && type != "integer") {
          throw ParseError("unsupported attribute type '" + rest + "' on line " +
                               std::to_string(line_no),
                           line_no);
        }
        spec.kind = FeatureKind::kNumeric;
      }
      attributes.push_back(std::move(spec));
    } else if (starts_with_keyword(t, "@data")) {
      if (!saw_relation) throw ParseError("missing @relation before @data", line_no);
      if (attributes.empty()) throw ParseError("no @attribute declarations before @data", line_no);
      in_data = true;
    } else {
      throw ParseError("unknown directive on line " + std::to_string(line_no) + ": " + t, line_no);
    }
  }
  if (!in_data) throw ParseError("missing @data section", line_no);

  // Resolve the class attribute.
  std::optional<std::size_t> class_pos;
  if (!options.class_attribute.empty()) {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (text::iequals(attributes[i].name, options.class_attribute)) class_pos = i;
    }
    if (!class_pos) throw DomainError("class attribute '" + options.class_attribute + "' not declared");
    if (attributes[*class_pos].is_numeric()) {
      throw ValidationError("class attribute '" + options.class_attribute + "' is not nominal");
    }
  } else {
    for (std::size_t i = attributes.size(); i-- > 0;) {
      if (!attributes[i].is_numeric()) {
        class_pos = i;
        break;
      }
    }
    if (!class_pos) throw ValidationError("dataset declares no nominal attribute to use as class");
  }

  Dataset ds;
  ds.relation_name = relation;
  ds.class_position = *class_pos;
  ds.class_feature = attributes[*class_pos];
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (i != *class_pos) ds.features.push_back(attributes[i]);
  }
  ds.normalization_ranges.assign(ds.features.size(), std::nullopt);

  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    const auto& raw = raw_rows[r];
    const std::size_t ln = row_lines[r];
    if (raw.size() != attributes.size()) {
      throw ParseError("expected " + std::to_string(attributes.size()) + " values, found " +
                           std::to_string(raw.size()) + " on line " + std::to_string(ln),
                       ln);
    }
    std::vector<double> row;
    std::vector<bool> miss;
    row.reserve(ds.features.size());
    miss.reserve(ds.features.size());
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      const std::string& cell = raw[a];
      const FeatureSpec& spec = attributes[a];
      if (a == *class_pos) {
        if (cell == "?") {
          throw ValidationError("missing class value on line " + std::to_string(ln));
        }
        auto idx = spec.find_value(cell);
        if (!idx) {
          throw DomainError("class value '" + cell + "' outside declared domain on line " +
                            std::to_string(ln));
        }
        ds.labels.push_back(*idx);
        continue;
      }
      if (cell == "?") {
        row.push_back(0.0);
        miss.push_back(true);
        continue;
      }
      if (spec.is_numeric()) {
        row.push_back(parse_number(cell, ln));
      } else {
        auto idx = spec.find_value(cell);
        if (!idx) {
          throw DomainError("value '" + cell + "' outside declared domain of '" + spec.name +
                            "' on line " + std::to_string(ln));
        }
        row.push_back(static_cast<double>(*idx));
      }
      miss.push_back(false);
    }
    ds.rows.push_back(std::move(row));
    ds.missing.push_back(std::move(miss));
  }
  if (ds.rows.empty()) throw ValidationError("dataset has no instances");
  return ds;
}

Dataset parse_arff_text(const std::string& text, const ArffOptions& options) {
  std::istringstream in(text);
  return parse_arff(in, options);
}

Dataset load_arff(const std::string& path, const ArffOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_arff(in, options);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t,{}'\"%") == std::string::npos) return s;
  return "'" + s + "'";
}

}  // namespace

void write_arff(const Dataset& ds, std::ostream& out) {
  out << "@relation " << quote_if_needed(ds.relation_name) << "\n\n";
  const std::size_t total = ds.features.size() + 1;
  auto write_attr = [&](const FeatureSpec& spec) {
    out << "@attribute " << quote_if_needed(spec.name) << ' ';
    if (spec.is_numeric()) {
      out << "numeric\n";
    } else {
      out << '{';
      for (std::size_t i = 0; i < spec.domain.size(); ++i) {
        if (i) out << ',';
        out << quote_if_needed(spec.domain[i]);
      }
      out << "}\n";
    }
  };
  for (std::size_t a = 0, f = 0; a < total; ++a) {
    if (a == ds.class_position) {
      write_attr(ds.class_feature);
    } else {
      write_attr(ds.features[f++]);
    }
  }
  out << "\n@data\n";
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    for (std::size_t a = 0, f = 0; a < total; ++a) {
      if (a) out << ',';
      if (a == ds.class_position) {
        out << quote_if_needed(ds.label_name(r));
        continue;
      }
      if (ds.missing[r][f]) {
        out << '?';
      } else if (ds.features[f].is_numeric()) {
        out << text::exact(ds.rows[r][f]);
      } else {
        out << quote_if_needed(ds.features[f].domain[static_cast<std::size_t>(ds.rows[r][f])]);
      }
      ++f;
    }
    out << '\n';
  }
}

std::string to_arff(const Dataset& ds) {
  std::ostringstream out;
  write_arff(ds, out);
  return out.str();
}

Dataset impute(const Dataset& ds) {
  Dataset out = ds;
  for (std::size_t f = 0; f < ds.features.size(); ++f) {
    const FeatureSpec& spec = ds.features[f];
    std::size_t observed = 0;
    double sum = 0.0;
    std::vector<std::size_t> counts(spec.domain.size(), 0);
    bool any_missing = false;
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
      if (ds.missing[r][f]) {
        any_missing = true;
        continue;
      }
      ++observed;
      if (spec.is_numeric()) {
        sum += ds.rows[r][f];
      } else {
        ++counts[static_cast<std::size_t>(ds.rows[r][f])];
      }
    }
    if (!any_missing) continue;
    if (observed == 0) {
      throw ValidationError("feature '" + spec.name + "' has no observed values");
    }
    double fill = 0.0;
    if (spec.is_numeric()) {
      fill = sum / static_cast<double>(observed);
    } else {
      // max_element returns the first maximum, i.e. the earliest declared value.
      fill = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
      if (out.missing[r][f]) {
        out.rows[r][f] = fill;
        out.missing[r][f] = false;
      }
    }
  }
  return out;
}

Dataset normalize(const Dataset& ds) {
  if (ds.has_missing()) throw ValidationError("normalize requires an imputed dataset");
  Dataset out = ds;
  out.normalization_ranges.assign(ds.features.size(), std::nullopt);
  for (std::size_t f = 0; f < ds.features.size(); ++f) {
    if (!ds.features[f].is_numeric()) continue;
    double lo = ds.rows[0][f];
    double hi = lo;
    for (const auto& row : ds.rows) {
      lo = std::min(lo, row[f]);
      hi = std::max(hi, row[f]);
    }
    out.normalization_ranges[f] = Range{lo, hi};
    if (hi == lo) {
      out.warnings.push_back("feature '" + ds.features[f].name +
                             "' is constant; normalized values set to 0");
      for (auto& row : out.rows) row[f] = 0.0;
      continue;
    }
    const double span = hi - lo;
    for (auto& row : out.rows) row[f] = std::clamp((row[f] - lo) / span, 0.0, 1.0);
  }
  return out;
}

double denormalize(const Dataset& ds, std::size_t feature, double value) {
  const auto& range = ds.normalization_ranges.at(feature);
  if (!range) return value;
  return range->min + value * (range->max - range->min);
}

namespace {

// Fisher-Yates with raw engine output so that the permutation does not depend
// on the standard library's distribution implementation.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Split split(const Dataset& ds, const SplitConfig& cfg) {
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  const std::size_t k = ds.size();
  const auto target = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(k)));
  std::mt19937_64 rng(cfg.seed);

  std::vector<std::vector<std::size_t>> by_class(ds.class_feature.domain.size());
  for (std::size_t r = 0; r < k; ++r) by_class[ds.labels[r]].push_back(r);

  Split result;
  bool stratify = true;
  for (const auto& members : by_class) {
    if (!members.empty() && members.size() < 2) stratify = false;
  }

  std::vector<std::size_t> train;
  if (stratify) {
    // Largest-remainder allocation so per-class quotas sum to the target.
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const double exact_share = cfg.train_fraction * static_cast<double>(by_class[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(exact_share));
      assigned += quota[c];
      remainders.emplace_back(exact_share - std::floor(exact_share), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i) {
      const std::size_t c = remainders[i].second;
      if (quota[c] < by_class[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      auto members = by_class[c];
      shuffle(members, rng);
      train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
  } else {
    result.train.warnings.push_back("a class has fewer than 2 instances; split is not stratified");
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), 0);
    shuffle(all, rng);
    train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(target));
  }

  std::sort(train.begin(), train.end());
  std::vector<bool> in_train(k, false);
  for (std::size_t r : train) in_train[r] = true;
  std::vector<std::size_t> test;
  for (std::size_t r = 0; r < k; ++r) {
    if (!in_train[r]) test.push_back(r);
  }

  auto warnings = std::move(result.train.warnings);
  result.train = ds.subset(train);
  result.test = ds.subset(test);
  result.train.warnings = std::move(warnings);
  result.train_indices = std::move(train);
  result.test_indices = std::move(test);
  return result;
}

}  // namespace fuzzex
