#include "fuzzex/prediction.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "fuzzex/errors.h"
#include "fuzzex/text_util.h"

namespace fuzzex {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(text::trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(text::trim(cur));
  return out;
}

}  // namespace

PredictionSet ingest_predictions(const Dataset& ds, std::istream& in) {
  PredictionSet out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> id_col, class_col, conf_col;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto cells = split_csv(line);
    for (auto& c : cells) c = text::to_lower(c);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i] == "id") id_col = i;
      if (cells[i] == "class") class_col = i;
      if (cells[i] == "confidence") conf_col = i;
    }
    break;
  }
  if (!id_col || !class_col) {
    throw ParseError("prediction CSV needs an 'id,class,confidence' header", line_no);
  }

  std::vector<bool> seen(ds.size(), false);
  std::vector<Prediction> by_id(ds.size());
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto cells = split_csv(line);
    const std::size_t need = std::max({*id_col, *class_col, conf_col.value_or(0)}) + 1;
    if (cells.size() < need) {
      throw ParseError("too few columns on line " + std::to_string(line_no), line_no);
    }
    std::size_t id = 0;
    const auto& id_text = cells[*id_col];
    auto res = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (res.ec != std::errc() || res.ptr != id_text.data() + id_text.size()) {
      throw ParseError("invalid id '" + id_text + "' on line " + std::to_string(line_no), line_no);
    }
    if (id >= ds.size()) {
      throw ValidationError("prediction id " + id_text + " has no matching dataset row");
    }
    if (seen[id]) throw ValidationError("duplicate prediction id " + id_text);
    const auto cls = ds.class_feature.find_value(cells[*class_col]);
    if (!cls) {
      throw DomainError("unknown class label '" + cells[*class_col] + "' on line " +
                        std::to_string(line_no));
    }
    double conf = 1.0;
    if (conf_col) {
      const auto& ct = cells[*conf_col];
      auto r = std::from_chars(ct.data(), ct.data() + ct.size(), conf);
      if (r.ec != std::errc() || r.ptr != ct.data() + ct.size() || std::isnan(conf)) {
        throw ParseError("invalid confidence '" + ct + "' on line " + std::to_string(line_no),
                         line_no);
      }
      if (conf < 0.0 || conf > 1.0) {
        out.warnings.push_back("confidence for id " + id_text + " clamped to [0, 1]");
        conf = std::clamp(conf, 0.0, 1.0);
      }
    }
    seen[id] = true;
    by_id[id] = Prediction{id, ds.class_feature.domain[*cls], conf};
    ++count;
  }
  if (count != ds.size()) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!seen[i]) throw ValidationError("missing prediction for id " + std::to_string(i));
    }
  }
  out.predictions = std::move(by_id);
  return out;
}

PredictionSet load_predictions(const Dataset& ds, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ingest_predictions(ds, in);
}

void write_predictions(const std::vector<Prediction>& preds, std::ostream& out) {
  out << "id,class,confidence\n";
  for (const auto& p : preds) {
    out << p.instance_id << ',' << p.class_label << ',' << text::exact(p.confidence) << '\n';
  }
}

std::vector<Prediction> baseline_classify(const Dataset& train, const Dataset& target,
                                          std::size_t k) {
  if (train.size() == 0) throw ValidationError("baseline classifier needs training rows");
  if (k == 0) throw ConfigError("neighbour count k must be >= 1");
  if (train.features.size() != target.features.size()) {
    throw ValidationError("train and target schemas differ");
  }
  const std::size_t neighbours = std::min(k, train.size());
  const std::size_t n_classes = train.class_feature.domain.size();
  std::vector<Prediction> out;
  out.reserve(target.size());

  std::vector<std::pair<double, std::size_t>> dist(train.size());
  for (std::size_t t = 0; t < target.size(); ++t) {
    for (std::size_t r = 0; r < train.size(); ++r) {
      double d = 0.0;
      for (std::size_t f = 0; f < train.features.size(); ++f) {
        const double a = target.rows[t][f];
        const double b = train.rows[r][f];
        d += train.features[f].is_numeric() ? std::abs(a - b) : (a == b ? 0.0 : 1.0);
      }
      dist[r] = {d, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours), dist.end());
    std::vector<std::size_t> votes(n_classes, 0);
    for (std::size_t i = 0; i < neighbours; ++i) ++votes[train.labels[dist[i].second]];
    const auto winner = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    out.push_back({t, train.class_feature.domain[winner],
                   static_cast<double>(votes[winner]) / static_cast<double>(neighbours)});
  }
  return out;
}

double accuracy(const std::vector<Prediction>& preds, const Dataset& truth) {
  if (preds.size() != truth.size()) {
    throw ValidationError("prediction count does not match dataset size");
  }
  if (preds.empty()) throw ValidationError("accuracy of an empty prediction list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].instance_id != i) {
      throw ValidationError("prediction ids are not aligned with dataset rows");
    }
    if (preds[i].class_label == truth.label_name(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

std::vector<Prediction> labels_as_predictions(const Dataset& ds) {
  std::vector<Prediction> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back({i, ds.label_name(i), 1.0});
  return out;
}

}  // namespace fuzzex
