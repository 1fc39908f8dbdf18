#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuzzex/dataset.h"

namespace fuzzex {

// Output of a black-box classifier for one instance.
struct Prediction {
  std::size_t instance_id = 0;
  std::string class_label;
  double confidence = 1.0;  // P(class | instance)

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct PredictionSet {
  std::vector<Prediction> predictions;
  std::vector<std::string> warnings;
};

// Reads `id,class,confidence` CSV (header required, ids 0-based in dataset row
// order). The confidence column may be omitted, in which case every
// prediction gets confidence 1.
PredictionSet ingest_predictions(const Dataset& ds, std::istream& in);
PredictionSet load_predictions(const Dataset& ds, const std::string& path);

void write_predictions(const std::vector<Prediction>& preds, std::ostream& out);

// k-nearest-neighbour vote over normalized features: absolute difference for
// numeric features, 0/1 mismatch for nominal ones. Neighbours at equal
// distance are taken in training-row order; tied votes go to the class
// declared first.
std::vector<Prediction> baseline_classify(const Dataset& train, const Dataset& target,
                                          std::size_t k = 5);

// Fraction of predictions whose label matches the dataset's class column.
double accuracy(const std::vector<Prediction>& preds, const Dataset& truth);

// Ground-truth labels as predictions with confidence 1.
std::vector<Prediction> labels_as_predictions(const Dataset& ds);

}  // namespace fuzzex
