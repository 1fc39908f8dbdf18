#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzex/dataset.h"

namespace fuzzex {

// Chart series for exploratory questions. Values are reported on the original
// scale: normalized features are mapped back through their stored range.

struct Histogram {
  std::string feature;
  std::vector<double> edges;         // bins + 1 ascending edges
  std::vector<std::size_t> counts;   // bins
};

// Equal-width bins over the observed range. Missing cells are skipped.
Histogram histogram(const Dataset& ds, std::string_view feature, std::size_t bins = 10);

struct Correlation {
  std::string feature_a;
  std::string feature_b;
  double r = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> y;
};

// Pearson correlation over rows where both cells are present. A constant
// column gives r = 0 and p = 1.
Correlation correlation(const Dataset& ds, std::string_view a, std::string_view b);

struct CorrelationMatrix {
  std::vector<std::string> features;          // numeric features only
  std::vector<std::vector<double>> r;
};

CorrelationMatrix correlation_matrix(const Dataset& ds);

}  // namespace fuzzex
