#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fuzzex/dataset.h"

namespace fuzzex {

struct FcmConfig {
  std::size_t c = 5;      // clusters / linguistic terms
  double m = 2.0;         // fuzzification coefficient, strictly > 1
  std::size_t max_iters = 300;
  double tol = 1e-6;      // on the maximum prototype displacement

  void validate() const;
};

// Fuzzy partition of one numeric feature on the normalized scale. Prototypes
// are strictly ascending and terms[i] labels prototypes[i].
struct FeatureGranulation {
  std::string feature;
  std::vector<double> prototypes;
  std::vector<std::string> terms;
  double m = 2.0;
  std::size_t iterations = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return prototypes.size(); }
  std::optional<std::size_t> find_term(std::string_view term) const;
};

struct SymbolAssignment {
  std::string term;
  double confidence = 1.0;

  friend bool operator==(const SymbolAssignment&, const SymbolAssignment&) = default;
};

// Canonical ordered labels for 2 <= c <= 11.
std::vector<std::string> default_terms(std::size_t c);

// Fuzzy c-means memberships of `x` to the clusters centered at `prototypes`.
// A value that coincides with a prototype belongs to it with degree 1.
std::vector<double> fcm_memberships(const std::vector<double>& prototypes, double x, double m);

// Runs fuzzy c-means on a single feature. Embedding each x as (x, x) scales
// every distance by sqrt(2), which cancels in the membership ratios, so the
// clustering is carried out directly in one dimension.
FeatureGranulation fit_fcm(const std::vector<double>& values, const FcmConfig& cfg,
                           std::string feature = {});

// Term with the largest membership (ties go to the lower term). Values outside
// [0, 1] are clamped and `warning`, when given, receives a note.
SymbolAssignment assign_symbol(const FeatureGranulation& g, double x,
                               std::string* warning = nullptr);

// Granulates every numeric feature of a normalized dataset. Nominal features
// get std::nullopt. Features are fitted concurrently.
std::vector<std::optional<FeatureGranulation>> granulate(const Dataset& ds, const FcmConfig& cfg);

// Granulation metadata as JSON text: {"features": [{feature, prototypes, terms, m}]}.
std::string granulations_to_json(const std::vector<std::optional<FeatureGranulation>>& grans,
                                 const std::vector<std::string>& feature_names);
std::vector<std::optional<FeatureGranulation>> granulations_from_json(
    const std::string& json_text, const std::vector<std::string>& feature_names);

}  // namespace fuzzex
