#pragma once

#include <string>
#include <string_view>

namespace fuzzex {

enum class Implicator { kFodor, kGoguen, kGodel, kLukasiewicz };

// Feature-wise distance between two symbolic terms: crisp compares labels
// only; fuzzy also penalizes matching labels held with low membership.
enum class DistanceKind { kCrisp, kFuzzy };

struct ScoringConfig {
  Implicator implicator = Implicator::kLukasiewicz;
  DistanceKind distance = DistanceKind::kFuzzy;
  double lambda = 1.0;  // smoothing parameter of the similarity relation

  void validate() const;
  friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

std::string to_string(Implicator i);
std::string to_string(DistanceKind d);
// Accepts the names printed by to_string, case-insensitively, plus the
// accented spellings "gödel" and "łukasiewicz".
Implicator implicator_from_string(std::string_view name);
DistanceKind distance_from_string(std::string_view name);

}  // namespace fuzzex
