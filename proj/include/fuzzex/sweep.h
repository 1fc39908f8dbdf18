#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuzzex/scoring_config.h"

namespace fuzzex {

struct SweepSpec {
  std::vector<std::size_t> symbol_counts{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> lambdas{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<Implicator> implicators{Implicator::kFodor, Implicator::kGoguen, Implicator::kGodel,
                                      Implicator::kLukasiewicz};
  std::vector<DistanceKind> distances{DistanceKind::kCrisp, DistanceKind::kFuzzy};
  std::vector<std::string> datasets;     // ARFF paths
  std::vector<std::string> predictions;  // aligned with datasets; "" = baseline
  std::size_t k = 5;                     // baseline neighbours
  std::string svg_dir;                   // empty: no charts

  // Throws ConfigError for empty grids or misaligned prediction files.
  void validate() const;
};

// Keys: symbol_counts, lambdas, implicators, distances, datasets, predictions,
// k, svg_dir. Missing keys keep their defaults; relative paths resolve against
// `base_dir`.
SweepSpec sweep_spec_from_json(const std::string& json_text, const std::string& base_dir = {});
SweepSpec load_sweep_spec(const std::string& path);

struct SweepRow {
  std::string dataset;
  std::size_t c = 0;
  double lambda = 0.0;
  Implicator implicator = Implicator::kLukasiewicz;
  DistanceKind distance = DistanceKind::kFuzzy;
  double avg_rule_conf = 0.0;
  double avg_antecedent_conf = 0.0;
  double p10 = 0.0;  // of rule confidence
  double p90 = 0.0;
  std::string error;
};

// Rows in grid order: dataset, c, lambda, implicator, distance. A failing cell
// keeps its row with the message in `error` and the sweep carries on.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

// One line chart per dataset: average rule confidence against c, one series
// per (implicator, distance) at the first lambda of the grid.
std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& dataset);

}  // namespace fuzzex
