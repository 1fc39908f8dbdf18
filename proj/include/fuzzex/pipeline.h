#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fuzzex/dataset.h"
#include "fuzzex/granulation.h"
#include "fuzzex/prediction.h"
#include "fuzzex/rulebase.h"
#include "fuzzex/scoring_config.h"

namespace fuzzex {

// impute, then min-max normalize.
Dataset prepare(const Dataset& raw);

struct BaselineRun {
  std::size_t k = 5;
  SplitConfig split;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double test_accuracy = 0.0;
  // confusion[truth][predicted] over the test rows, in class declaration order.
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<Prediction> predictions;  // every row of the dataset
};

// Fits the kNN baseline on the training part of a stratified split, reports
// its test accuracy and predicts every row.
BaselineRun train_baseline(const Dataset& prepared, const SplitConfig& split_cfg, std::size_t k = 5);

// granulate -> build_rules -> score_rules.
KnowledgeBase build_kb(const Dataset& prepared, const std::vector<Prediction>& preds,
                       const FcmConfig& fcm, const ScoringConfig& scoring);

// Linear interpolation between order statistics; q in [0, 1].
double percentile(std::vector<double> values, double q);

struct KbSummary {
  std::size_t rules = 0;
  double avg_rule_confidence = 0.0;
  double avg_antecedent_confidence = 0.0;
  double rule_p10 = 0.0;
  double rule_p90 = 0.0;
  double antecedent_p10 = 0.0;
  double antecedent_p90 = 0.0;
  double complexity = 0.0;
};

KbSummary summarize(const KnowledgeBase& kb);

struct PipelineConfig {
  std::string data_path;
  std::optional<std::string> predictions_path;
  bool baseline = false;
  std::size_t k = 5;
  SplitConfig split;
  FcmConfig fcm;
  ScoringConfig scoring;
  std::string out_dir;  // empty: nothing is written
};

struct PipelineResult {
  Dataset prepared;
  std::vector<Prediction> predictions;
  std::optional<BaselineRun> baseline;
  KnowledgeBase kb;
  KbSummary summary;
  std::vector<std::string> warnings;
};

// Throws ConfigError when neither a predictions file nor the baseline is
// requested.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// granulation.json, kb.pl, kb.json, summary.json and predictions.csv.
void write_artifacts(const PipelineResult& result, const std::string& out_dir);

std::string summary_to_json(const KbSummary& s);

}  // namespace fuzzex
