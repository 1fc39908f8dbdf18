#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fuzzex/nlq_parser.h"
#include "fuzzex/query_engine.h"
#include "fuzzex/rulebase.h"

namespace fuzzex {

// Engine results the chat replies are built from. Confidences are printed
// with 3 decimals.

struct LoadAnswer {
  std::string dataset;
  std::size_t instances = 0;
  std::size_t features = 0;
};

struct StatsAnswer {
  std::vector<std::string> features;
  std::size_t instances = 0;
};

struct HistogramAnswer {
  std::string feature;
};

struct CorrelationAnswer {
  std::string feature_a;
  std::string feature_b;
  double r = 0.0;
  double p_value = 1.0;
};

struct CorrelationMatrixAnswer {
  std::size_t features = 0;
};

struct TrainAnswer {
  std::size_t k = 5;
  double test_accuracy = 0.0;
  // Parameters of the random forest named in the question; the baseline only
  // has k, so these are echoed back as such.
  std::optional<std::string> n_estimators;
  std::optional<std::string> max_depth;
};

struct SplitAnswer {
  double train_fraction = 0.8;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

struct BuildAnswer {
  std::vector<std::string> features;
  std::vector<std::string> classes;
  std::size_t rules = 0;
  std::size_t symbols = 0;
};

struct QueryAnswer {
  QueryKind kind = QueryKind::kWhatIf;
  QueryResult result;
};

struct ClosestAnswer {
  FuzzyRule rule;
  std::vector<std::string> feature_names;
};

struct ComplexityAnswer {
  double value = 0.0;
};

struct BiasAnswer {
  std::string feature;
  double value = 0.0;
};

struct TopRulesAnswer {
  std::vector<FuzzyRule> rules;
  std::vector<std::string> feature_names;
};

struct HelpAnswer {};

using AnswerPayload =
    std::variant<LoadAnswer, StatsAnswer, HistogramAnswer, CorrelationAnswer, CorrelationMatrixAnswer,
                 TrainAnswer, SplitAnswer, BuildAnswer, QueryAnswer, ClosestAnswer, ComplexityAnswer,
                 BiasAnswer, TopRulesAnswer, HelpAnswer>;

std::string render_answer(const Intent& intent, const AnswerPayload& payload);

// Reply for a rejected parse, pointing at the suggested phrasing.
std::string render_rejection(const ParseOutcome& outcome);

// "Age", "very low": display forms of schema names.
std::string display_feature(const std::string& name);
std::string display_term(const std::string& term);

// "If Preg is very low, ..., then Class is tested_negative."
std::string rule_sentence(const FuzzyRule& rule, const std::vector<std::string>& feature_names);

}  // namespace fuzzex
