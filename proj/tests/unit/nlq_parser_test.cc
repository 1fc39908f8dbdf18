#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "fuzzex/dataset.h"
#include "fuzzex/errors.h"
#include "fuzzex/nlq_parser.h"
#include "json.hpp"

using namespace fuzzex;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const NlqSchema& diabetes_schema() {
  static const NlqSchema schema = [] {
    const Dataset ds = load_arff(std::string(FUZZEX_DATA_DIR) + "/diabetes.arff");
    return NlqSchema::from_dataset(ds, 5);
  }();
  return schema;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST(NlqSchema, FromDataset) {
  const auto& s = diabetes_schema();
  EXPECT_EQ(s.features.size(), 8u);
  EXPECT_TRUE(contains(s.terms, "very_low"));
  EXPECT_TRUE(contains(s.classes, "tested_positive"));
  EXPECT_TRUE(NlqSchema{}.empty());
}

TEST(NlqCorpus, GoldenUtterances) {
  const json corpus = json::parse(slurp(std::string(FUZZEX_TEST_FIXTURES) + "/nl_corpus.json"));
  std::size_t n = 0;
  for (const auto& c : corpus.at("cases")) {
    const std::string text = c.at("text");
    const auto out = parse(text, diabetes_schema());
    ASSERT_TRUE(out.accepted()) << text;
    EXPECT_EQ(out.intent->name, c.at("intent").get<std::string>()) << text;
    std::map<std::string, std::vector<std::string>> expected;
    for (const auto& [k, v] : c.at("entities").items()) expected[k] = v.get<std::vector<std::string>>();
    EXPECT_EQ(out.intent->entities, expected) << text;
    EXPECT_EQ(to_string(out.confidence), c.at("confidence").get<std::string>()) << text;
    ++n;
  }
  EXPECT_GE(n, 14u);
}

TEST(NlqParser, WhatIfUtterance) {
  const auto out = parse("If Preg is very low, Gluc is low, and the outcome is test_negative, what is Age?",
                         diabetes_schema());
  ASSERT_TRUE(out.accepted());
  EXPECT_EQ(out.intent->name, "run_full_query");
  EXPECT_EQ(out.intent->entity("known_concept"), (std::vector<std::string>{"preg", "plas"}));
  EXPECT_EQ(out.intent->entity("value"), (std::vector<std::string>{"very_low", "low"}));
  EXPECT_EQ(out.intent->entity("outcome"), (std::vector<std::string>{"tested_negative"}));
  EXPECT_EQ(out.intent->entity("unknown_concept"), (std::vector<std::string>{"age"}));
  EXPECT_TRUE(out.intent->entity("top_n").empty());
  EXPECT_EQ(out.confidence, MatchConfidence::kFuzzyMatch);
}

TEST(NlqParser, CounterfactualPutsContrastLast) {
  const auto out = parse(
      "for the outcome to be tested_positive instead of tested_negative, what should preg be while age is low?",
      diabetes_schema());
  ASSERT_TRUE(out.accepted());
  EXPECT_EQ(out.intent->name, "run_cf_query");
  EXPECT_EQ(out.intent->entity("outcome"), (std::vector<std::string>{"tested_positive", "tested_negative"}));
  EXPECT_EQ(out.intent->entity("unknown_concept"), (std::vector<std::string>{"preg"}));
  EXPECT_EQ(out.intent->entity("known_concept"), (std::vector<std::string>{"age"}));
  EXPECT_EQ(out.intent->entity("value"), (std::vector<std::string>{"low"}));
}

TEST(NlqParser, EmptySchemaOnlyAllowsLoadAndHelp) {
  const NlqSchema empty;
  const auto load = parse("Load the diabetes dataset", empty);
  ASSERT_TRUE(load.accepted());
  EXPECT_EQ(load.intent->entity("dataset"), (std::vector<std::string>{"diabetes"}));
  EXPECT_TRUE(parse("help", empty).accepted());

  const auto hist = parse("How is BMI distributed?", empty);
  EXPECT_FALSE(hist.accepted());
  ASSERT_TRUE(hist.suggestion);
  EXPECT_EQ(hist.suggestion->intent, "load_data");
}

TEST(NlqParser, UnknownDatasetNamesPassThrough) {
  const auto out = parse("load the heart_disease dataset", diabetes_schema());
  ASSERT_TRUE(out.accepted());
  EXPECT_EQ(out.intent->entity("dataset"), (std::vector<std::string>{"heart_disease"}));
}

TEST(NlqParser, RejectionSuggestsNearestIntent) {
  const auto out = parse("sing me a song about turtles", diabetes_schema());
  EXPECT_FALSE(out.accepted());
  ASSERT_TRUE(out.suggestion);
  EXPECT_TRUE(contains(Grammar::builtin().intent_names(), out.suggestion->intent));
  EXPECT_FALSE(out.suggestion->example.empty());
  EXPECT_TRUE(contains(out.unrecognized_tokens, "turtles"));

  const auto empty = parse("", diabetes_schema());
  EXPECT_FALSE(empty.accepted());
  EXPECT_TRUE(empty.suggestion);
}

TEST(NlqParser, UnrecognizedTokensReported) {
  const auto out = parse("How is BMI distributed over quarks?", diabetes_schema());
  ASSERT_TRUE(out.accepted());
  EXPECT_TRUE(contains(out.unrecognized_tokens, "quarks"));
  EXPECT_FALSE(contains(out.unrecognized_tokens, "bmi"));
  EXPECT_FALSE(contains(out.unrecognized_tokens, "is"));
}

TEST(NlqParser, TotalDeterministicAndNeverInventsNames) {
  const auto& schema = diabetes_schema();
  std::vector<std::string> words = {"if", "what", "is", "very", "low", "high", "outcome", "instead", "of",
                                    "should", "take", "while", "for", "the", "to", "be", "top", "rules",
                                    "bias", "correlated", "and", "gluc", "bmi", "mystery", "xyzzy", "5",
                                    "depth", "trees", "closest", "load", "data", "medium", "test_negative",
                                    "class", "?", ",", "-", "'", "\"", "\xc3\xa9", "0.5", "very_high"};
  for (const auto& f : schema.features) words.push_back(f);
  for (const auto& c : schema.classes) words.push_back(c);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    const int len = static_cast<int>(rng() % 14);
    for (int w = 0; w < len; ++w) text += words[rng() % words.size()] + (rng() % 4 ? " " : "");
    const auto a = parse(text, schema);
    const auto b = parse(text, schema);
    ASSERT_EQ(a.accepted(), b.accepted()) << text;
    EXPECT_EQ(a.unrecognized_tokens, b.unrecognized_tokens);
    if (!a.accepted()) {
      EXPECT_TRUE(a.suggestion) << text;
      continue;
    }
    EXPECT_EQ(*a.intent, *b.intent) << text;
    for (const auto& [name, values] : a.intent->entities) {
      for (const auto& v : values) {
        if (name == "variable" || name == "known_concept" || name == "unknown_concept") {
          EXPECT_TRUE(contains(schema.features, v)) << text << " -> " << v;
        } else if (name == "value") {
          EXPECT_TRUE(contains(schema.terms, v)) << text << " -> " << v;
        } else if (name == "outcome") {
          EXPECT_TRUE(contains(schema.classes, v)) << text << " -> " << v;
        } else if (name == "top_n" || name == "n_estimators" || name == "max_depth") {
          EXPECT_FALSE(v.empty());
          EXPECT_TRUE(std::all_of(v.begin(), v.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.'; }));
        } else {
          EXPECT_EQ(name, "dataset");
        }
      }
    }
  }
}

TEST(Grammar, DataFileMatchesBuiltin) {
  const Grammar file = Grammar::load(std::string(FUZZEX_DATA_DIR) + "/nlq_grammar.json");
  EXPECT_EQ(file.intent_names(), Grammar::builtin().intent_names());
  EXPECT_EQ(file.version(), 1);
  EXPECT_EQ(file.intent_names().size(), 15u);
  const auto text = "What is the explicit bias associated with Age?";
  EXPECT_EQ(*file.parse(text, diabetes_schema()).intent, *parse(text, diabetes_schema()).intent);
}

TEST(Grammar, TableDrivesBehaviour) {
  // A new synonym in the table is picked up without code changes.
  auto doc = json::parse(builtin_grammar_json());
  doc["feature_aliases"]["age"] = {"years"};
  const Grammar g = Grammar::from_json(doc.dump());
  const auto out = g.parse("How is years distributed?", diabetes_schema());
  ASSERT_TRUE(out.accepted());
  EXPECT_EQ(out.intent->entity("variable"), (std::vector<std::string>{"age"}));
  EXPECT_FALSE(parse("How is years distributed?", diabetes_schema()).intent->entities.count("variable"));
}

TEST(Grammar, LoadErrors) {
  EXPECT_THROW(Grammar::load("/nonexistent/grammar.json"), IoError);
  EXPECT_THROW(Grammar::from_json("{"), ParseError);
  EXPECT_THROW(Grammar::from_json(R"({"version": 1, "intents": []})"), ConfigError);
}
