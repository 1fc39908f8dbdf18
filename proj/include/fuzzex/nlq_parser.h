#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fuzzex {

struct Dataset;
struct KnowledgeBase;

// Vocabularies the parser may extract. Empty before a dataset is loaded.
struct NlqSchema {
  std::vector<std::string> features;
  std::vector<std::string> terms;    // linguistic terms and nominal values
  std::vector<std::string> classes;

  bool empty() const { return features.empty(); }

  // Numeric features contribute the default terms for `symbols` clusters.
  static NlqSchema from_dataset(const Dataset& ds, std::size_t symbols);
  static NlqSchema from_kb(const KnowledgeBase& kb);
};

struct Intent {
  std::string name;
  // Entity name -> values, in order of appearance. Names are limited to
  // dataset, variable, value, known_concept, unknown_concept, outcome,
  // n_estimators, max_depth and top_n.
  std::map<std::string, std::vector<std::string>> entities;

  const std::vector<std::string>& entity(const std::string& name) const;
  bool operator==(const Intent&) const = default;
};

enum class MatchConfidence { kExact, kFuzzyMatch };
std::string to_string(MatchConfidence c);

struct Suggestion {
  std::string intent;
  std::string example;
};

struct ParseOutcome {
  std::optional<Intent> intent;            // nullopt = rejected
  std::optional<Suggestion> suggestion;    // set when rejected
  MatchConfidence confidence = MatchConfidence::kExact;
  std::vector<std::string> unrecognized_tokens;

  bool accepted() const { return intent.has_value(); }
};

// Rule table loaded from the grammar JSON file. Immutable after construction,
// so one instance can be shared between threads.
class Grammar {
 public:
  static Grammar load(const std::string& path);
  static Grammar from_json(const std::string& json_text);
  static const Grammar& builtin();

  int version() const { return version_; }
  std::vector<std::string> intent_names() const;

  ParseOutcome parse(std::string_view text, const NlqSchema& schema) const;

 private:
  struct Phrase {
    std::vector<std::string> words;  // "$outcome" matches any outcome synonym
  };
  struct Group {
    std::vector<Phrase> alternatives;
  };
  struct IntentRule {
    std::string name;
    std::string example;
    std::vector<std::vector<Group>> patterns;
    bool needs_schema = false;
  };
  struct NumberCue {
    std::string entity;
    std::vector<std::string> preceded_by;
    std::vector<std::string> followed_by;
  };

  int version_ = 0;
  std::vector<IntentRule> intents_;
  std::vector<std::string> outcome_words_;
  std::vector<std::string> copulas_;
  std::vector<std::string> stopwords_;
  std::map<std::string, std::vector<std::vector<std::string>>> feature_aliases_;
  std::map<std::string, std::vector<std::vector<std::string>>> value_aliases_;
  std::vector<NumberCue> numbers_;

  friend class NlqMatcher;
};

// Convenience wrapper over Grammar::builtin().parse().
ParseOutcome parse(std::string_view text, const NlqSchema& schema);

// Contents of data/nlq_grammar.json compiled into the library.
const char* builtin_grammar_json();

}  // namespace fuzzex
