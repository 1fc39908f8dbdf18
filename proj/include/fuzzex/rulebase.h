#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fuzzex/dataset.h"
#include "fuzzex/granulation.h"
#include "fuzzex/prediction.h"
#include "fuzzex/scoring_config.h"

namespace fuzzex {

// One instance encoded symbolically:
//   IF f1 is s1 (mu1) AND ... AND fn is sn (mun) THEN class (P), with the
// rule's own confidence filled in by scoring.
struct FuzzyRule {
  std::size_t id = 0;
  std::vector<SymbolAssignment> antecedent;  // one entry per non-class feature
  std::string class_label;
  double class_confidence = 1.0;
  double rule_confidence = 1.0;

  // Smallest membership over the antecedent (1 for an empty antecedent).
  double weakest_antecedent() const;

  friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

struct KnowledgeBase {
  std::vector<std::string> feature_names;
  // Admissible terms per feature: linguistic terms for numeric features, the
  // declared domain for nominal ones.
  std::vector<std::vector<std::string>> vocabularies;
  std::vector<std::optional<FeatureGranulation>> granulations;
  std::vector<std::string> class_domain;
  FcmConfig fcm;
  ScoringConfig scoring;
  bool scored = false;
  std::vector<FuzzyRule> rules;

  std::size_t size() const { return rules.size(); }
  // Case-insensitive lookups; nullopt when absent.
  std::optional<std::size_t> find_feature(std::string_view name) const;
  std::optional<std::size_t> find_class(std::string_view name) const;
  std::optional<std::string> find_term(std::size_t feature, std::string_view term) const;
  // Rules whose class is `class_label` (the crisp partition of the rule set).
  std::vector<std::size_t> partition(std::string_view class_label) const;
  const FuzzyRule& rule(std::size_t id) const;
};

// One rule per dataset row. Numeric cells are mapped to their best term; nominal
// cells keep their value with confidence 1. Rule confidences start at 1.
KnowledgeBase build_rules(const Dataset& ds,
                          const std::vector<std::optional<FeatureGranulation>>& grans,
                          const std::vector<Prediction>& preds, const FcmConfig& fcm = {});

// Prolog clause text for a single rule, e.g.
//   input(0, [[very_low,1.000000], 1.000000]) :- output([tested_negative,1.000000]).
std::string prolog_clause(const FuzzyRule& rule);

// Writes a `%` header block with the granulation and scoring setup, then one
// clause per rule in id order.
void export_prolog(const KnowledgeBase& kb, std::ostream& out);
std::string to_prolog(const KnowledgeBase& kb);

// Reads clauses written by export_prolog. Returns rules (and feature/class
// names when the header lists them). ParseError::location() is the 0-based
// clause index.
KnowledgeBase parse_prolog_kb(std::istream& in);
KnowledgeBase parse_prolog_kb_text(const std::string& text);

std::string kb_to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const std::string& json_text);

}  // namespace fuzzex
