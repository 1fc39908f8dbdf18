#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzex/rulebase.h"
#include "fuzzex/scoring_config.h"

namespace fuzzex {

// Membership of a rule in the lower approximation of its class region.
struct RegionMembership {
  std::size_t rule_id = 0;
  std::string class_label;
  double lower_membership = 0.0;
};

// I(a, b) for a, b in [0, 1]:
//   Fodor        1 if a <= b, else max(1 - a, b)
//   Goguen       1 if a <= b, else b / a
//   Goedel       1 if a <= b, else b
//   Lukasiewicz  min(1, 1 - a + b)
// Throws DomainError for arguments outside [0, 1].
double implicator(Implicator kind, double a, double b);

// Membership of `rule` in the fuzzy set of class `class_j`: its class
// confidence when the rule predicts class_j, 0 otherwise.
double theta_membership(const FuzzyRule& rule, std::string_view class_j,
                        const std::vector<std::string>& class_domain);

double feature_distance(const SymbolAssignment& x, const SymbolAssignment& y, DistanceKind kind);

// Sum of feature distances over the antecedent. When `included` is non-empty,
// positions with included[i] == false are skipped.
double rule_distance(const FuzzyRule& x, const FuzzyRule& y, DistanceKind kind,
                     const std::vector<bool>& included = {});

// mu_R(y, x) = theta(x, class(x)) * exp(-lambda * d(x, y)).
double relation(const FuzzyRule& y, const FuzzyRule& x, const ScoringConfig& cfg);

// Lower-approximation membership of every rule, without modifying the KB:
//   min(theta(x), min over y of I(mu_R(y, x), theta_class(x)(y))).
// `included` masks features out of the distance (empty = all features).
std::vector<double> lower_memberships(const KnowledgeBase& kb, const ScoringConfig& cfg,
                                      const std::vector<bool>& included = {});

// Scores every rule and writes the result into rule_confidence. Also records
// `cfg` as the KB's scoring configuration.
std::vector<RegionMembership> score_rules(KnowledgeBase& kb, const ScoringConfig& cfg);

// 1 - mean rule confidence.
double complexity(const KnowledgeBase& kb);

struct TopRules {
  std::vector<FuzzyRule> rules;
  std::vector<std::string> warnings;
};

// The n most confident rules; ties by ascending id.
TopRules top_rules(const KnowledgeBase& kb, std::size_t n);

// Relative change of the lower-approximation memberships when `feature` is
// dropped from the rule distance:
//   sum |mu_with - mu_without| / max(sum mu_with, 1e-12), clipped to [0, 1].
double bias_proxy(const KnowledgeBase& kb, std::string_view feature, const ScoringConfig& cfg);

}  // namespace fuzzex
