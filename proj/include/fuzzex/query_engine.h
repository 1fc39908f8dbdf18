#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fuzzex/rulebase.h"

namespace fuzzex {

enum class QueryKind { kWhatIf, kCounterfactual };

struct QueryConstraints {
  double min_term_confidence = 0.0;  // applied to every unknown-feature binding
  double min_rule_confidence = 0.0;
  std::map<std::string, std::set<std::string>> excluded_terms;  // feature -> terms
};

// "Which terms should the unknown features take for the outcome to be
// desired_class, given the known feature terms?"
struct Query {
  QueryKind kind = QueryKind::kWhatIf;
  std::string desired_class;
  std::optional<std::string> contrast_class;  // counterfactual phrasing only
  std::vector<std::pair<std::string, std::string>> known;  // feature -> term
  std::vector<std::string> unknowns;
  QueryConstraints constraints;
  std::size_t max_solutions = 3;
};

struct Binding {
  std::string feature;
  SymbolAssignment value;
};

struct Solution {
  std::size_t rule_id = 0;
  std::vector<Binding> bindings;  // in the order the unknowns were requested
  double rule_confidence = 0.0;
};

// When nothing matches: the rule of the desired class that agrees with the
// most known bindings.
struct NearestCandidate {
  std::size_t rule_id = 0;
  std::size_t mismatched_bindings = 0;
};

struct QueryResult {
  std::vector<Solution> solutions;
  std::size_t total_matches = 0;  // before truncation to max_solutions
  bool relaxed_known = false;     // no known bindings were given
  std::optional<NearestCandidate> nearest;
};

// Resolves a query against the knowledge base. Names are matched
// case-insensitively. Solutions rank by rule confidence, then weakest
// antecedent confidence (both descending), then rule id.
QueryResult resolve(const KnowledgeBase& kb, const Query& q);

// Query with feature, term and class names replaced by their canonical KB
// spelling. Throws DomainError / ValidationError like resolve().
Query canonicalize(const KnowledgeBase& kb, const Query& q);

// Closest other rule under the KB's configured distance; ties to lowest id.
const FuzzyRule& closest_rule(const KnowledgeBase& kb, const FuzzyRule& reference);

struct QueryContext {
  Query query;
  QueryResult result;
  std::optional<std::size_t> source_rule;  // top solution's rule id, if any
};

// Remembers the most recent resolution so that follow-ups such as
// "what rule is closest to this one?" have a referent.
class QuerySession {
 public:
  void record(const Query& q, const QueryResult& r);
  std::optional<QueryContext> last_query_context() const;
  void clear();

 private:
  std::optional<QueryContext> last_;
};

}  // namespace fuzzex
