#include "fuzzex/query_engine.h"

#include <algorithm>
#include <limits>

#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"

namespace fuzzex {

namespace {

std::size_t feature_index(const KnowledgeBase& kb, const std::string& name) {
  const auto f = kb.find_feature(name);
  if (!f) throw DomainError("unknown feature '" + name + "'");
  return *f;
}

std::string canonical_class(const KnowledgeBase& kb, const std::string& name) {
  const auto c = kb.find_class(name);
  if (!c) throw DomainError("unknown class '" + name + "'");
  return kb.class_domain[*c];
}

std::string canonical_term(const KnowledgeBase& kb, std::size_t f, const std::string& term) {
  const auto t = kb.find_term(f, term);
  if (!t) {
    throw DomainError("'" + term + "' is not a term of feature '" + kb.feature_names[f] + "'");
  }
  return *t;
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

Query canonicalize(const KnowledgeBase& kb, const Query& q) {
  Query out = q;
  out.desired_class = canonical_class(kb, q.desired_class);
  if (q.contrast_class) {
    out.contrast_class = canonical_class(kb, *q.contrast_class);
    if (q.kind == QueryKind::kCounterfactual && *out.contrast_class == out.desired_class) {
      throw ValidationError("the contrast class must differ from the desired class");
    }
  }
  if (q.unknowns.empty()) throw ValidationError("a query needs at least one unknown feature");

  std::vector<bool> used(kb.feature_names.size(), false);
  out.known.clear();
  for (const auto& [feature, term] : q.known) {
    const std::size_t f = feature_index(kb, feature);
    if (used[f]) throw ValidationError("feature '" + kb.feature_names[f] + "' bound twice");
    used[f] = true;
    out.known.emplace_back(kb.feature_names[f], canonical_term(kb, f, term));
  }
  out.unknowns.clear();
  for (const auto& feature : q.unknowns) {
    const std::size_t f = feature_index(kb, feature);
    if (used[f]) {
      throw ValidationError("feature '" + kb.feature_names[f] +
                            "' cannot be both known and unknown, or requested twice");
    }
    used[f] = true;
    out.unknowns.push_back(kb.feature_names[f]);
  }

  check_unit(q.constraints.min_term_confidence, "min_term_confidence");
  check_unit(q.constraints.min_rule_confidence, "min_rule_confidence");
  out.constraints.excluded_terms.clear();
  for (const auto& [feature, terms] : q.constraints.excluded_terms) {
    const std::size_t f = feature_index(kb, feature);
    auto& dst = out.constraints.excluded_terms[kb.feature_names[f]];
    for (const auto& t : terms) dst.insert(canonical_term(kb, f, t));
  }
  return out;
}

QueryResult resolve(const KnowledgeBase& kb, const Query& query) {
  const Query q = canonicalize(kb, query);

  std::vector<std::pair<std::size_t, std::string>> known;
  for (const auto& [feature, term] : q.known) known.emplace_back(*kb.find_feature(feature), term);
  std::vector<std::size_t> unknown;
  for (const auto& feature : q.unknowns) unknown.push_back(*kb.find_feature(feature));

  QueryResult result;
  result.relaxed_known = q.known.empty();

  std::vector<const FuzzyRule*> matches;
  for (const auto& rule : kb.rules) {
    if (rule.class_label != q.desired_class) continue;
    bool ok = std::all_of(known.begin(), known.end(), [&](const auto& kv) {
      return rule.antecedent[kv.first].term == kv.second;
    });
    if (!ok || rule.rule_confidence < q.constraints.min_rule_confidence) continue;
    for (std::size_t f : unknown) {
      const auto& s = rule.antecedent[f];
      if (s.confidence < q.constraints.min_term_confidence) {
        ok = false;
        break;
      }
      const auto ex = q.constraints.excluded_terms.find(kb.feature_names[f]);
      if (ex != q.constraints.excluded_terms.end() && ex->second.count(s.term)) {
        ok = false;
        break;
      }
    }
    if (ok) matches.push_back(&rule);
  }

  std::sort(matches.begin(), matches.end(), [](const FuzzyRule* a, const FuzzyRule* b) {
    if (a->rule_confidence != b->rule_confidence) return a->rule_confidence > b->rule_confidence;
    const double wa = a->weakest_antecedent();
    const double wb = b->weakest_antecedent();
    if (wa != wb) return wa > wb;
    return a->id < b->id;
  });
  result.total_matches = matches.size();
  const std::size_t keep =
      q.max_solutions == 0 ? matches.size() : std::min(matches.size(), q.max_solutions);
  for (std::size_t i = 0; i < keep; ++i) {
    const FuzzyRule& rule = *matches[i];
    Solution s;
    s.rule_id = rule.id;
    s.rule_confidence = rule.rule_confidence;
    for (std::size_t f : unknown) s.bindings.push_back({kb.feature_names[f], rule.antecedent[f]});
    result.solutions.push_back(std::move(s));
  }

  if (result.solutions.empty()) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& rule : kb.rules) {
      if (rule.class_label != q.desired_class) continue;
      std::size_t miss = 0;
      for (const auto& [f, term] : known) miss += rule.antecedent[f].term == term ? 0 : 1;
      if (miss < best) {
        best = miss;
        result.nearest = NearestCandidate{rule.id, miss};
      }
    }
  }
  return result;
}

const FuzzyRule& closest_rule(const KnowledgeBase& kb, const FuzzyRule& reference) {
  const FuzzyRule* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& rule : kb.rules) {
    if (rule.id == reference.id) continue;
    const double d = rule_distance(reference, rule, kb.scoring.distance);
    if (d < best_d || (d == best_d && best && rule.id < best->id)) {
      best_d = d;
      best = &rule;
    }
  }
  if (!best) throw ValidationError("the knowledge base holds no rule other than the reference");
  return *best;
}

void QuerySession::record(const Query& q, const QueryResult& r) {
  QueryContext ctx{q, r, std::nullopt};
  if (!r.solutions.empty()) ctx.source_rule = r.solutions.front().rule_id;
  last_ = std::move(ctx);
}

std::optional<QueryContext> QuerySession::last_query_context() const { return last_; }

void QuerySession::clear() { last_.reset(); }

}  // namespace fuzzex
