#pragma once

// Reference implementations used only by tests. They follow the definitions
// directly (plain loops, no interning, no early exit) so that the library can
// be checked against something written independently of it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "fuzzex/query_engine.h"
#include "fuzzex/rulebase.h"
#include "fuzzex/scoring_config.h"

namespace oracle {

inline double implicator(fuzzex::Implicator kind, double a, double b) {
  using fuzzex::Implicator;
  if (kind == Implicator::kLukasiewicz) return std::min(1.0, 1.0 - a + b);
  if (a <= b) return 1.0;
  if (kind == Implicator::kFodor) return std::max(1.0 - a, b);
  if (kind == Implicator::kGoguen) return b / a;
  return b;  // Goedel
}

// Lower-approximation membership of every rule, straight from the definition.
inline std::vector<double> lower_memberships(const fuzzex::KnowledgeBase& kb, const fuzzex::ScoringConfig& cfg,
                                             const std::vector<bool>& included = {}) {
  const auto& R = kb.rules;
  std::vector<double> out;
  for (std::size_t x = 0; x < R.size(); ++x) {
    double inf = 1.0;
    for (std::size_t y = 0; y < R.size(); ++y) {
      double d = 0.0;
      for (std::size_t f = 0; f < R[x].antecedent.size(); ++f) {
        if (!included.empty() && !included[f]) continue;
        const auto& sx = R[x].antecedent[f];
        const auto& sy = R[y].antecedent[f];
        if (sx.term != sy.term) {
          d += 1.0;
        } else if (cfg.distance == fuzzex::DistanceKind::kFuzzy) {
          d += 0.5 * (1.0 - std::min(sx.confidence, sy.confidence));
        } else {
          d += 0.0;
        }
      }
      const double relation = R[x].class_confidence * std::exp(-cfg.lambda * d);
      const double theta = R[y].class_label == R[x].class_label ? R[y].class_confidence : 0.0;
      inf = std::min(inf, oracle::implicator(cfg.implicator, relation, theta));
    }
    out.push_back(std::min(R[x].class_confidence, inf));
  }
  return out;
}

struct RandomKbSpec {
  std::size_t rules = 50;
  std::size_t features = 6;
  std::size_t classes = 3;
  std::size_t terms = 5;
  bool hard_labels = false;
};

// Random rules over term vocabularies t0..t{terms-1} and classes c0..c{n-1}.
inline fuzzex::KnowledgeBase random_kb(std::mt19937_64& rng, const RandomKbSpec& spec) {
  std::uniform_int_distribution<std::size_t> term(0, spec.terms - 1);
  std::uniform_int_distribution<std::size_t> cls(0, spec.classes - 1);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  fuzzex::KnowledgeBase kb;
  std::vector<std::string> vocab;
  for (std::size_t t = 0; t < spec.terms; ++t) vocab.push_back("t" + std::to_string(t));
  for (std::size_t f = 0; f < spec.features; ++f) {
    kb.feature_names.push_back("f" + std::to_string(f));
    kb.vocabularies.push_back(vocab);
    kb.granulations.emplace_back();
  }
  for (std::size_t c = 0; c < spec.classes; ++c) kb.class_domain.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < spec.rules; ++r) {
    fuzzex::FuzzyRule rule;
    rule.id = r;
    for (std::size_t f = 0; f < spec.features; ++f) {
      // Confidences in (0, 1]; a few exact ones to exercise ties.
      const double c = conf(rng) < 0.1 ? 1.0 : 1.0 - conf(rng);
      rule.antecedent.push_back({vocab[term(rng)], c});
    }
    rule.class_label = kb.class_domain[cls(rng)];
    rule.class_confidence = spec.hard_labels ? 1.0 : (conf(rng) < 0.2 ? 1.0 : 1.0 - conf(rng));
    kb.rules.push_back(rule);
  }
  return kb;
}

inline double weakest(const fuzzex::FuzzyRule& r) {
  double w = 1.0;
  for (const auto& a : r.antecedent) w = std::min(w, a.confidence);
  return w;
}

// Linear scan over the rules, with the ranking spelled out as a tuple sort.
// Expects canonical (exact-case) names.
inline std::vector<std::size_t> resolve_ids(const fuzzex::KnowledgeBase& kb, const fuzzex::Query& q) {
  auto fidx = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(kb.feature_names.begin(), kb.feature_names.end(), name) -
                                     kb.feature_names.begin());
  };
  std::vector<std::tuple<double, double, std::size_t>> keyed;
  for (const auto& r : kb.rules) {
    if (r.class_label != q.desired_class) continue;
    if (r.rule_confidence < q.constraints.min_rule_confidence) continue;
    bool ok = true;
    for (const auto& [f, t] : q.known) ok = ok && r.antecedent[fidx(f)].term == t;
    for (const auto& f : q.unknowns) {
      const auto& s = r.antecedent[fidx(f)];
      ok = ok && s.confidence >= q.constraints.min_term_confidence;
      auto ex = q.constraints.excluded_terms.find(f);
      ok = ok && !(ex != q.constraints.excluded_terms.end() && ex->second.count(s.term));
    }
    if (ok) keyed.emplace_back(-r.rule_confidence, -weakest(r), r.id);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> ids;
  for (const auto& k : keyed) ids.push_back(std::get<2>(k));
  if (q.max_solutions && ids.size() > q.max_solutions) ids.resize(q.max_solutions);
  return ids;
}

inline std::size_t closest_id(const fuzzex::KnowledgeBase& kb, std::size_t ref) {
  const auto& x = kb.rules[ref];
  double best = INFINITY;
  std::size_t id = ref;
  for (const auto& y : kb.rules) {
    if (y.id == ref) continue;
    double d = 0.0;
    for (std::size_t f = 0; f < x.antecedent.size(); ++f) {
      if (x.antecedent[f].term != y.antecedent[f].term) {
        d += 1.0;
      } else if (kb.scoring.distance == fuzzex::DistanceKind::kFuzzy) {
        d += 0.5 * (1.0 - std::min(x.antecedent[f].confidence, y.antecedent[f].confidence));
      }
    }
    if (d < best) {
      best = d;
      id = y.id;
    }
  }
  return id;
}

// One-dimensional fuzzy c-means memberships, written out term by term.
inline std::vector<double> fcm_memberships(const std::vector<double>& z, double x, double m) {
  std::vector<double> u(z.size(), 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (x == z[j]) {
      std::fill(u.begin(), u.end(), 0.0);
      u[j] = 1.0;
      return u;
    }
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < z.size(); ++l) s += std::pow(std::abs(x - z[j]) / std::abs(x - z[l]), 2.0 / (m - 1.0));
    u[j] = 1.0 / s;
  }
  return u;
}

}  // namespace oracle
