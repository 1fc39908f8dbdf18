#include "fuzzex/fuzzy_rough.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <thread>

#include "fuzzex/errors.h"
#include "fuzzex/text_util.h"

namespace fuzzex {

void ScoringConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("smoothing parameter lambda must be a finite value > 0");
  }
}

std::string to_string(Implicator i) {
  switch (i) {
    case Implicator::kFodor: return "fodor";
    case Implicator::kGoguen: return "goguen";
    case Implicator::kGodel: return "godel";
    case Implicator::kLukasiewicz: return "lukasiewicz";
  }
  return "unknown";
}

std::string to_string(DistanceKind d) { return d == DistanceKind::kCrisp ? "crisp" : "fuzzy"; }

Implicator implicator_from_string(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "fodor" || n == "fd") return Implicator::kFodor;
  if (n == "goguen" || n == "gg") return Implicator::kGoguen;
  if (n == "godel" || n == "goedel" || n == "g\xc3\xb6" "del" || n == "gd") return Implicator::kGodel;
  if (n == "lukasiewicz" || n == "\xc5\x82ukasiewicz" || n == "\xc5\x81ukasiewicz" || n == "lk") {
    return Implicator::kLukasiewicz;
  }
  throw ConfigError("unknown implicator '" + std::string(name) +
                    "' (expected fodor, goguen, godel or lukasiewicz)");
}

DistanceKind distance_from_string(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "crisp") return DistanceKind::kCrisp;
  if (n == "fuzzy") return DistanceKind::kFuzzy;
  throw ConfigError("unknown distance '" + std::string(name) + "' (expected crisp or fuzzy)");
}

double implicator(Implicator kind, double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
    throw DomainError("implicator arguments must lie in [0, 1]");
  }
  switch (kind) {
    case Implicator::kFodor: return a <= b ? 1.0 : std::max(1.0 - a, b);
    case Implicator::kGoguen: return a <= b ? 1.0 : b / a;  // a > b >= 0 here
    case Implicator::kGodel: return a <= b ? 1.0 : b;
    case Implicator::kLukasiewicz: return std::min(1.0, 1.0 - a + b);
  }
  return 1.0;
}

double theta_membership(const FuzzyRule& rule, std::string_view class_j,
                        const std::vector<std::string>& class_domain) {
  const bool known = std::any_of(class_domain.begin(), class_domain.end(),
                                 [&](const std::string& c) { return c == class_j; });
  if (!known) throw DomainError("unknown class '" + std::string(class_j) + "'");
  return rule.class_label == class_j ? rule.class_confidence : 0.0;
}

double feature_distance(const SymbolAssignment& x, const SymbolAssignment& y, DistanceKind kind) {
  if (x.term != y.term) return 1.0;
  if (kind == DistanceKind::kCrisp) return 0.0;
  return 0.5 * (1.0 - std::min(x.confidence, y.confidence));
}

double rule_distance(const FuzzyRule& x, const FuzzyRule& y, DistanceKind kind,
                     const std::vector<bool>& included) {
  if (x.antecedent.size() != y.antecedent.size()) {
    throw ValidationError("rules " + std::to_string(x.id) + " and " + std::to_string(y.id) +
                          " have different antecedent lengths");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < x.antecedent.size(); ++i) {
    if (!included.empty() && !included[i]) continue;
    d += feature_distance(x.antecedent[i], y.antecedent[i], kind);
  }
  return d;
}

double relation(const FuzzyRule& y, const FuzzyRule& x, const ScoringConfig& cfg) {
  return x.class_confidence * std::exp(-cfg.lambda * rule_distance(x, y, cfg.distance));
}

namespace {

// Rules with interned terms and classes so the O(|F| |Omega|^2) loop compares
// integers. Arithmetic matches rule_distance/relation operation for operation.
struct CompactRules {
  std::size_t n = 0;
  std::size_t width = 0;
  std::vector<int> terms;     // n * width
  std::vector<double> conf;   // n * width
  std::vector<int> cls;
  std::vector<double> p;
};

CompactRules compact(const KnowledgeBase& kb) {
  CompactRules c;
  c.n = kb.rules.size();
  c.width = c.n ? kb.rules[0].antecedent.size() : 0;
  c.terms.resize(c.n * c.width);
  c.conf.resize(c.n * c.width);
  std::vector<std::map<std::string, int>> ids(c.width);
  std::map<std::string, int> class_ids;
  for (std::size_t r = 0; r < c.n; ++r) {
    const auto& rule = kb.rules[r];
    if (rule.antecedent.size() != c.width) {
      throw ValidationError("rule " + std::to_string(rule.id) + " has a different antecedent length");
    }
    for (std::size_t f = 0; f < c.width; ++f) {
      auto [it, _] = ids[f].emplace(rule.antecedent[f].term, static_cast<int>(ids[f].size()));
      c.terms[r * c.width + f] = it->second;
      c.conf[r * c.width + f] = rule.antecedent[f].confidence;
    }
    auto [it, _] = class_ids.emplace(rule.class_label, static_cast<int>(class_ids.size()));
    c.cls.push_back(it->second);
    c.p.push_back(rule.class_confidence);
  }
  return c;
}

double score_one(const CompactRules& c, std::size_t x, const ScoringConfig& cfg,
                 const std::vector<bool>& included) {
  const double px = c.p[x];
  const bool fuzzy = cfg.distance == DistanceKind::kFuzzy;
  const int* tx = &c.terms[x * c.width];
  const double* cx = &c.conf[x * c.width];
  double inf = 1.0;
  for (std::size_t y = 0; y < c.n; ++y) {
    const int* ty = &c.terms[y * c.width];
    const double* cy = &c.conf[y * c.width];
    double d = 0.0;
    for (std::size_t f = 0; f < c.width; ++f) {
      if (!included.empty() && !included[f]) continue;
      if (tx[f] != ty[f]) {
        d += 1.0;
      } else if (fuzzy) {
        d += 0.5 * (1.0 - std::min(cx[f], cy[f]));
      } else {
        d += 0.0;
      }
    }
    const double a = px * std::exp(-cfg.lambda * d);
    const double b = c.cls[y] == c.cls[x] ? c.p[y] : 0.0;
    inf = std::min(inf, implicator(cfg.implicator, a, b));
    if (inf == 0.0) break;
  }
  return std::min(px, inf);
}

}  // namespace

std::vector<double> lower_memberships(const KnowledgeBase& kb, const ScoringConfig& cfg,
                                      const std::vector<bool>& included) {
  cfg.validate();
  const CompactRules c = compact(kb);
  if (!included.empty() && included.size() != c.width) {
    throw ValidationError("feature mask does not match the antecedent length");
  }
  std::vector<double> out(c.n);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1 || c.n < 256) {
    for (std::size_t x = 0; x < c.n; ++x) out[x] = score_one(c, x, cfg, included);
    return out;
  }
  // Each worker owns a strided slice of the output.
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t x = w; x < c.n; x += workers) out[x] = score_one(c, x, cfg, included);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

std::vector<RegionMembership> score_rules(KnowledgeBase& kb, const ScoringConfig& cfg) {
  const auto mu = lower_memberships(kb, cfg);
  std::vector<RegionMembership> out;
  out.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    kb.rules[i].rule_confidence = mu[i];
    out.push_back({kb.rules[i].id, kb.rules[i].class_label, mu[i]});
  }
  kb.scoring = cfg;
  kb.scored = true;
  return out;
}

double complexity(const KnowledgeBase& kb) {
  if (kb.rules.empty()) throw ValidationError("complexity of an empty knowledge base");
  if (!kb.scored) throw ValidationError("knowledge base has not been scored");
  double sum = 0.0;
  for (const auto& r : kb.rules) sum += r.rule_confidence;
  return 1.0 - sum / static_cast<double>(kb.rules.size());
}

TopRules top_rules(const KnowledgeBase& kb, std::size_t n) {
  if (n == 0) throw ConfigError("top_rules needs n >= 1");
  TopRules out;
  out.rules = kb.rules;
  std::stable_sort(out.rules.begin(), out.rules.end(), [](const FuzzyRule& a, const FuzzyRule& b) {
    if (a.rule_confidence != b.rule_confidence) return a.rule_confidence > b.rule_confidence;
    return a.id < b.id;
  });
  if (n > out.rules.size()) {
    out.warnings.push_back("requested " + std::to_string(n) + " rules but the knowledge base has " +
                           std::to_string(out.rules.size()));
  } else {
    out.rules.resize(n);
  }
  return out;
}

double bias_proxy(const KnowledgeBase& kb, std::string_view feature, const ScoringConfig& cfg) {
  const auto f = kb.find_feature(feature);
  if (!f) throw DomainError("unknown feature '" + std::string(feature) + "'");
  const auto with = lower_memberships(kb, cfg);
  std::vector<bool> included(kb.feature_names.size(), true);
  included[*f] = false;
  const auto without = lower_memberships(kb, cfg, included);
  double diff = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < with.size(); ++i) {
    diff += std::abs(with[i] - without[i]);
    total += with[i];
  }
  return std::clamp(diff / std::max(total, 1e-12), 0.0, 1.0);
}

}  // namespace fuzzex
