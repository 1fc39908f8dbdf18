#include "fuzzex/answers.h"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "fuzzex/text_util.h"

namespace fuzzex {

namespace {

std::string c3(double v) { return text::fixed(v, 3); }

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string percent(double fraction) {
  return text::fixed(fraction * 100.0, 0) + "%";
}

std::string strength(double r) {
  const double a = std::abs(r);
  if (a < 0.3) return "The correlation is weak.";
  if (a < 0.7) return "The correlation is moderate.";
  return "The correlation is strong.";
}

std::string query_reply(const QueryAnswer& a) {
  const auto& res = a.result;
  if (res.solutions.empty()) {
    std::string out = "I could not find any rule matching your query.";
    if (res.nearest) {
      out += " The closest candidate is rule #" + std::to_string(res.nearest->rule_id) + ", which differs in " +
             std::to_string(res.nearest->mismatched_bindings) + " of the known values.";
    } else {
      out += " No rule in the knowledge base has the requested outcome.";
    }
    return out;
  }
  const char* verb = a.kind == QueryKind::kCounterfactual ? " should be " : " is ";
  const auto& top = res.solutions.front();
  std::string out = "I have run the query for you. These are the results:";
  for (const auto& b : top.bindings) {
    out += " " + display_feature(b.feature) + verb + display_term(b.value.term) + ", with a certainty of " +
           c3(b.value.confidence) + ".";
  }
  out += " The entire rule has a certainty of " + c3(top.rule_confidence) + ".";
  if (res.solutions.size() > 1) {
    std::vector<std::string> others;
    for (std::size_t i = 1; i < res.solutions.size(); ++i) {
      others.push_back("rule #" + std::to_string(res.solutions[i].rule_id) + " (" +
                       c3(res.solutions[i].rule_confidence) + ")");
    }
    out += " Other matching rules: " + text::join_list(others) + ".";
  }
  if (res.relaxed_known) out += " No known values were given, so every rule with that outcome was considered.";
  return out;
}

struct Renderer {
  const Intent& intent;

  std::string operator()(const LoadAnswer& a) const {
    return "I loaded the " + a.dataset + " dataset: " + std::to_string(a.instances) + " instances and " +
           std::to_string(a.features) + " features.";
  }
  std::string operator()(const StatsAnswer& a) const {
    std::vector<std::string> names;
    for (const auto& f : a.features) names.push_back(display_feature(f));
    return "The dataset contains the following variables: " + text::join_list(names) + ". The dataset has " +
           std::to_string(a.instances) + " instances in total.";
  }
  std::string operator()(const HistogramAnswer& a) const {
    return "Here is the distribution of " + display_feature(a.feature) + ".";
  }
  std::string operator()(const CorrelationAnswer& a) const {
    return "The correlation between " + display_feature(a.feature_a) + " and " + display_feature(a.feature_b) +
           " is " + text::fixed(a.r, 2) + ", with a p-value of " + scientific(a.p_value) + ". " + strength(a.r);
  }
  std::string operator()(const CorrelationMatrixAnswer& a) const {
    return "Here is the correlation matrix of the " + std::to_string(a.features) + " numeric features.";
  }
  std::string operator()(const TrainAnswer& a) const {
    std::string out = "I trained the baseline k-nearest-neighbour classifier (k = " + std::to_string(a.k) +
                      "). Its accuracy on the test set is " + c3(a.test_accuracy) + ".";
    if (a.max_depth) out += " The baseline parameter k was taken from max_depth = " + *a.max_depth + ".";
    if (a.n_estimators) {
      out += " n_estimators = " + *a.n_estimators + " does not apply to the baseline and was ignored.";
    }
    return out;
  }
  std::string operator()(const SplitAnswer& a) const {
    return "The classifier was trained on " + percent(a.train_fraction) + " of the data (" +
           std::to_string(a.train_rows) + " instances). The remaining " + percent(1.0 - a.train_fraction) +
           " (" + std::to_string(a.test_rows) + " instances) were held out for testing.";
  }
  std::string operator()(const BuildAnswer& a) const {
    std::vector<std::string> names;
    for (const auto& f : a.features) names.push_back(display_feature(f));
    return "Done! I derived " + std::to_string(a.symbols) + " linguistic terms per numeric feature, scored " +
           std::to_string(a.rules) + " rules and built the Prolog knowledge base. The feature names are " +
           text::join_list(names) + ". The decision classes are " + text::join_list(a.classes) + ".";
  }
  std::string operator()(const QueryAnswer& a) const { return query_reply(a); }
  std::string operator()(const ClosestAnswer& a) const {
    return "The closest rule is #" + std::to_string(a.rule.id) + ": " + rule_sentence(a.rule, a.feature_names);
  }
  std::string operator()(const ComplexityAnswer& a) const {
    return "The complexity of this problem is " + c3(a.value) +
           ". Higher values mean the rules in the knowledge base disagree more often.";
  }
  std::string operator()(const BiasAnswer& a) const {
    return "The fuzzy-rough uncertainty attached to " + display_feature(a.feature) + " is " + c3(a.value) +
           ". It measures how much the rule confidences change once this feature is removed.";
  }
  std::string operator()(const TopRulesAnswer& a) const {
    std::string out = "These are the top " + std::to_string(a.rules.size()) + " rules in the knowledge base:";
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
      out += "\nRule #" + std::to_string(i + 1) + " (id " + std::to_string(a.rules[i].id) + ", certainty " +
             c3(a.rules[i].rule_confidence) + "): " + rule_sentence(a.rules[i], a.feature_names);
    }
    return out;
  }
  std::string operator()(const HelpAnswer&) const {
    return "I can load a dataset, describe it, plot histograms and correlations, train the baseline "
           "classifier, build the explanation module, and answer what-if and counterfactual questions. "
           "I can also report the problem complexity, the bias attached to a feature, and the top rules.";
  }
};

}  // namespace

std::string display_feature(const std::string& name) {
  std::string out = name;
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string display_term(const std::string& term) {
  std::string out = term;
  for (auto& ch : out) {
    if (ch == '_') ch = ' ';
  }
  return out;
}

std::string rule_sentence(const FuzzyRule& rule, const std::vector<std::string>& feature_names) {
  std::string out = "If";
  for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
    const std::string name = i < feature_names.size() ? feature_names[i] : "f" + std::to_string(i);
    out += (i ? ", " : " ") + display_feature(name) + " is " + display_term(rule.antecedent[i].term);
  }
  return out + ", then Class is " + rule.class_label + ".";
}

std::string render_answer(const Intent& intent, const AnswerPayload& payload) {
  return std::visit(Renderer{intent}, payload);
}

std::string render_rejection(const ParseOutcome& outcome) {
  std::string out = "Sorry, I did not understand that.";
  if (outcome.suggestion && !outcome.suggestion->example.empty()) {
    out += " Try something like: \"" + outcome.suggestion->example + "\"";
  }
  return out;
}

}  // namespace fuzzex
