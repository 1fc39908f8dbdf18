#include "fuzzex/rulebase.h"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>

#include "fuzzex/errors.h"
#include "fuzzex/text_util.h"
#include "json.hpp"

namespace fuzzex {

double FuzzyRule::weakest_antecedent() const {
  double lo = 1.0;
  for (const auto& s : antecedent) lo = std::min(lo, s.confidence);
  return lo;
}

std::optional<std::size_t> KnowledgeBase::find_feature(std::string_view name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (text::iequals(feature_names[i], name)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> KnowledgeBase::find_class(std::string_view name) const {
  for (std::size_t i = 0; i < class_domain.size(); ++i) {
    if (text::iequals(class_domain[i], name)) return i;
  }
  return std::nullopt;
}

std::optional<std::string> KnowledgeBase::find_term(std::size_t feature, std::string_view term) const {
  if (feature >= vocabularies.size()) return std::nullopt;
  for (const auto& t : vocabularies[feature]) {
    if (text::iequals(t, term)) return t;
  }
  return std::nullopt;
}

std::vector<std::size_t> KnowledgeBase::partition(std::string_view class_label) const {
  std::vector<std::size_t> ids;
  for (const auto& r : rules) {
    if (r.class_label == class_label) ids.push_back(r.id);
  }
  return ids;
}

const FuzzyRule& KnowledgeBase::rule(std::size_t id) const {
  if (id >= rules.size() || rules[id].id != id) throw DomainError("no rule with id " + std::to_string(id));
  return rules[id];
}

KnowledgeBase build_rules(const Dataset& ds,
                          const std::vector<std::optional<FeatureGranulation>>& grans,
                          const std::vector<Prediction>& preds, const FcmConfig& fcm) {
  if (grans.size() != ds.feature_count()) {
    throw ValidationError("granulation list does not match the dataset features");
  }
  if (preds.size() != ds.size()) {
    throw ValidationError("expected " + std::to_string(ds.size()) + " predictions, got " +
                          std::to_string(preds.size()));
  }
  if (ds.has_missing()) throw ValidationError("build_rules requires an imputed dataset");

  KnowledgeBase kb;
  kb.fcm = fcm;
  kb.granulations = grans;
  kb.class_domain = ds.class_feature.domain;
  for (std::size_t f = 0; f < ds.feature_count(); ++f) {
    kb.feature_names.push_back(ds.features[f].name);
    if (ds.features[f].is_numeric()) {
      if (!grans[f]) throw ValidationError("numeric feature '" + ds.features[f].name + "' is not granulated");
      kb.vocabularies.push_back(grans[f]->terms);
    } else {
      kb.vocabularies.push_back(ds.features[f].domain);
    }
  }

  kb.rules.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const Prediction& p = preds[r];
    if (p.instance_id != r) throw ValidationError("prediction ids are not aligned with dataset rows");
    const auto cls = ds.class_feature.find_value(p.class_label);
    if (!cls) throw DomainError("prediction class '" + p.class_label + "' is not a dataset class");
    FuzzyRule rule;
    rule.id = r;
    rule.antecedent.reserve(ds.feature_count());
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
      const double v = ds.rows[r][f];
      if (ds.features[f].is_numeric()) {
        rule.antecedent.push_back(assign_symbol(*grans[f], v));
      } else {
        rule.antecedent.push_back({ds.features[f].domain[static_cast<std::size_t>(v)], 1.0});
      }
    }
    rule.class_label = kb.class_domain[*cls];
    rule.class_confidence = std::clamp(p.confidence, 0.0, 1.0);
    rule.rule_confidence = 1.0;
    kb.rules.push_back(std::move(rule));
  }
  return kb;
}

std::string prolog_clause(const FuzzyRule& rule) {
  std::string out = "input(" + std::to_string(rule.id) + ", [";
  for (const auto& s : rule.antecedent) {
    out += "[" + text::to_atom(s.term) + "," + text::fixed(s.confidence, 6) + "], ";
  }
  out += text::fixed(rule.rule_confidence, 6) + "]) :- output([" + text::to_atom(rule.class_label) +
         "," + text::fixed(rule.class_confidence, 6) + "]).";
  return out;
}

void export_prolog(const KnowledgeBase& kb, std::ostream& out) {
  out << "% Fuzzy symbolic knowledge base\n";
  out << "% features: ";
  for (std::size_t i = 0; i < kb.feature_names.size(); ++i) {
    out << (i ? ", " : "") << text::to_atom(kb.feature_names[i]);
  }
  out << "\n% classes: ";
  for (std::size_t i = 0; i < kb.class_domain.size(); ++i) {
    out << (i ? ", " : "") << text::to_atom(kb.class_domain[i]);
  }
  out << "\n% granulation: c=" << kb.fcm.c << " m=" << text::exact(kb.fcm.m)
      << " tol=" << text::exact(kb.fcm.tol) << " max_iters=" << kb.fcm.max_iters << '\n';
  for (std::size_t f = 0; f < kb.granulations.size(); ++f) {
    if (!kb.granulations[f]) continue;
    const auto& g = *kb.granulations[f];
    out << "%   " << text::to_atom(kb.feature_names[f]) << ':';
    for (std::size_t j = 0; j < g.size(); ++j) {
      out << ' ' << g.terms[j] << '=' << text::fixed(g.prototypes[j], 6);
    }
    out << '\n';
  }
  out << "% scoring: implicator=" << to_string(kb.scoring.implicator)
      << " distance=" << to_string(kb.scoring.distance)
      << " lambda=" << text::exact(kb.scoring.lambda) << '\n';
  out << "% rules: " << kb.rules.size() << "\n\n";

  std::vector<const FuzzyRule*> ordered;
  for (const auto& r : kb.rules) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const FuzzyRule* a, const FuzzyRule* b) { return a->id < b->id; });
  for (const auto* r : ordered) out << prolog_clause(*r) << '\n';
}

std::string to_prolog(const KnowledgeBase& kb) {
  std::ostringstream out;
  export_prolog(kb, out);
  return out.str();
}

namespace {

enum class Tok { kAtom, kNumber, kPunct, kNeck, kEnd };

struct Token {
  Tok kind;
  std::string text;
};

class ClauseLexer {
 public:
  explicit ClauseLexer(std::string src) : src_(std::move(src)) {}

  // Header comments of the form "% key: value" seen while skipping.
  std::vector<std::string> comments;

  Token next() {
    skip();
    if (pos_ >= src_.size()) return {Tok::kEnd, ""};
    const char c = src_[pos_];
    if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
      pos_ += 2;
      return {Tok::kNeck, ":-"};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const std::size_t start = pos_++;
      while (pos_ < src_.size()) {
        const char d = src_[pos_];
        const bool dot_digit = d == '.' && pos_ + 1 < src_.size() &&
                               std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
        const bool exp_sign = (d == '-' || d == '+') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E');
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || dot_digit || exp_sign) {
          ++pos_;
        } else {
          break;
        }
      }
      return {Tok::kNumber, src_.substr(start, pos_ - start)};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::kAtom, src_.substr(start, pos_ - start)};
    }
    if (c == '\'') {
      const auto end = src_.find('\'', pos_ + 1);
      if (end == std::string::npos) return {Tok::kPunct, "'"};
      std::string atom = src_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return {Tok::kAtom, atom};
    }
    ++pos_;
    return {Tok::kPunct, std::string(1, c)};
  }

 private:
  void skip() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      } else if (src_[pos_] == '%') {
        auto end = src_.find('\n', pos_);
        if (end == std::string::npos) end = src_.size();
        comments.push_back(src_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end;
      } else {
        break;
      }
    }
  }

  std::string src_;
  std::size_t pos_ = 0;
};

class ClauseParser {
 public:
  explicit ClauseParser(std::string src) : lex_(std::move(src)) { advance(); }

  bool at_end() const { return tok_.kind == Tok::kEnd; }
  const std::vector<std::string>& comments() const { return lex_.comments; }

  FuzzyRule clause(std::size_t index) {
    index_ = index;
    FuzzyRule rule;
    expect_atom("input");
    expect("(");
    rule.id = static_cast<std::size_t>(std::stoull(expect_kind(Tok::kNumber, "rule id")));
    expect(",");
    expect("[");
    // Either "[term,conf]" pairs followed by the rule confidence, or just it.
    while (tok_.kind == Tok::kPunct && tok_.text == "[") {
      advance();
      SymbolAssignment s;
      s.term = atom_or_number("term");
      expect(",");
      s.confidence = number("term confidence");
      expect("]");
      expect(",");
      rule.antecedent.push_back(std::move(s));
    }
    rule.rule_confidence = number("rule confidence");
    expect("]");
    expect(")");
    if (tok_.kind != Tok::kNeck) fail("expected ':-'");
    advance();
    expect_atom("output");
    expect("(");
    expect("[");
    rule.class_label = atom_or_number("class");
    expect(",");
    rule.class_confidence = number("class confidence");
    expect("]");
    expect(")");
    expect(".");
    return rule;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("clause " + std::to_string(index_) + ": " + what + " near '" + tok_.text + "'",
                     index_);
  }
  void advance() { tok_ = lex_.next(); }
  void expect(const char* punct) {
    if (tok_.kind != Tok::kPunct || tok_.text != punct) fail(std::string("expected '") + punct + "'");
    advance();
  }
  void expect_atom(const char* name) {
    if (tok_.kind != Tok::kAtom || tok_.text != name) fail(std::string("expected '") + name + "'");
    advance();
  }
  std::string expect_kind(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    std::string t = tok_.text;
    advance();
    return t;
  }
  std::string atom_or_number(const char* what) {
    if (tok_.kind != Tok::kAtom && tok_.kind != Tok::kNumber) fail(std::string("expected ") + what);
    std::string t = tok_.text;
    advance();
    return t;
  }
  double number(const char* what) {
    const std::string t = expect_kind(Tok::kNumber, what);
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) fail(std::string("malformed ") + what);
      return v;
    } catch (const std::logic_error&) {
      fail(std::string("malformed ") + what);
    }
  }

  ClauseLexer lex_;
  Token tok_{Tok::kEnd, ""};
  std::size_t index_ = 0;
};

std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

KnowledgeBase parse_prolog_kb_text(const std::string& text) {
  ClauseParser parser(text);
  KnowledgeBase kb;
  std::optional<std::size_t> arity;
  auto read_header = [&] {
    for (const auto& c : parser.comments()) {
      const std::string line = text::trim(c);
      if (line.rfind("features:", 0) == 0 && kb.feature_names.empty()) {
        kb.feature_names = split_names(line.substr(9));
        arity = kb.feature_names.size();
      } else if (line.rfind("classes:", 0) == 0 && kb.class_domain.empty()) {
        kb.class_domain = split_names(line.substr(8));
      }
    }
  };
  read_header();
  for (std::size_t index = 0; !parser.at_end(); ++index) {
    FuzzyRule rule = parser.clause(index);
    read_header();
    if (!arity) arity = rule.antecedent.size();
    if (rule.antecedent.size() != *arity) {
      throw ParseError("clause " + std::to_string(index) + ": expected " + std::to_string(*arity) +
                           " term/confidence pairs, found " + std::to_string(rule.antecedent.size()),
                       index);
    }
    kb.rules.push_back(std::move(rule));
  }
  kb.scored = true;
  return kb;
}

KnowledgeBase parse_prolog_kb(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_prolog_kb_text(buf.str());
}

using nlohmann::json;

std::string kb_to_json(const KnowledgeBase& kb) {
  json grans = json::array();
  for (std::size_t f = 0; f < kb.granulations.size(); ++f) {
    if (!kb.granulations[f]) {
      grans.push_back(nullptr);
      continue;
    }
    const auto& g = *kb.granulations[f];
    grans.push_back({{"prototypes", g.prototypes}, {"terms", g.terms}, {"m", g.m}});
  }
  json rules = json::array();
  for (const auto& r : kb.rules) {
    json ante = json::array();
    for (const auto& s : r.antecedent) ante.push_back({s.term, s.confidence});
    rules.push_back({{"id", r.id},
                     {"antecedent", ante},
                     {"class", r.class_label},
                     {"class_confidence", r.class_confidence},
                     {"rule_confidence", r.rule_confidence}});
  }
  json doc = {{"features", kb.feature_names},
              {"vocabularies", kb.vocabularies},
              {"granulations", grans},
              {"classes", kb.class_domain},
              {"fcm", {{"c", kb.fcm.c}, {"m", kb.fcm.m}, {"max_iters", kb.fcm.max_iters}, {"tol", kb.fcm.tol}}},
              {"scoring",
               {{"implicator", to_string(kb.scoring.implicator)},
                {"distance", to_string(kb.scoring.distance)},
                {"lambda", kb.scoring.lambda}}},
              {"scored", kb.scored},
              {"rules", rules}};
  return doc.dump();
}

KnowledgeBase kb_from_json(const std::string& json_text) {
  KnowledgeBase kb;
  try {
    const json doc = json::parse(json_text);
    kb.feature_names = doc.at("features").get<std::vector<std::string>>();
    kb.vocabularies = doc.at("vocabularies").get<std::vector<std::vector<std::string>>>();
    kb.class_domain = doc.at("classes").get<std::vector<std::string>>();
    for (std::size_t f = 0; f < doc.at("granulations").size(); ++f) {
      const auto& g = doc.at("granulations")[f];
      if (g.is_null()) {
        kb.granulations.emplace_back();
        continue;
      }
      FeatureGranulation fg;
      fg.feature = kb.feature_names.at(f);
      fg.prototypes = g.at("prototypes").get<std::vector<double>>();
      fg.terms = g.at("terms").get<std::vector<std::string>>();
      fg.m = g.at("m").get<double>();
      kb.granulations.emplace_back(std::move(fg));
    }
    const auto& fcm = doc.at("fcm");
    kb.fcm.c = fcm.at("c").get<std::size_t>();
    kb.fcm.m = fcm.at("m").get<double>();
    kb.fcm.max_iters = fcm.at("max_iters").get<std::size_t>();
    kb.fcm.tol = fcm.at("tol").get<double>();
    const auto& sc = doc.at("scoring");
    kb.scoring.implicator = implicator_from_string(sc.at("implicator").get<std::string>());
    kb.scoring.distance = distance_from_string(sc.at("distance").get<std::string>());
    kb.scoring.lambda = sc.at("lambda").get<double>();
    kb.scored = doc.at("scored").get<bool>();
    for (const auto& r : doc.at("rules")) {
      FuzzyRule rule;
      rule.id = r.at("id").get<std::size_t>();
      for (const auto& s : r.at("antecedent")) {
        rule.antecedent.push_back({s.at(0).get<std::string>(), s.at(1).get<double>()});
      }
      rule.class_label = r.at("class").get<std::string>();
      rule.class_confidence = r.at("class_confidence").get<double>();
      rule.rule_confidence = r.at("rule_confidence").get<double>();
      kb.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("knowledge base JSON: ") + e.what(), 0);
  }
  return kb;
}

}  // namespace fuzzex
