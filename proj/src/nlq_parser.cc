#include "fuzzex/nlq_parser.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fuzzex/dataset.h"
#include "fuzzex/errors.h"
#include "fuzzex/granulation.h"
#include "fuzzex/rulebase.h"
#include "fuzzex/text_util.h"

namespace fuzzex {

using json = nlohmann::json;

namespace {

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '_') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Like split_words, but keeps decimal points inside numbers.
std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    const bool decimal_point = s[i] == '.' && !cur.empty() &&
                               std::isdigit(static_cast<unsigned char>(cur.back())) &&
                               i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
    if (std::isalnum(c) || s[i] == '_' || decimal_point) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Word forms of a schema name: "very_low" -> {"very_low"} and {"very", "low"}.
std::vector<std::vector<std::string>> name_forms(const std::string& name) {
  std::vector<std::vector<std::string>> forms;
  forms.push_back({text::to_lower(name)});
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text::to_lower(name)) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    } else if (!cur.empty()) {
      parts.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  if (parts.size() > 1) forms.push_back(std::move(parts));
  return forms;
}

bool is_number(const std::string& t) {
  if (t.empty() || !std::isdigit(static_cast<unsigned char>(t[0]))) return false;
  return std::all_of(t.begin(), t.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; });
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

const std::vector<std::string>& empty_list() {
  static const std::vector<std::string> e;
  return e;
}

}  // namespace

const std::vector<std::string>& Intent::entity(const std::string& name) const {
  auto it = entities.find(name);
  return it == entities.end() ? empty_list() : it->second;
}

std::string to_string(MatchConfidence c) {
  return c == MatchConfidence::kExact ? "exact" : "fuzzy_match";
}

NlqSchema NlqSchema::from_dataset(const Dataset& ds, std::size_t symbols) {
  NlqSchema s;
  std::set<std::string> seen;
  bool any_numeric = false;
  for (const auto& f : ds.features) {
    s.features.push_back(f.name);
    if (f.is_numeric()) {
      any_numeric = true;
      continue;
    }
    for (const auto& v : f.domain) {
      if (seen.insert(v).second) s.terms.push_back(v);
    }
  }
  if (any_numeric) {
    for (const auto& t : default_terms(symbols)) {
      if (seen.insert(t).second) s.terms.push_back(t);
    }
  }
  s.classes = ds.class_feature.domain;
  return s;
}

NlqSchema NlqSchema::from_kb(const KnowledgeBase& kb) {
  NlqSchema s;
  s.features = kb.feature_names;
  std::set<std::string> seen;
  for (const auto& vocab : kb.vocabularies) {
    for (const auto& t : vocab) {
      if (seen.insert(t).second) s.terms.push_back(t);
    }
  }
  s.classes = kb.class_domain;
  return s;
}

Grammar Grammar::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grammar file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Grammar Grammar::from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("grammar: ") + e.what(), e.byte);
  }
  Grammar g;
  try {
    g.version_ = j.at("version").get<int>();
    const auto& syn = j.at("synonyms");
    g.outcome_words_ = syn.at("outcome").get<std::vector<std::string>>();
    g.copulas_ = syn.at("copula").get<std::vector<std::string>>();
    g.stopwords_ = j.value("stopwords", std::vector<std::string>{});
    const json feature_aliases = j.value("feature_aliases", json::object());
    const json value_aliases = j.value("value_aliases", json::object());
    const json numbers = j.value("numbers", json::object());
    for (auto& [canon, aliases] : feature_aliases.items()) {
      for (const auto& a : aliases) g.feature_aliases_[canon].push_back(split_words(a.get<std::string>()));
    }
    for (auto& [canon, aliases] : value_aliases.items()) {
      for (const auto& a : aliases) g.value_aliases_[canon].push_back(split_words(a.get<std::string>()));
    }
    for (const auto& ij : j.at("intents")) {
      IntentRule rule;
      rule.name = ij.at("name").get<std::string>();
      rule.example = ij.value("example", "");
      rule.needs_schema = ij.value("needs_schema", false);
      for (const auto& pj : ij.at("patterns")) {
        std::vector<Group> pattern;
        for (const auto& gj : pj) {
          Group group;
          std::string alts = gj.get<std::string>();
          std::size_t start = 0;
          while (start <= alts.size()) {
            const auto bar = alts.find('|', start);
            const std::string alt = alts.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
            Phrase ph;
            std::istringstream words(alt);
            for (std::string w; words >> w;) {
              ph.words.push_back(w == "$outcome" ? w : text::to_lower(w));
            }
            if (!ph.words.empty()) group.alternatives.push_back(std::move(ph));
            if (bar == std::string::npos) break;
            start = bar + 1;
          }
          if (group.alternatives.empty()) throw ConfigError("empty phrase group in intent " + rule.name);
          pattern.push_back(std::move(group));
        }
        rule.patterns.push_back(std::move(pattern));
      }
      g.intents_.push_back(std::move(rule));
    }
    for (auto& [entity, cue] : numbers.items()) {
      g.numbers_.push_back({entity, cue.value("preceded_by", std::vector<std::string>{}),
                            cue.value("followed_by", std::vector<std::string>{})});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed grammar: ") + e.what());
  }
  if (g.intents_.empty()) throw ConfigError("grammar defines no intents");
  return g;
}

const Grammar& Grammar::builtin() {
  static const Grammar g = from_json(builtin_grammar_json());
  return g;
}

std::vector<std::string> Grammar::intent_names() const {
  std::vector<std::string> out;
  for (const auto& r : intents_) out.push_back(r.name);
  return out;
}

// One parse. Holds the token stream, which tokens have been explained, and the
// schema mentions found in it.
class NlqMatcher {
 public:
  enum class Kind { kFeature, kClass, kTerm };
  struct Mention {
    Kind kind;
    std::string canonical;
    std::size_t start;
    std::size_t len;
    bool aliased;
  };

  NlqMatcher(const Grammar& g, std::string_view text, const NlqSchema& schema)
      : g_(g), schema_(schema), tokens_(tokenize(text)), used_(tokens_.size(), false) {}

  ParseOutcome run() {
    ParseOutcome out;
    if (tokens_.empty()) return reject(out);
    find_mentions();
    const Grammar::IntentRule* matched = nullptr;
    for (const auto& rule : g_.intents_) {
      for (const auto& pattern : rule.patterns) {
        std::vector<std::size_t> hits;
        if (match_pattern(pattern, &hits)) {
          matched = &rule;
          for (auto h : hits) used_[h] = true;
          break;
        }
      }
      if (matched) break;
    }
    if (!matched) return reject(out);
    if (matched->needs_schema && schema_.empty()) {
      out.suggestion = suggestion_for("load_data");
      finish_unrecognized(out);
      return out;
    }
    Intent intent;
    intent.name = matched->name;
    extract(intent);
    out.intent = std::move(intent);
    out.confidence = fuzzy_ ? MatchConfidence::kFuzzyMatch : MatchConfidence::kExact;
    finish_unrecognized(out);
    return out;
  }

 private:
  bool word_matches(const std::string& pattern_word, const std::string& token) const {
    if (pattern_word == "$outcome") return contains(g_.outcome_words_, token);
    return pattern_word == token;
  }

  // Start positions of every occurrence of `words` in the token stream.
  std::vector<std::size_t> occurrences(const std::vector<std::string>& words) const {
    std::vector<std::size_t> out;
    if (words.empty() || words.size() > tokens_.size()) return out;
    for (std::size_t i = 0; i + words.size() <= tokens_.size(); ++i) {
      bool ok = true;
      for (std::size_t k = 0; k < words.size() && ok; ++k) ok = word_matches(words[k], tokens_[i + k]);
      if (ok) out.push_back(i);
    }
    return out;
  }

  bool match_group(const Grammar::Group& group, std::vector<std::size_t>* hits) const {
    for (const auto& alt : group.alternatives) {
      const auto occ = occurrences(alt.words);
      if (occ.empty()) continue;
      if (hits) {
        for (std::size_t k = 0; k < alt.words.size(); ++k) hits->push_back(occ.front() + k);
      }
      return true;
    }
    return false;
  }

  bool match_pattern(const std::vector<Grammar::Group>& pattern, std::vector<std::size_t>* hits) const {
    for (const auto& group : pattern) {
      if (!match_group(group, hits)) return false;
    }
    return true;
  }

  void add_candidates(Kind kind, const std::vector<std::string>& names,
                      const std::map<std::string, std::vector<std::vector<std::string>>>& aliases) {
    for (const auto& name : names) {
      for (auto& form : name_forms(name)) forms_.push_back({kind, name, std::move(form), false});
      for (const auto& [canon, alias_list] : aliases) {
        if (!text::iequals(canon, name)) continue;
        for (const auto& a : alias_list) forms_.push_back({kind, name, a, true});
      }
    }
  }

  void find_mentions() {
    add_candidates(Kind::kFeature, schema_.features, g_.feature_aliases_);
    add_candidates(Kind::kClass, schema_.classes, g_.value_aliases_);
    add_candidates(Kind::kTerm, schema_.terms, {});
    std::size_t i = 0;
    while (i < tokens_.size()) {
      const Form* best = nullptr;
      for (const auto& f : forms_) {
        const auto& w = f.words;
        if (w.empty() || i + w.size() > tokens_.size()) continue;
        if (!std::equal(w.begin(), w.end(), tokens_.begin() + static_cast<std::ptrdiff_t>(i))) continue;
        // Longest form wins; on equal length, features before classes before terms.
        if (!best || w.size() > best->words.size() ||
            (w.size() == best->words.size() && f.kind < best->kind)) {
          best = &f;
        }
      }
      if (!best) {
        ++i;
        continue;
      }
      mentions_.push_back({best->kind, best->canonical, i, best->words.size(), best->aliased});
      i += best->words.size();
    }
  }

  bool is_copula(std::size_t pos) const {
    return pos < tokens_.size() && contains(g_.copulas_, tokens_[pos]);
  }

  void use(const Mention& m) {
    for (std::size_t k = 0; k < m.len; ++k) used_[m.start + k] = true;
    if (m.aliased) fuzzy_ = true;
  }

  void push(Intent& intent, const std::string& entity, const std::string& value) {
    auto& v = intent.entities[entity];
    if (!contains(v, value)) v.push_back(value);
  }

  void extract(Intent& intent) {
    const std::string& name = intent.name;
    if (name == "load_data") {
      extract_dataset(intent);
    } else if (name == "plot_histogram" || name == "plot_correlation" || name == "bias") {
      for (const auto& m : mentions_) {
        if (m.kind != Kind::kFeature) continue;
        push(intent, "variable", m.canonical);
        use(m);
      }
    } else if (name == "run_full_query" || name == "run_cf_query") {
      extract_query(intent);
    }
    extract_numbers(intent);
  }

  void extract_dataset(Intent& intent) {
    static const std::vector<std::string> nouns = {"dataset", "data", "file", "set", "database"};
    std::optional<std::size_t> pick;
    // "<name> dataset" takes precedence over "load <name>".
    for (std::size_t i = 1; i < tokens_.size(); ++i) {
      if (!contains(nouns, tokens_[i])) continue;
      const auto& prev = tokens_[i - 1];
      if (!used_[i - 1] && !contains(g_.stopwords_, prev) && !contains(nouns, prev)) {
        pick = i - 1;
        break;
      }
    }
    if (!pick) {
      for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!used_[i]) continue;
        for (std::size_t k = i + 1; k < tokens_.size(); ++k) {
          if (used_[k] || contains(g_.stopwords_, tokens_[k]) || contains(nouns, tokens_[k])) continue;
          pick = k;
          break;
        }
        break;
      }
    }
    if (!pick) return;
    push(intent, "dataset", tokens_[*pick]);
    used_[*pick] = true;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (contains(nouns, tokens_[i])) used_[i] = true;
    }
  }

  void extract_query(Intent& intent) {
    std::vector<std::string> desired;
    std::vector<std::string> contrast;
    for (std::size_t k = 0; k < mentions_.size(); ++k) {
      const auto& m = mentions_[k];
      if (m.kind == Kind::kClass) {
        const std::size_t s = m.start;
        const bool after_instead = (s >= 2 && tokens_[s - 2] == "instead" && tokens_[s - 1] == "of") ||
                                   (s >= 2 && tokens_[s - 2] == "rather" && tokens_[s - 1] == "than");
        auto& dst = after_instead ? contrast : desired;
        if (!contains(dst, m.canonical)) dst.push_back(m.canonical);
        if (after_instead) used_[s - 1] = used_[s - 2] = true;
        use(m);
        continue;
      }
      if (m.kind != Kind::kFeature) continue;
      // "<feature> <copula> <term>" binds a known value; any other feature
      // mention asks for its value.
      const std::size_t after = m.start + m.len;
      if (is_copula(after) && k + 1 < mentions_.size() && mentions_[k + 1].kind == Kind::kTerm &&
          mentions_[k + 1].start == after + 1) {
        push(intent, "known_concept", m.canonical);
        intent.entities["value"].push_back(mentions_[k + 1].canonical);
        use(m);
        use(mentions_[k + 1]);
        used_[after] = true;
        ++k;
      } else {
        push(intent, "unknown_concept", m.canonical);
        use(m);
      }
    }
    for (const auto& c : desired) push(intent, "outcome", c);
    for (const auto& c : contrast) push(intent, "outcome", c);
  }

  void extract_numbers(Intent& intent) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!is_number(tokens_[i])) continue;
      used_[i] = true;
      for (const auto& cue : g_.numbers_) {
        bool hit = false;
        for (std::size_t d = 1; d <= 2 && !hit; ++d) {
          if (i >= d && contains(cue.preceded_by, tokens_[i - d])) {
            hit = true;
            used_[i - d] = true;
          }
          if (i + d < tokens_.size() && contains(cue.followed_by, tokens_[i + d])) {
            hit = true;
            used_[i + d] = true;
          }
        }
        if (hit && !intent.entities.count(cue.entity)) {
          intent.entities[cue.entity] = {tokens_[i]};
          break;
        }
      }
    }
  }

  std::optional<Suggestion> suggestion_for(const std::string& intent) const {
    for (const auto& r : g_.intents_) {
      if (r.name == intent) return Suggestion{r.name, r.example};
    }
    return std::nullopt;
  }

  // Intent whose patterns come closest: most phrase groups present, then the
  // smallest edit distance between any token and any phrase word.
  ParseOutcome reject(ParseOutcome& out) {
    const Grammar::IntentRule* best = nullptr;
    double best_frac = -1.0;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (const auto& rule : g_.intents_) {
      if (rule.needs_schema && schema_.empty()) continue;
      double frac = 0.0;
      std::size_t dist = std::numeric_limits<std::size_t>::max();
      for (const auto& pattern : rule.patterns) {
        std::size_t present = 0;
        for (const auto& group : pattern) {
          if (match_group(group, nullptr)) ++present;
          for (const auto& alt : group.alternatives) {
            for (const auto& w : alt.words) {
              for (const auto& t : tokens_) dist = std::min(dist, text::edit_distance(w, t));
            }
          }
        }
        frac = std::max(frac, static_cast<double>(present) / static_cast<double>(pattern.size()));
      }
      if (frac > best_frac || (frac == best_frac && dist < best_dist)) {
        best = &rule;
        best_frac = frac;
        best_dist = dist;
      }
    }
    if (best) out.suggestion = Suggestion{best->name, best->example};
    finish_unrecognized(out);
    return out;
  }

  void finish_unrecognized(ParseOutcome& out) const {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (used_[i]) continue;
      const auto& t = tokens_[i];
      if (contains(g_.stopwords_, t) || contains(g_.copulas_, t) || contains(g_.outcome_words_, t)) continue;
      bool mentioned = false;
      for (const auto& m : mentions_) mentioned = mentioned || (i >= m.start && i < m.start + m.len);
      if (!mentioned) out.unrecognized_tokens.push_back(t);
    }
  }

  struct Form {
    Kind kind;
    std::string canonical;
    std::vector<std::string> words;
    bool aliased;
  };

  const Grammar& g_;
  const NlqSchema& schema_;
  std::vector<std::string> tokens_;
  std::vector<bool> used_;
  std::vector<Form> forms_;
  std::vector<Mention> mentions_;
  bool fuzzy_ = false;
};

ParseOutcome Grammar::parse(std::string_view text, const NlqSchema& schema) const {
  return NlqMatcher(*this, text, schema).run();
}

ParseOutcome parse(std::string_view text, const NlqSchema& schema) {
  return Grammar::builtin().parse(text, schema);
}

}  // namespace fuzzex
