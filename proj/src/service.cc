#include "fuzzex/service.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "fuzzex/answers.h"
#include "fuzzex/dataset.h"
#include "fuzzex/eda.h"
#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"
#include "fuzzex/nlq_parser.h"
#include "fuzzex/pipeline.h"
#include "fuzzex/query_engine.h"
#include "fuzzex/rulebase.h"
#include "fuzzex/text_util.h"

namespace fuzzex {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Session {
  std::string id;
  std::mutex mu;

  std::string dataset_name;
  std::optional<Dataset> raw;
  std::optional<Dataset> prepared;
  std::optional<BaselineRun> baseline;
  std::optional<std::vector<Prediction>> predictions;
  std::string predictions_source;  // "baseline" or "upload"
  std::optional<KnowledgeBase> kb;
  std::size_t symbols = 5;
  QuerySession queries;
  json event_log = json::array();

  void reset_from_dataset() {
    baseline.reset();
    predictions.reset();
    predictions_source.clear();
    reset_from_predictions();
  }
  void reset_from_predictions() {
    kb.reset();
    queries.clear();
  }
};

namespace {

// ---- argument helpers -------------------------------------------------------

template <typename T>
T arg(const json& args, const char* key, T fallback) {
  if (!args.is_object() || !args.contains(key) || args[key].is_null()) return fallback;
  try {
    return args[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("argument '") + key + "' has the wrong type");
  }
}

std::string required_string(const json& args, const char* key) {
  const auto v = arg<std::string>(args, key, "");
  if (v.empty()) throw ValidationError(std::string("argument '") + key + "' is required");
  return v;
}

std::size_t to_count(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string(what) + " must be a whole number, got '" + s + "'");
  }
}

// ---- stage guards -----------------------------------------------------------

const Dataset& need_dataset(const Session& s) {
  if (!s.prepared) throw ConflictError("no dataset is loaded; load a dataset first");
  return *s.prepared;
}

const KnowledgeBase& need_kb(const Session& s) {
  need_dataset(s);
  if (!s.kb) throw ConflictError("the explanation module has not been built yet; build the knowledge base first");
  return *s.kb;
}

// ---- JSON views -------------------------------------------------------------

json rule_json(const FuzzyRule& r, const std::vector<std::string>& names) {
  json ante = json::array();
  for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
    ante.push_back({{"feature", i < names.size() ? names[i] : ""},
                    {"term", r.antecedent[i].term},
                    {"confidence", r.antecedent[i].confidence}});
  }
  return {{"id", r.id},
          {"antecedent", ante},
          {"class", r.class_label},
          {"class_confidence", r.class_confidence},
          {"rule_confidence", r.rule_confidence}};
}

json query_result_json(const QueryResult& r) {
  json sols = json::array();
  for (const auto& s : r.solutions) {
    json b = json::array();
    for (const auto& x : s.bindings) {
      b.push_back({{"feature", x.feature}, {"term", x.value.term}, {"confidence", x.value.confidence}});
    }
    sols.push_back({{"rule_id", s.rule_id}, {"rule_confidence", s.rule_confidence}, {"bindings", b}});
  }
  json out = {{"solutions", sols}, {"total_matches", r.total_matches}, {"relaxed_known", r.relaxed_known}};
  out["nearest"] = r.nearest ? json{{"rule_id", r.nearest->rule_id},
                                    {"mismatched_bindings", r.nearest->mismatched_bindings}}
                             : json(nullptr);
  return out;
}

Query query_from_json(const json& args, QueryKind kind) {
  if (!args.is_object()) throw ValidationError("query must be a JSON object");
  Query q;
  q.kind = kind;
  q.desired_class = required_string(args, "desired_class");
  if (args.contains("contrast_class") && !args["contrast_class"].is_null()) {
    q.contrast_class = arg<std::string>(args, "contrast_class", "");
  }
  if (kind == QueryKind::kCounterfactual && !q.contrast_class) {
    throw ValidationError("a counterfactual query needs contrast_class");
  }
  const json known = args.value("known", json::array());
  if (known.is_object()) {
    for (const auto& [f, t] : known.items()) {
      if (!t.is_string()) throw ValidationError("known terms must be strings");
      q.known.emplace_back(f, t.get<std::string>());
    }
  } else if (known.is_array()) {
    for (const auto& kv : known) {
      if (!kv.is_object() || !kv.contains("feature") || !kv.contains("term")) {
        throw ValidationError("known entries need 'feature' and 'term'");
      }
      q.known.emplace_back(kv["feature"].get<std::string>(), kv["term"].get<std::string>());
    }
  } else {
    throw ValidationError("'known' must be an object or an array");
  }
  q.unknowns = arg<std::vector<std::string>>(args, "unknowns", {});
  if (args.contains("constraints")) {
    const auto& c = args["constraints"];
    q.constraints.min_term_confidence = arg<double>(c, "min_term_confidence", 0.0);
    q.constraints.min_rule_confidence = arg<double>(c, "min_rule_confidence", 0.0);
    q.constraints.excluded_terms =
        arg<std::map<std::string, std::set<std::string>>>(c, "excluded_terms", {});
  }
  const auto max = arg<long long>(args, "max_solutions", 3);
  if (max < 0) throw ValidationError("max_solutions must be >= 0");
  q.max_solutions = static_cast<std::size_t>(max);
  return q;
}

json histogram_json(const Histogram& h) {
  return {{"feature", h.feature}, {"edges", h.edges}, {"counts", h.counts}};
}

json correlation_json(const Correlation& c) {
  return {{"feature_a", c.feature_a}, {"feature_b", c.feature_b}, {"r", c.r},
          {"p_value", c.p_value},     {"n", c.n},                 {"x", c.x},
          {"y", c.y}};
}

json matrix_json(const CorrelationMatrix& m) { return {{"features", m.features}, {"r", m.r}}; }

json baseline_json(const BaselineRun& b, const Dataset& ds) {
  return {{"k", b.k},
          {"train_fraction", b.split.train_fraction},
          {"seed", b.split.seed},
          {"train_rows", b.train_rows},
          {"test_rows", b.test_rows},
          {"test_accuracy", b.test_accuracy},
          {"classes", ds.class_feature.domain},
          {"confusion", b.confusion}};
}

bool valid_dataset_name(const std::string& name) {
  return !name.empty() && name.size() <= 64 && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string new_token() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 2; ++i) {
    auto v = rng();
    for (int k = 0; k < 16; ++k, v >>= 4) out.push_back(hex[v & 15]);
  }
  return out;
}

// ---- operations -------------------------------------------------------------

struct Ops {
  const ServiceOptions& options;
  Session& s;

  json load_dataset(const json& args) {
    Dataset raw;
    std::string name = arg<std::string>(args, "name", "");
    if (args.is_object() && args.contains("arff")) {
      raw = parse_arff_text(required_string(args, "arff"));
      if (name.empty()) name = raw.relation_name;
    } else {
      if (!valid_dataset_name(name)) throw ValidationError("dataset name must be [A-Za-z0-9_-]+");
      const fs::path path = fs::path(options.data_dir) / (text::to_lower(name) + ".arff");
      if (!fs::exists(path)) throw IoError("no dataset named '" + name + "' in the data folder");
      raw = load_arff(path.string());
    }
    Dataset prepared = prepare(raw);
    s.dataset_name = name;
    s.raw = std::move(raw);
    s.prepared = std::move(prepared);
    s.reset_from_dataset();
    json features = json::array();
    for (const auto& f : s.prepared->features) {
      features.push_back({{"name", f.name}, {"kind", f.is_numeric() ? "numeric" : "nominal"}, {"domain", f.domain}});
    }
    return {{"dataset", name},
            {"instances", s.prepared->size()},
            {"features", features},
            {"classes", s.prepared->class_feature.domain},
            {"warnings", s.prepared->warnings}};
  }

  json stats(const json&) {
    const Dataset& ds = need_dataset(s);
    std::vector<std::string> names;
    for (const auto& f : ds.features) names.push_back(f.name);
    std::vector<std::size_t> counts(ds.class_feature.domain.size(), 0);
    for (auto l : ds.labels) counts[l]++;
    json cls = json::object();
    for (std::size_t c = 0; c < counts.size(); ++c) cls[ds.class_feature.domain[c]] = counts[c];
    std::size_t missing = 0;
    for (const auto& row : s.raw->missing) missing += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
    return {{"dataset", s.dataset_name}, {"features", names}, {"instances", ds.size()},
            {"class_counts", cls},       {"missing_cells", missing}};
  }

  json ingest_predictions(const json& args) {
    const Dataset& ds = need_dataset(s);
    std::istringstream in(required_string(args, "csv"));
    auto ps = fuzzex::ingest_predictions(ds, in);
    s.reset_from_predictions();
    s.baseline.reset();
    s.predictions = std::move(ps.predictions);
    s.predictions_source = "upload";
    return {{"count", s.predictions->size()}, {"warnings", ps.warnings}};
  }

  json train(const json& args) {
    const Dataset& ds = need_dataset(s);
    SplitConfig cfg;
    cfg.train_fraction = arg<double>(args, "train_fraction", cfg.train_fraction);
    cfg.seed = arg<std::uint64_t>(args, "seed", cfg.seed);
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
      throw ValidationError("train_fraction must lie in (0, 1)");
    }
    const auto k = arg<long long>(args, "k", 5);
    if (k < 1) throw ValidationError("k must be >= 1");
    auto run = train_baseline(ds, cfg, static_cast<std::size_t>(k));
    s.reset_from_predictions();
    s.predictions = run.predictions;
    s.predictions_source = "baseline";
    s.baseline = std::move(run);
    return baseline_json(*s.baseline, ds);
  }

  json split_info(const json&) {
    const Dataset& ds = need_dataset(s);
    if (!s.baseline) throw ConflictError("the classifier has not been trained yet; train the model first");
    return baseline_json(*s.baseline, ds);
  }

  json build(const json& args) {
    const Dataset& ds = need_dataset(s);
    if (!s.predictions) {
      throw ConflictError("building the explanation module needs predictions; train the model or upload predictions first");
    }
    FcmConfig fcm;
    const auto symbols = arg<long long>(args, "symbols", static_cast<long long>(s.symbols));
    if (symbols < 2 || symbols > 11) throw ValidationError("symbols must lie in 2..11");
    fcm.c = static_cast<std::size_t>(symbols);
    fcm.m = arg<double>(args, "m", fcm.m);
    ScoringConfig sc;
    sc.implicator = implicator_from_string(arg<std::string>(args, "implicator", to_string(sc.implicator)));
    sc.distance = distance_from_string(arg<std::string>(args, "distance", to_string(sc.distance)));
    sc.lambda = arg<double>(args, "lambda", sc.lambda);
    // Built off to the side and swapped in whole.
    KnowledgeBase kb = build_kb(ds, *s.predictions, fcm, sc);
    const KbSummary sum = summarize(kb);
    s.kb = std::move(kb);
    s.symbols = fcm.c;
    s.queries.clear();
    json out = json::parse(summary_to_json(sum));
    out["features"] = s.kb->feature_names;
    out["vocabularies"] = s.kb->vocabularies;
    out["classes"] = s.kb->class_domain;
    out["symbols"] = fcm.c;
    out["scoring"] = {{"implicator", to_string(sc.implicator)},
                      {"distance", to_string(sc.distance)},
                      {"lambda", sc.lambda}};
    return out;
  }

  json export_kb(const json& args) {
    const KnowledgeBase& kb = need_kb(s);
    const auto format = text::to_lower(arg<std::string>(args, "format", "prolog"));
    if (format == "prolog") return {{"format", "prolog"}, {"content", to_prolog(kb)}};
    if (format == "json") return {{"format", "json"}, {"content", json::parse(kb_to_json(kb))}};
    throw ValidationError("format must be 'prolog' or 'json'");
  }

  json query(const json& args, QueryKind kind) {
    const KnowledgeBase& kb = need_kb(s);
    const Query q = query_from_json(args, kind);
    const QueryResult r = resolve(kb, q);
    s.queries.record(canonicalize(kb, q), r);
    return query_result_json(r);
  }

  json closest(const json& args) {
    const KnowledgeBase& kb = need_kb(s);
    std::size_t ref = 0;
    if (args.is_object() && args.contains("rule_id") && !args["rule_id"].is_null()) {
      const auto id = arg<long long>(args, "rule_id", -1);
      if (id < 0 || static_cast<std::size_t>(id) >= kb.size()) throw ValidationError("rule_id out of range");
      ref = static_cast<std::size_t>(id);
    } else {
      const auto ctx = s.queries.last_query_context();
      if (!ctx || !ctx->source_rule) throw ConflictError("there is no previous query result to compare with; run a query first");
      ref = *ctx->source_rule;
    }
    const FuzzyRule& reference = kb.rule(ref);
    const FuzzyRule& best = closest_rule(kb, reference);
    return {{"reference_rule_id", ref},
            {"distance", rule_distance(reference, best, kb.scoring.distance)},
            {"rule", rule_json(best, kb.feature_names)}};
  }

  json complexity_op(const json&) { return {{"complexity", complexity(need_kb(s))}}; }

  json bias(const json& args) {
    const KnowledgeBase& kb = need_kb(s);
    const auto feature = required_string(args, "feature");
    const auto f = kb.find_feature(feature);
    if (!f) throw DomainError("unknown feature '" + feature + "'");
    return {{"feature", kb.feature_names[*f]}, {"bias", bias_proxy(kb, feature, kb.scoring)}};
  }

  json top(const json& args) {
    const KnowledgeBase& kb = need_kb(s);
    const auto n = arg<long long>(args, "n", 3);
    if (n < 1) throw ValidationError("n must be >= 1");
    const auto t = top_rules(kb, static_cast<std::size_t>(n));
    json rules = json::array();
    for (const auto& r : t.rules) rules.push_back(rule_json(r, kb.feature_names));
    return {{"rules", rules}, {"warnings", t.warnings}};
  }

  json histogram_op(const json& args) {
    const auto bins = arg<long long>(args, "bins", 10);
    if (bins < 1 || bins > 1000) throw ValidationError("bins must lie in 1..1000");
    return histogram_json(histogram(need_dataset(s), required_string(args, "feature"), static_cast<std::size_t>(bins)));
  }

  json correlation_op(const json& args) {
    return correlation_json(correlation(need_dataset(s), required_string(args, "a"), required_string(args, "b")));
  }

  json matrix_op(const json&) { return matrix_json(correlation_matrix(need_dataset(s))); }

  json state(const json&) {
    std::string stage = "empty";
    if (s.prepared) stage = "loaded";
    if (s.predictions) stage = "predicted";
    if (s.kb) stage = "built";
    json out = {{"session_id", s.id}, {"stage", stage}, {"symbols", s.symbols}, {"events", s.event_log.size()}};
    if (s.prepared) {
      out["dataset"] = s.dataset_name;
      out["instances"] = s.prepared->size();
    }
    if (s.predictions) out["predictions_source"] = s.predictions_source;
    if (s.kb) {
      out["rules"] = s.kb->size();
      out["scoring"] = {{"implicator", to_string(s.kb->scoring.implicator)},
                        {"distance", to_string(s.kb->scoring.distance)},
                        {"lambda", s.kb->scoring.lambda}};
    }
    return out;
  }

  json events(const json&) { return {{"events", s.event_log}}; }

  // ---- natural language -----------------------------------------------------

  NlqSchema schema() const {
    if (s.kb) return NlqSchema::from_kb(*s.kb);
    if (s.prepared) return NlqSchema::from_dataset(*s.prepared, s.symbols);
    return {};
  }

  struct Reply {
    std::string text;
    json attachments = json::array();
  };

  Reply answer(const Intent& in) {
    const auto& name = in.name;
    auto first = [&](const char* entity) -> std::optional<std::string> {
      const auto& v = in.entity(entity);
      return v.empty() ? std::nullopt : std::optional<std::string>(v.front());
    };
    Reply r;
    if (name == "help") {
      r.text = render_answer(in, HelpAnswer{});
    } else if (name == "load_data") {
      const auto ds = first("dataset");
      if (!ds) throw ValidationError("which dataset should I load?");
      const json out = load_dataset({{"name", *ds}});
      r.text = render_answer(in, LoadAnswer{out["dataset"], out["instances"], s.prepared->feature_count()});
    } else if (name == "data_stats") {
      const json out = stats({});
      r.text = render_answer(in, StatsAnswer{out["features"], out["instances"]});
    } else if (name == "plot_histogram") {
      const auto f = first("variable");
      if (!f) throw ValidationError("which feature should I plot?");
      const json out = histogram_op({{"feature", *f}});
      r.text = render_answer(in, HistogramAnswer{out["feature"]});
      r.attachments.push_back({{"type", "histogram"}, {"data", out}});
    } else if (name == "plot_correlation") {
      const auto& v = in.entity("variable");
      if (v.size() < 2) throw ValidationError("name two numeric features to correlate");
      const json out = correlation_op({{"a", v[0]}, {"b", v[1]}});
      r.text = render_answer(in, CorrelationAnswer{out["feature_a"], out["feature_b"], out["r"], out["p_value"]});
      r.attachments.push_back({{"type", "scatter"}, {"data", out}});
    } else if (name == "correlation_matrix") {
      const json out = matrix_op({});
      r.text = render_answer(in, CorrelationMatrixAnswer{out["features"].size()});
      r.attachments.push_back({{"type", "heatmap"}, {"data", out}});
    } else if (name == "train_model") {
      TrainAnswer a;
      a.max_depth = first("max_depth");
      a.n_estimators = first("n_estimators");
      json targs = json::object();
      if (a.max_depth) targs["k"] = to_count(*a.max_depth, "max_depth");
      const json out = train(targs);
      a.k = out["k"];
      a.test_accuracy = out["test_accuracy"];
      r.text = render_answer(in, a);
      r.attachments.push_back({{"type", "table"}, {"data", out}});
    } else if (name == "train_test_samples") {
      const json out = split_info({});
      r.text = render_answer(in, SplitAnswer{out["train_fraction"], out["train_rows"], out["test_rows"]});
    } else if (name == "train_explanation_module") {
      const json out = build({});
      r.text = render_answer(in, BuildAnswer{out["features"], out["classes"], out["rules"], out["symbols"]});
      std::string excerpt;
      for (std::size_t i = 0; i < std::min<std::size_t>(5, s.kb->size()); ++i) {
        excerpt += prolog_clause(s.kb->rules[i]) + "\n";
      }
      r.attachments.push_back({{"type", "kb_excerpt"}, {"data", excerpt}});
    } else if (name == "problem_complexity") {
      r.text = render_answer(in, ComplexityAnswer{complexity_op({})["complexity"]});
    } else if (name == "bias") {
      const auto f = first("variable");
      if (!f) throw ValidationError("which feature should I assess for bias?");
      const json out = bias({{"feature", *f}});
      r.text = render_answer(in, BiasAnswer{out["feature"], out["bias"]});
    } else if (name == "top_rules_kb") {
      const auto n = first("top_n");
      const json out = top({{"n", n ? to_count(*n, "top_n") : 3}});
      const auto& kb = *s.kb;
      TopRulesAnswer a;
      a.feature_names = kb.feature_names;
      for (const auto& rj : out["rules"]) a.rules.push_back(kb.rule(rj["id"].get<std::size_t>()));
      r.text = render_answer(in, a);
      r.attachments.push_back({{"type", "rules"}, {"data", out["rules"]}});
    } else if (name == "run_full_query" || name == "run_cf_query") {
      const bool cf = name == "run_cf_query";
      const auto& outcome = in.entity("outcome");
      if (outcome.empty()) throw ValidationError("which outcome should the rules lead to?");
      json q = {{"desired_class", outcome[0]}, {"unknowns", in.entity("unknown_concept")}};
      json known = json::array();
      const auto& kc = in.entity("known_concept");
      const auto& vals = in.entity("value");
      for (std::size_t i = 0; i < kc.size() && i < vals.size(); ++i) {
        known.push_back({{"feature", kc[i]}, {"term", vals[i]}});
      }
      q["known"] = known;
      if (outcome.size() > 1) q["contrast_class"] = outcome[1];
      const QueryKind kind = cf && outcome.size() > 1 ? QueryKind::kCounterfactual : QueryKind::kWhatIf;
      const json out = query(q, kind);
      r.text = render_answer(in, QueryAnswer{cf ? QueryKind::kCounterfactual : QueryKind::kWhatIf,
                                             s.queries.last_query_context()->result});
      r.attachments.push_back({{"type", "query_result"}, {"data", out}});
    } else if (name == "closest_instance") {
      const json out = closest({});
      const auto& kb = *s.kb;
      r.text = render_answer(in, ClosestAnswer{kb.rule(out["rule"]["id"].get<std::size_t>()), kb.feature_names});
      r.attachments.push_back({{"type", "rules"}, {"data", json::array({out["rule"]})}});
    } else {
      throw ValidationError("intent '" + name + "' has no handler");
    }
    return r;
  }

  json message(const json& args) {
    const std::string text = required_string(args, "text");
    s.event_log.push_back({{"role", "user"}, {"text", text}});
    const ParseOutcome parsed = parse(text, schema());
    json out = {{"confidence", to_string(parsed.confidence)}, {"unrecognized_tokens", parsed.unrecognized_tokens}};
    if (!parsed.accepted()) {
      out["intent"] = nullptr;
      out["reply_text"] = s.prepared || !parsed.suggestion || parsed.suggestion->intent != "load_data"
                              ? render_rejection(parsed)
                              : "Please load a dataset first, for example: \"Load the diabetes dataset\".";
      out["attachments"] = json::array();
      out["suggestion"] = parsed.suggestion ? json{{"intent", parsed.suggestion->intent},
                                                   {"example", parsed.suggestion->example}}
                                            : json(nullptr);
    } else {
      out["intent"] = parsed.intent->name;
      out["entities"] = parsed.intent->entities;
      try {
        Reply r = answer(*parsed.intent);
        out["reply_text"] = r.text;
        out["attachments"] = r.attachments;
      } catch (const ConflictError& e) {
        out["reply_text"] = std::string("I cannot do that yet: ") + e.what() + ".";
        out["attachments"] = json::array();
        out["error"] = {{"kind", "conflict"}, {"message", e.what()}};
      } catch (const IoError& e) {
        out["reply_text"] = std::string("I could not find that: ") + e.what() + ".";
        out["attachments"] = json::array();
        out["error"] = {{"kind", "not_found"}, {"message", e.what()}};
      } catch (const Error& e) {
        out["reply_text"] = std::string("I could not run that request: ") + e.what() + ".";
        out["attachments"] = json::array();
        out["error"] = {{"kind", "validation"}, {"message", e.what()}};
      }
    }
    s.event_log.push_back({{"role", "bot"}, {"text", out["reply_text"]}});
    return out;
  }

  json dispatch(const std::string& op, const json& args) {
    if (op == "state") return state(args);
    if (op == "events") return events(args);
    if (op == "message") return message(args);
    json out;
    if (op == "load_dataset") out = load_dataset(args);
    else if (op == "stats") out = stats(args);
    else if (op == "ingest_predictions") out = ingest_predictions(args);
    else if (op == "train") out = train(args);
    else if (op == "split") out = split_info(args);
    else if (op == "build") out = build(args);
    else if (op == "export_kb") out = export_kb(args);
    else if (op == "what_if") out = query(args, QueryKind::kWhatIf);
    else if (op == "counterfactual") out = query(args, QueryKind::kCounterfactual);
    else if (op == "closest") out = closest(args);
    else if (op == "complexity") out = complexity_op(args);
    else if (op == "bias") out = bias(args);
    else if (op == "top_rules") out = top(args);
    else if (op == "histogram") out = histogram_op(args);
    else if (op == "correlation") out = correlation_op(args);
    else if (op == "correlation_matrix") out = matrix_op(args);
    else throw std::out_of_range(op);
    s.event_log.push_back({{"op", op}});
    return out;
  }
};

bool mutates(const std::string& op) {
  static const std::vector<std::string> ops = {"message", "load_dataset", "ingest_predictions", "train",
                                               "build",   "what_if",      "counterfactual"};
  return std::find(ops.begin(), ops.end(), op) != ops.end();
}

ApiResponse error_response(int status, const char* kind, const std::string& message) {
  return {status, {{"error", {{"kind", kind}, {"message", message}}}}};
}

}  // namespace

const std::vector<std::string>& Service::operations() {
  static const std::vector<std::string> ops = {
      "state",   "events",         "message",     "load_dataset", "stats",      "ingest_predictions",
      "train",   "split",          "build",       "export_kb",    "what_if",    "counterfactual",
      "closest", "complexity",     "bias",        "top_rules",    "histogram",  "correlation",
      "correlation_matrix"};
  return ops;
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.default_symbols < 2 || options_.default_symbols > 11) {
    throw ConfigError("default symbols must lie in 2..11");
  }
  if (!options_.persist_dir.empty()) restore();
}

Service::~Service() = default;

std::string Service::create_session() {
  auto s = std::make_shared<Session>();
  s->id = new_token();
  s->symbols = options_.default_symbols;
  std::lock_guard lock(mu_);
  sessions_[s->id] = s;
  return s->id;
}

bool Service::delete_session(const std::string& id) {
  std::lock_guard lock(mu_);
  const bool erased = sessions_.erase(id) > 0;
  if (erased && !options_.persist_dir.empty()) {
    std::error_code ec;
    fs::remove(fs::path(options_.persist_dir) / (id + ".json"), ec);
  }
  return erased;
}

std::vector<std::string> Service::session_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ApiResponse Service::call(const std::string& session_id, const std::string& op, const json& args) {
  auto session = find(session_id);
  if (!session) return error_response(404, "not_found", "unknown session '" + session_id + "'");
  std::lock_guard lock(session->mu);
  Ops ops{options_, *session};
  try {
    ApiResponse r{200, ops.dispatch(op, args)};
    if (mutates(op) && !options_.persist_dir.empty()) persist(*session);
    return r;
  } catch (const std::out_of_range&) {
    return error_response(404, "not_found", "unknown operation '" + op + "'");
  } catch (const ConflictError& e) {
    return error_response(409, "conflict", e.what());
  } catch (const IoError& e) {
    return error_response(404, "not_found", e.what());
  } catch (const Error& e) {
    return error_response(400, "validation", e.what());
  } catch (const json::exception& e) {
    return error_response(400, "validation", e.what());
  }
}

// Snapshot layout: {id, dataset_name, arff, symbols, predictions, predictions_source,
// baseline, kb, event_log}. The dataset is stored as ARFF text so a restore does
// not depend on the data folder.
void Service::persist(const Session& s) const {
  json snap = {{"id", s.id}, {"symbols", s.symbols}, {"event_log", s.event_log}};
  if (s.raw) {
    snap["dataset_name"] = s.dataset_name;
    snap["arff"] = to_arff(*s.raw);
  }
  if (s.predictions) {
    std::ostringstream csv;
    write_predictions(*s.predictions, csv);
    snap["predictions"] = csv.str();
    snap["predictions_source"] = s.predictions_source;
  }
  if (s.baseline) {
    snap["baseline"] = {{"k", s.baseline->k},
                        {"train_fraction", s.baseline->split.train_fraction},
                        {"seed", s.baseline->split.seed}};
  }
  if (s.kb) snap["kb"] = json::parse(kb_to_json(*s.kb));
  fs::create_directories(options_.persist_dir);
  const fs::path final_path = fs::path(options_.persist_dir) / (s.id + ".json");
  const fs::path tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write session snapshot '" + tmp.string() + "'");
    out << snap.dump();
  }
  fs::rename(tmp, final_path);
}

void Service::restore() {
  std::error_code ec;
  if (!fs::is_directory(options_.persist_dir, ec)) return;
  for (const auto& entry : fs::directory_iterator(options_.persist_dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    json snap;
    try {
      snap = json::parse(in);
      auto s = std::make_shared<Session>();
      s->id = snap.at("id").get<std::string>();
      s->symbols = snap.value("symbols", options_.default_symbols);
      s->event_log = snap.value("event_log", json::array());
      if (snap.contains("arff")) {
        s->dataset_name = snap.value("dataset_name", "");
        s->raw = parse_arff_text(snap["arff"].get<std::string>());
        s->prepared = prepare(*s->raw);
      }
      if (snap.contains("baseline") && s->prepared) {
        const auto& b = snap["baseline"];
        SplitConfig cfg{b.at("train_fraction").get<double>(), b.at("seed").get<std::uint64_t>()};
        s->baseline = train_baseline(*s->prepared, cfg, b.at("k").get<std::size_t>());
      }
      if (snap.contains("predictions") && s->prepared) {
        std::istringstream csv(snap["predictions"].get<std::string>());
        s->predictions = ingest_predictions(*s->prepared, csv).predictions;
        s->predictions_source = snap.value("predictions_source", "upload");
      }
      if (snap.contains("kb")) s->kb = kb_from_json(snap["kb"].dump());
      sessions_[s->id] = s;
    } catch (const std::exception&) {
      // A damaged snapshot is skipped rather than blocking start-up.
      continue;
    }
  }
}

}  // namespace fuzzex
