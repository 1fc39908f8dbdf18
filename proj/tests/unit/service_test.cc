#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fuzzex/dataset.h"
#include "fuzzex/eda.h"
#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"
#include "fuzzex/pipeline.h"
#include "fuzzex/query_engine.h"
#include "fuzzex/service.h"
#include "json.hpp"

using namespace fuzzex;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ServiceOptions options(const std::string& persist = "") {
  ServiceOptions o;
  o.data_dir = FUZZEX_DATA_DIR;
  o.persist_dir = persist;
  return o;
}

fs::path temp_dir(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("fuzzex_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::create_directories(p);
  return p;
}

std::string kind(const ApiResponse& r) { return r.body.at("error").at("kind"); }

// Same steps the service runs with default arguments.
struct Direct {
  Dataset prepared = prepare(load_arff(std::string(FUZZEX_DATA_DIR) + "/diabetes.arff"));
  BaselineRun baseline = train_baseline(prepared, SplitConfig{}, 5);
  KnowledgeBase kb = build_kb(prepared, baseline.predictions, FcmConfig{}, ScoringConfig{});
};

const Direct& direct() {
  static const Direct d;
  return d;
}

std::string built_session(Service& svc) {
  const auto id = svc.create_session();
  EXPECT_EQ(svc.call(id, "load_dataset", {{"name", "diabetes"}}).status, 200);
  EXPECT_EQ(svc.call(id, "train", json::object()).status, 200);
  EXPECT_EQ(svc.call(id, "build", json::object()).status, 200);
  return id;
}

}  // namespace

TEST(Service, StageOrderAndStatusCodes) {
  Service svc(options());
  const auto id = svc.create_session();
  EXPECT_EQ(svc.call("deadbeef", "state", {}).status, 404);
  EXPECT_EQ(svc.call(id, "frobnicate", {}).status, 404);
  EXPECT_EQ(svc.call(id, "state", {}).body.at("stage"), "empty");

  for (const char* op : {"stats", "train", "build", "what_if", "complexity", "histogram"}) {
    const auto r = svc.call(id, op, {{"feature", "age"}});
    EXPECT_EQ(r.status, 409) << op;
    EXPECT_EQ(kind(r), "conflict") << op;
  }
  EXPECT_EQ(svc.call(id, "load_dataset", {{"name", "../etc/passwd"}}).status, 400);
  EXPECT_EQ(svc.call(id, "load_dataset", {{"name", "nope"}}).status, 404);

  const auto load = svc.call(id, "load_dataset", {{"name", "diabetes"}});
  ASSERT_EQ(load.status, 200);
  EXPECT_EQ(load.body.at("instances"), 768);
  EXPECT_EQ(load.body.at("features").size(), 8u);
  EXPECT_EQ(svc.call(id, "build", {}).status, 409);
  EXPECT_EQ(svc.call(id, "split", {}).status, 409);
  EXPECT_EQ(svc.call(id, "train", {{"train_fraction", 1.5}}).status, 400);
  EXPECT_EQ(svc.call(id, "train", {{"k", "five"}}).status, 400);

  const auto train = svc.call(id, "train", {});
  ASSERT_EQ(train.status, 200);
  EXPECT_EQ(train.body.at("train_rows"), 614);
  EXPECT_EQ(train.body.at("test_rows"), 154);
  EXPECT_EQ(svc.call(id, "what_if", {{"desired_class", "tested_negative"}}).status, 409);
  EXPECT_EQ(svc.call(id, "build", {{"symbols", 12}}).status, 400);
  EXPECT_EQ(svc.call(id, "build", {{"implicator", "kleene"}}).status, 400);

  const auto build = svc.call(id, "build", {});
  ASSERT_EQ(build.status, 200);
  EXPECT_EQ(build.body.at("rules"), 768);
  EXPECT_EQ(svc.call(id, "state", {}).body.at("stage"), "built");
  EXPECT_EQ(svc.call(id, "closest", {}).status, 409);
  EXPECT_EQ(svc.call(id, "counterfactual", {{"desired_class", "tested_negative"}}).status, 400);
  EXPECT_EQ(svc.call(id, "bias", {{"feature", "shoe_size"}}).status, 400);

  // A new dataset drops everything built on the old one.
  ASSERT_EQ(svc.call(id, "load_dataset", {{"name", "wine"}}).status, 200);
  EXPECT_EQ(svc.call(id, "state", {}).body.at("stage"), "loaded");
  EXPECT_EQ(svc.call(id, "complexity", {}).status, 409);

  EXPECT_TRUE(svc.delete_session(id));
  EXPECT_FALSE(svc.delete_session(id));
  EXPECT_EQ(svc.call(id, "state", {}).status, 404);
}

TEST(Service, OperationsMatchLibraryCalls) {
  Service svc(options());
  const auto id = built_session(svc);
  const auto& d = direct();

  EXPECT_EQ(svc.call(id, "complexity", {}).body.at("complexity").get<double>(), complexity(d.kb));
  EXPECT_EQ(svc.call(id, "bias", {{"feature", "Age"}}).body.at("bias").get<double>(),
            bias_proxy(d.kb, "age", d.kb.scoring));

  const auto top = svc.call(id, "top_rules", {{"n", 4}}).body.at("rules");
  const auto expected = top_rules(d.kb, 4).rules;
  ASSERT_EQ(top.size(), expected.size());
  for (std::size_t i = 0; i < top.size(); ++i) EXPECT_EQ(top[i].at("id").get<std::size_t>(), expected[i].id);

  Query q;
  q.desired_class = "tested_negative";
  q.known = {{"preg", "very_low"}, {"plas", "low"}};
  q.unknowns = {"age"};
  const auto want = resolve(d.kb, q);
  const auto got = svc.call(id, "what_if",
                            {{"desired_class", "tested_negative"},
                             {"known", {{"preg", "very_low"}, {"plas", "low"}}},
                             {"unknowns", {"age"}}});
  ASSERT_EQ(got.status, 200);
  ASSERT_EQ(got.body.at("solutions").size(), want.solutions.size());
  EXPECT_EQ(got.body.at("total_matches").get<std::size_t>(), want.total_matches);
  for (std::size_t i = 0; i < want.solutions.size(); ++i) {
    const auto& s = got.body["solutions"][i];
    EXPECT_EQ(s.at("rule_id").get<std::size_t>(), want.solutions[i].rule_id);
    EXPECT_EQ(s.at("bindings")[0].at("term"), want.solutions[i].bindings[0].value.term);
  }

  // closest now refers back to the first solution of the last query.
  const auto closest = svc.call(id, "closest", {});
  ASSERT_EQ(closest.status, 200);
  if (!want.solutions.empty()) {
    const auto& ref = d.kb.rule(want.solutions[0].rule_id);
    EXPECT_EQ(closest.body.at("rule").at("id").get<std::size_t>(), closest_rule(d.kb, ref).id);
  }
  EXPECT_EQ(svc.call(id, "closest", {{"rule_id", 100000}}).status, 400);

  const auto corr = svc.call(id, "correlation", {{"a", "age"}, {"b", "pres"}}).body;
  EXPECT_EQ(corr.at("r").get<double>(), correlation(d.prepared, "age", "pres").r);

  const auto pl = svc.call(id, "export_kb", {{"format", "prolog"}}).body.at("content").get<std::string>();
  EXPECT_EQ(pl, to_prolog(d.kb));
  EXPECT_EQ(svc.call(id, "export_kb", {{"format", "yaml"}}).status, 400);
}

TEST(Service, UploadedPredictionsReplaceTheBaseline) {
  Service svc(options());
  const auto id = svc.create_session();
  ASSERT_EQ(svc.call(id, "load_dataset", {{"name", "diabetes"}}).status, 200);
  std::ostringstream csv;
  write_predictions(labels_as_predictions(direct().prepared), csv);
  const auto up = svc.call(id, "ingest_predictions", {{"csv", csv.str()}});
  ASSERT_EQ(up.status, 200);
  EXPECT_EQ(up.body.at("count"), 768);
  EXPECT_EQ(svc.call(id, "state", {}).body.at("predictions_source"), "upload");
  EXPECT_EQ(svc.call(id, "split", {}).status, 409);
  EXPECT_EQ(svc.call(id, "ingest_predictions", {{"csv", "row,label\n0,maybe\n"}}).status, 400);
  ASSERT_EQ(svc.call(id, "build", {{"implicator", "goguen"}}).status, 200);
}

TEST(Service, ArffUploadedInline) {
  Service svc(options());
  const auto id = svc.create_session();
  const auto r = svc.call(id, "load_dataset",
                          {{"arff", "@relation tiny\n@attribute x numeric\n@attribute c {a,b}\n@data\n1,a\n2,b\n3,a\n"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("dataset"), "tiny");
  EXPECT_EQ(svc.call(id, "load_dataset", {{"arff", "@relation broken\n"}}).status, 400);
}

TEST(Service, WalkthroughConversation) {
  Service svc(options());
  const auto id = svc.create_session();

  const auto early = svc.call(id, "message", {{"text", "How is BMI distributed?"}}).body;
  EXPECT_TRUE(early.at("intent").is_null());
  EXPECT_NE(early.at("reply_text").get<std::string>().find("load a dataset first"), std::string::npos);

  const std::vector<std::pair<std::string, std::string>> turns = {
      {"Load the diabetes dataset", "load_data"},
      {"Tell me more about the data.", "data_stats"},
      {"How is BMI distributed?", "plot_histogram"},
      {"How are Age and Pres correlated?", "plot_correlation"},
      {"Please show me the correlation matrix.", "correlation_matrix"},
      {"Train the model on this data.", "train_model"},
      {"How did you split the data?", "train_test_samples"},
      {"Can you construct the symbolic explanation module?", "train_explanation_module"},
      {"What is the complexity of the loaded problem?", "problem_complexity"},
      {"If Preg is very low, Gluc is low, and the outcome is test_negative, what is Age?", "run_full_query"},
      {"What rule is closest to this one?", "closest_instance"},
      {"What values should Preg and Gluc take while Age is medium for the outcome to be tested_negative instead "
       "of tested_positive?",
       "run_cf_query"},
      {"What is the explicit bias associated with Age?", "bias"},
      {"What are the top rules in the knowledge base?", "top_rules_kb"},
  };
  std::map<std::string, json> replies;
  for (const auto& [text, intent] : turns) {
    const auto r = svc.call(id, "message", {{"text", text}});
    ASSERT_EQ(r.status, 200) << text;
    EXPECT_EQ(r.body.at("intent"), intent) << text;
    EXPECT_FALSE(r.body.contains("error")) << text << ": " << r.body.dump();
    EXPECT_FALSE(r.body.at("reply_text").get<std::string>().empty());
    replies[intent] = r.body;
  }
  EXPECT_NE(replies["data_stats"]["reply_text"].get<std::string>().find("768 instances"), std::string::npos);
  EXPECT_EQ(replies["plot_histogram"]["attachments"][0]["data"]["feature"], "mass");
  EXPECT_NE(replies["train_test_samples"]["reply_text"].get<std::string>().find("614"), std::string::npos);
  EXPECT_EQ(replies["plot_correlation"]["attachments"][0]["type"], "scatter");

  const double cx = svc.call(id, "complexity", {}).body.at("complexity");
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", cx);
  EXPECT_NE(replies["problem_complexity"]["reply_text"].get<std::string>().find(buf), std::string::npos);

  const auto events = svc.call(id, "events", {}).body.at("events");
  EXPECT_EQ(events.size(), 2u * (turns.size() + 1) + 1);
  EXPECT_EQ(events[0].at("role"), "user");
  EXPECT_EQ(events[1].at("role"), "bot");
}

TEST(Service, MessageErrorsStayInTheConversation) {
  Service svc(options());
  const auto id = svc.create_session();
  ASSERT_EQ(svc.call(id, "message", {{"text", "Load the diabetes dataset"}}).status, 200);
  const auto r = svc.call(id, "message", {{"text", "What rule is closest to this one?"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("error").at("kind"), "conflict");
  const auto missing = svc.call(id, "message", {{"text", "load the heart_disease dataset"}});
  EXPECT_EQ(missing.body.at("error").at("kind"), "not_found");
  const auto junk = svc.call(id, "message", {{"text", "sing me a song about turtles"}});
  EXPECT_TRUE(junk.body.at("intent").is_null());
  EXPECT_TRUE(junk.body.at("suggestion").is_object());
  EXPECT_EQ(svc.call(id, "message", {{"text", ""}}).status, 400);
}

TEST(Service, NaturalLanguageAndStructuredQueriesAgree) {
  Service svc(options());
  const auto id = built_session(svc);
  const auto nl = svc.call(id, "message",
                           {{"text",
                             "What values should Preg and Gluc take while Age is medium for the outcome to be "
                             "tested_negative instead of tested_positive?"}});
  ASSERT_EQ(nl.status, 200);
  ASSERT_EQ(nl.body.at("intent"), "run_cf_query");
  const auto structured = svc.call(id, "counterfactual",
                                   {{"desired_class", "tested_negative"},
                                    {"contrast_class", "tested_positive"},
                                    {"known", json::array({{{"feature", "age"}, {"term", "medium"}}})},
                                    {"unknowns", {"preg", "plas"}}});
  ASSERT_EQ(structured.status, 200);
  EXPECT_EQ(nl.body.at("attachments")[0].at("data"), structured.body);
}

TEST(Service, SessionsSurviveRestart) {
  const auto dir = temp_dir("persist");
  std::string id;
  json before;
  {
    Service svc(options(dir.string()));
    id = built_session(svc);
    ASSERT_EQ(svc.call(id, "message", {{"text", "Tell me more about the data."}}).status, 200);
    before = svc.call(id, "top_rules", {{"n", 5}}).body;
    EXPECT_TRUE(fs::exists(dir / (id + ".json")));
    const auto other = svc.create_session();
    ASSERT_EQ(svc.call(other, "load_dataset", {{"name", "wine"}}).status, 200);
    EXPECT_TRUE(svc.delete_session(other));
    EXPECT_FALSE(fs::exists(dir / (other + ".json")));
  }
  {
    std::ofstream(dir / "garbage.json") << "{ not json";
  }
  Service svc(options(dir.string()));
  EXPECT_EQ(svc.session_ids(), std::vector<std::string>{id});
  const auto state = svc.call(id, "state", {}).body;
  EXPECT_EQ(state.at("stage"), "built");
  EXPECT_EQ(state.at("predictions_source"), "baseline");
  EXPECT_EQ(state.at("events"), 3 + 2);  // read-only ops are not persisted
  EXPECT_EQ(svc.call(id, "top_rules", {{"n", 5}}).body, before);
  EXPECT_EQ(svc.call(id, "split", {}).body.at("train_rows"), 614);
  fs::remove_all(dir);
}

TEST(Service, RejectsBadDefaults) {
  auto o = options();
  o.default_symbols = 1;
  EXPECT_THROW(Service{o}, ConfigError);
}
