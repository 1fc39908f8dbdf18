#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"
#include "fuzzex/pipeline.h"
#include "json.hpp"

using namespace fuzzex;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(FUZZEX_DATA_DIR) + "/" + name; }

fs::path temp_dir(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("fuzzex_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Percentile, LinearInterpolation) {
  EXPECT_EQ(percentile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile({0.0, 10.0}, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(percentile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.9), 4.6);
  EXPECT_EQ(percentile({7.0}, 0.9), 7.0);
  EXPECT_THROW(percentile({}, 0.5), ValidationError);
}

TEST(Pipeline, NeedsPredictionsOrBaseline) {
  PipelineConfig cfg;
  cfg.data_path = data("diabetes.arff");
  EXPECT_THROW(run_pipeline(cfg), ConfigError);
  cfg.baseline = true;
  cfg.fcm.c = 1;
  EXPECT_THROW(run_pipeline(cfg), ConfigError);
  cfg.fcm.c = 5;
  cfg.data_path = "/nonexistent.arff";
  EXPECT_THROW(run_pipeline(cfg), IoError);
}

TEST(Pipeline, BaselineOnDiabetes) {
  PipelineConfig cfg;
  cfg.data_path = data("diabetes.arff");
  cfg.baseline = true;
  const auto res = run_pipeline(cfg);
  ASSERT_TRUE(res.baseline);
  EXPECT_EQ(res.baseline->train_rows, 614u);
  EXPECT_EQ(res.baseline->test_rows, 154u);
  std::size_t confusion_total = 0;
  for (const auto& row : res.baseline->confusion) {
    for (auto v : row) confusion_total += v;
  }
  EXPECT_EQ(confusion_total, 154u);
  EXPECT_EQ(res.predictions.size(), 768u);
  EXPECT_EQ(res.kb.size(), 768u);
  EXPECT_TRUE(res.kb.scored);
  EXPECT_GE(res.summary.complexity, 0.0);
  EXPECT_LE(res.summary.complexity, 1.0);
  EXPECT_DOUBLE_EQ(res.summary.complexity, 1.0 - res.summary.avg_rule_confidence);
  EXPECT_LE(res.summary.rule_p10, res.summary.rule_p90);
  EXPECT_LE(res.summary.antecedent_p10, res.summary.antecedent_p90);
}

TEST(Pipeline, WineWithThreeTerms) {
  PipelineConfig cfg;
  cfg.data_path = data("wine.arff");
  cfg.baseline = true;
  cfg.fcm.c = 3;
  const auto res = run_pipeline(cfg);
  EXPECT_EQ(res.kb.size(), 178u);
  EXPECT_EQ(res.kb.class_domain.size(), 3u);
  for (const auto& v : res.kb.vocabularies) EXPECT_EQ(v, (std::vector<std::string>{"low", "medium", "high"}));
}

TEST(Pipeline, PredictionsFileAndArtifacts) {
  const auto dir = temp_dir("pipeline");
  const Dataset prepared = prepare(load_arff(data("diabetes.arff")));
  {
    std::ofstream out(dir / "preds.csv");
    write_predictions(labels_as_predictions(prepared), out);
  }
  PipelineConfig cfg;
  cfg.data_path = data("diabetes.arff");
  cfg.predictions_path = (dir / "preds.csv").string();
  cfg.out_dir = (dir / "out").string();
  const auto res = run_pipeline(cfg);
  EXPECT_FALSE(res.baseline);
  for (const char* f : {"granulation.json", "kb.pl", "kb.json", "summary.json", "predictions.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary.at("rules"), 768);
  EXPECT_DOUBLE_EQ(summary.at("complexity").get<double>(), res.summary.complexity);
  EXPECT_FALSE(summary.contains("baseline"));

  const auto kb = parse_prolog_kb_text(slurp(dir / "out" / "kb.pl"));
  EXPECT_EQ(kb.size(), 768u);
  const auto kbj = kb_from_json(slurp(dir / "out" / "kb.json"));
  EXPECT_EQ(kbj.rules, res.kb.rules);
  fs::remove_all(dir);
}

TEST(Pipeline, DeterministicAcrossRuns) {
  PipelineConfig cfg;
  cfg.data_path = data("wine.arff");
  cfg.baseline = true;
  const auto a = run_pipeline(cfg);
  const auto b = run_pipeline(cfg);
  EXPECT_EQ(a.kb.rules, b.kb.rules);
  EXPECT_EQ(summary_to_json(a.summary), summary_to_json(b.summary));
}
