#include "fuzzex/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"

namespace fuzzex {

Dataset prepare(const Dataset& raw) { return normalize(impute(raw)); }

BaselineRun train_baseline(const Dataset& prepared, const SplitConfig& split_cfg, std::size_t k) {
  if (k == 0) throw ConfigError("baseline needs k >= 1");
  const Split s = split(prepared, split_cfg);
  BaselineRun run;
  run.k = k;
  run.split = split_cfg;
  run.train_rows = s.train.size();
  run.test_rows = s.test.size();
  const std::size_t classes = prepared.class_feature.domain.size();
  run.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  if (!s.test.rows.empty()) {
    const auto test_preds = baseline_classify(s.train, s.test, k);
    run.test_accuracy = accuracy(test_preds, s.test);
    for (std::size_t i = 0; i < test_preds.size(); ++i) {
      const auto p = prepared.class_feature.find_value(test_preds[i].class_label);
      run.confusion[s.test.labels[i]][*p]++;
    }
  }
  run.predictions = baseline_classify(s.train, prepared, k);
  return run;
}

KnowledgeBase build_kb(const Dataset& prepared, const std::vector<Prediction>& preds,
                       const FcmConfig& fcm, const ScoringConfig& scoring) {
  scoring.validate();
  KnowledgeBase kb = build_rules(prepared, granulate(prepared, fcm), preds, fcm);
  score_rules(kb, scoring);
  return kb;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

KbSummary summarize(const KnowledgeBase& kb) {
  KbSummary s;
  s.rules = kb.rules.size();
  if (kb.rules.empty()) return s;
  std::vector<double> rule_conf;
  std::vector<double> ante_conf;
  for (const auto& r : kb.rules) {
    rule_conf.push_back(r.rule_confidence);
    for (const auto& a : r.antecedent) ante_conf.push_back(a.confidence);
  }
  double sum = 0.0;
  for (double v : rule_conf) sum += v;
  s.avg_rule_confidence = sum / static_cast<double>(rule_conf.size());
  s.rule_p10 = percentile(rule_conf, 0.1);
  s.rule_p90 = percentile(rule_conf, 0.9);
  if (!ante_conf.empty()) {
    sum = 0.0;
    for (double v : ante_conf) sum += v;
    s.avg_antecedent_confidence = sum / static_cast<double>(ante_conf.size());
    s.antecedent_p10 = percentile(ante_conf, 0.1);
    s.antecedent_p90 = percentile(ante_conf, 0.9);
  }
  s.complexity = kb.scored ? complexity(kb) : 0.0;
  return s;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  if (!cfg.predictions_path && !cfg.baseline) {
    throw ConfigError("either a predictions file or the baseline classifier is required");
  }
  cfg.fcm.validate();
  cfg.scoring.validate();
  PipelineResult out;
  const Dataset raw = load_arff(cfg.data_path);
  out.prepared = prepare(raw);
  out.warnings = out.prepared.warnings;
  if (cfg.predictions_path) {
    auto ps = load_predictions(out.prepared, *cfg.predictions_path);
    out.predictions = std::move(ps.predictions);
    out.warnings.insert(out.warnings.end(), ps.warnings.begin(), ps.warnings.end());
  } else {
    out.baseline = train_baseline(out.prepared, cfg.split, cfg.k);
    out.predictions = out.baseline->predictions;
  }
  out.kb = build_kb(out.prepared, out.predictions, cfg.fcm, cfg.scoring);
  for (const auto& g : out.kb.granulations) {
    if (g) out.warnings.insert(out.warnings.end(), g->warnings.begin(), g->warnings.end());
  }
  out.summary = summarize(out.kb);
  if (!cfg.out_dir.empty()) write_artifacts(out, cfg.out_dir);
  return out;
}

std::string summary_to_json(const KbSummary& s) {
  nlohmann::ordered_json j;
  j["rules"] = s.rules;
  j["avg_rule_confidence"] = s.avg_rule_confidence;
  j["avg_antecedent_confidence"] = s.avg_antecedent_confidence;
  j["rule_confidence_p10"] = s.rule_p10;
  j["rule_confidence_p90"] = s.rule_p90;
  j["antecedent_confidence_p10"] = s.antecedent_p10;
  j["antecedent_confidence_p90"] = s.antecedent_p90;
  j["complexity"] = s.complexity;
  return j.dump(2);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_artifacts(const PipelineResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const fs::path dir(out_dir);
  write_file(dir / "granulation.json",
             granulations_to_json(result.kb.granulations, result.kb.feature_names));
  write_file(dir / "kb.pl", to_prolog(result.kb));
  write_file(dir / "kb.json", kb_to_json(result.kb));

  auto summary = nlohmann::ordered_json::parse(summary_to_json(result.summary));
  if (result.baseline) {
    summary["baseline"] = {{"k", result.baseline->k},
                           {"train_rows", result.baseline->train_rows},
                           {"test_rows", result.baseline->test_rows},
                           {"test_accuracy", result.baseline->test_accuracy}};
  }
  summary["warnings"] = result.warnings;
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  std::ofstream preds(dir / "predictions.csv");
  if (!preds) throw IoError("cannot write predictions.csv in '" + out_dir + "'");
  write_predictions(result.predictions, preds);
}

}  // namespace fuzzex
