// Batch front end: one pipeline run, or a sensitivity sweep with --sweep.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"
#include "fuzzex/pipeline.h"
#include "fuzzex/query_engine.h"
#include "fuzzex/sweep.h"
#include "fuzzex/text_util.h"

namespace {

int run_sweep_cmd(const std::string& spec_path, const std::string& out) {
  const auto spec = fuzzex::load_sweep_spec(spec_path);
  const auto rows = fuzzex::run_sweep(spec);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  if (out.empty() || out == "-") {
    fuzzex::write_sweep_csv(rows, std::cout);
  } else {
    std::filesystem::path path(out);
    if (std::filesystem::is_directory(path) || path.extension() != ".csv") {
      std::filesystem::create_directories(path);
      path /= "sweep.csv";
    }
    std::ofstream f(path);
    if (!f) throw fuzzex::IoError("cannot write '" + path.string() + "'");
    fuzzex::write_sweep_csv(rows, f);
    std::cerr << "wrote " << rows.size() << " rows to " << path.string() << "\n";
  }
  if (failed) std::cerr << failed << " cell(s) failed; see the errors column\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy-rough symbolic explanation module: build a scored Prolog knowledge base"};

  fuzzex::PipelineConfig cfg;
  std::string predictions;
  std::string implicator = "lukasiewicz";
  std::string distance = "fuzzy";
  std::string sweep;
  std::size_t top = 3;

  app.add_option("--data", cfg.data_path, "ARFF dataset");
  app.add_option("--predictions", predictions, "CSV with id,class[,confidence]");
  app.add_flag("--baseline", cfg.baseline, "use the built-in kNN classifier for predictions");
  app.add_option("--k", cfg.k, "neighbours for the baseline classifier")->capture_default_str();
  app.add_option("--symbols", cfg.fcm.c, "linguistic terms per numeric feature (2..11)")->capture_default_str();
  app.add_option("--implicator", implicator, "fodor, goguen, godel or lukasiewicz")->capture_default_str();
  app.add_option("--distance", distance, "crisp or fuzzy")->capture_default_str();
  app.add_option("--lambda", cfg.scoring.lambda, "smoothing parameter (> 0)")->capture_default_str();
  app.add_option("--seed", cfg.split.seed, "seed for the train/test split")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory (sweep: CSV path or directory)");
  app.add_option("--top", top, "rules listed in the console summary")->capture_default_str();
  app.add_option("--sweep", sweep, "JSON sweep specification; runs the sensitivity grid instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!sweep.empty()) return run_sweep_cmd(sweep, cfg.out_dir);
    if (cfg.data_path.empty()) throw fuzzex::ConfigError("--data is required");
    if (!predictions.empty()) cfg.predictions_path = predictions;
    if (!predictions.empty() && cfg.baseline) {
      throw fuzzex::ConfigError("--predictions and --baseline are mutually exclusive");
    }
    cfg.scoring.implicator = fuzzex::implicator_from_string(implicator);
    cfg.scoring.distance = fuzzex::distance_from_string(distance);

    const auto result = fuzzex::run_pipeline(cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    const auto& s = result.summary;
    std::cout << "rules: " << s.rules << "\n"
              << "avg rule confidence: " << fuzzex::text::fixed(s.avg_rule_confidence, 6) << "\n"
              << "avg antecedent confidence: " << fuzzex::text::fixed(s.avg_antecedent_confidence, 6) << "\n"
              << "complexity: " << fuzzex::text::fixed(s.complexity, 6) << "\n";
    if (result.baseline) {
      std::cout << "baseline test accuracy: " << fuzzex::text::fixed(result.baseline->test_accuracy, 3) << " ("
                << result.baseline->train_rows << " train / " << result.baseline->test_rows << " test)\n";
    }
    if (top > 0 && !result.kb.rules.empty()) {
      for (const auto& r : fuzzex::top_rules(result.kb, top).rules) {
        std::cout << fuzzex::prolog_clause(r) << "\n";
      }
    }
    if (!cfg.out_dir.empty()) std::cerr << "artifacts written to " << cfg.out_dir << "\n";
  } catch (const fuzzex::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
