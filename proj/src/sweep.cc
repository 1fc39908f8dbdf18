#include "fuzzex/sweep.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fuzzex/errors.h"
#include "fuzzex/fuzzy_rough.h"
#include "fuzzex/pipeline.h"
#include "fuzzex/text_util.h"

namespace fuzzex {

void SweepSpec::validate() const {
  if (symbol_counts.empty() || lambdas.empty() || implicators.empty() || distances.empty()) {
    throw ConfigError("sweep grids must not be empty");
  }
  if (datasets.empty()) throw ConfigError("sweep needs at least one dataset");
  if (!predictions.empty() && predictions.size() != datasets.size()) {
    throw ConfigError("sweep predictions must align with datasets (" +
                      std::to_string(predictions.size()) + " vs " +
                      std::to_string(datasets.size()) + ")");
  }
  for (auto c : symbol_counts) {
    if (c < 2) throw ConfigError("symbol counts must be >= 2");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("lambdas must be > 0");
  }
}

SweepSpec sweep_spec_from_json(const std::string& json_text, const std::string& base_dir) {
  SweepSpec spec;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.contains("symbol_counts")) spec.symbol_counts = j["symbol_counts"].get<std::vector<std::size_t>>();
    if (j.contains("lambdas")) spec.lambdas = j["lambdas"].get<std::vector<double>>();
    if (j.contains("implicators")) {
      spec.implicators.clear();
      for (const auto& s : j["implicators"]) spec.implicators.push_back(implicator_from_string(s.get<std::string>()));
    }
    if (j.contains("distances")) {
      spec.distances.clear();
      for (const auto& s : j["distances"]) spec.distances.push_back(distance_from_string(s.get<std::string>()));
    }
    auto resolve = [&](const std::string& p) {
      if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
      return (std::filesystem::path(base_dir) / p).string();
    };
    for (const auto& d : j.value("datasets", std::vector<std::string>{})) spec.datasets.push_back(resolve(d));
    for (const auto& p : j.value("predictions", std::vector<std::string>{})) spec.predictions.push_back(resolve(p));
    spec.k = j.value("k", spec.k);
    if (j.contains("svg_dir")) spec.svg_dir = resolve(j["svg_dir"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sweep_spec_from_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (std::size_t d = 0; d < spec.datasets.size(); ++d) {
    const std::string name = std::filesystem::path(spec.datasets[d]).stem().string();
    auto fill_error = [&](std::size_t c, const std::string& msg) {
      for (double lambda : spec.lambdas) {
        for (auto imp : spec.implicators) {
          for (auto dist : spec.distances) {
            SweepRow r;
            r.dataset = name;
            r.c = c;
            r.lambda = lambda;
            r.implicator = imp;
            r.distance = dist;
            r.error = msg;
            rows.push_back(std::move(r));
          }
        }
      }
    };
    Dataset prepared;
    std::vector<Prediction> preds;
    try {
      prepared = prepare(load_arff(spec.datasets[d]));
      const std::string pred_path = spec.predictions.empty() ? "" : spec.predictions[d];
      preds = pred_path.empty() ? train_baseline(prepared, SplitConfig{}, spec.k).predictions
                                : load_predictions(prepared, pred_path).predictions;
    } catch (const Error& e) {
      for (auto c : spec.symbol_counts) fill_error(c, e.what());
      continue;
    }
    for (auto c : spec.symbol_counts) {
      std::optional<KnowledgeBase> kb;
      try {
        FcmConfig fcm;
        fcm.c = c;
        kb = build_rules(prepared, granulate(prepared, fcm), preds, fcm);
      } catch (const Error& e) {
        fill_error(c, e.what());
        continue;
      }
      double ante = 0.0;
      std::size_t n_ante = 0;
      for (const auto& r : kb->rules) {
        for (const auto& a : r.antecedent) {
          ante += a.confidence;
          ++n_ante;
        }
      }
      ante = n_ante ? ante / static_cast<double>(n_ante) : 0.0;
      for (double lambda : spec.lambdas) {
        for (auto imp : spec.implicators) {
          for (auto dist : spec.distances) {
            SweepRow r;
            r.dataset = name;
            r.c = c;
            r.lambda = lambda;
            r.implicator = imp;
            r.distance = dist;
            r.avg_antecedent_conf = ante;
            try {
              const auto mu = lower_memberships(*kb, ScoringConfig{imp, dist, lambda});
              if (mu.empty()) throw ValidationError("no rules");
              double s = 0.0;
              for (double v : mu) s += v;
              r.avg_rule_conf = s / static_cast<double>(mu.size());
              r.p10 = percentile(mu, 0.1);
              r.p90 = percentile(mu, 0.9);
            } catch (const Error& e) {
              r.error = e.what();
            }
            rows.push_back(std::move(r));
          }
        }
      }
    }
    if (!spec.svg_dir.empty()) {
      std::filesystem::create_directories(spec.svg_dir);
      const auto path = std::filesystem::path(spec.svg_dir) / (name + ".svg");
      std::ofstream out(path);
      if (!out) throw IoError("cannot write '" + path.string() + "'");
      out << sweep_svg(rows, name);
    }
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "dataset,c,lambda,implicator,distance,avg_rule_conf,avg_antecedent_conf,p10,p90,errors\n";
  for (const auto& r : rows) {
    out << csv_field(r.dataset) << ',' << r.c << ',' << text::exact(r.lambda) << ','
        << to_string(r.implicator) << ',' << to_string(r.distance) << ',';
    if (r.error.empty()) {
      out << text::fixed(r.avg_rule_conf, 6) << ',' << text::fixed(r.avg_antecedent_conf, 6) << ','
          << text::fixed(r.p10, 6) << ',' << text::fixed(r.p90, 6) << ",\n";
    } else {
      out << ",,,," << csv_field(r.error) << '\n';
    }
  }
}

std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& dataset) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 170, kTop = 30, kBottom = 50;
  std::vector<const SweepRow*> mine;
  for (const auto& r : rows) {
    if (r.dataset == dataset && r.error.empty()) mine.push_back(&r);
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"" << kLeft << "\" y=\"18\">" << dataset << ": average rule confidence</text>\n";
  if (mine.empty()) {
    svg << "<text x=\"" << kLeft << "\" y=\"60\">no data</text>\n</svg>\n";
    return svg.str();
  }
  const double lambda = mine.front()->lambda;
  std::size_t cmin = mine.front()->c, cmax = cmin;
  for (auto* r : mine) {
    cmin = std::min(cmin, r->c);
    cmax = std::max(cmax, r->c);
  }
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](std::size_t c) {
    return cmax == cmin ? kLeft + pw / 2 : kLeft + pw * static_cast<double>(c - cmin) / static_cast<double>(cmax - cmin);
  };
  auto py = [&](double v) { return kTop + ph * (1.0 - std::clamp(v, 0.0, 1.0)); };
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
        << text::fixed(v, 2) << "</text>\n";
  }
  for (std::size_t c = cmin; c <= cmax; ++c) {
    svg << "<text x=\"" << px(c) << "\" y=\"" << kH - kBottom + 18 << "\" text-anchor=\"middle\">" << c
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\">symbols per feature (lambda = " << text::exact(lambda) << ")</text>\n";
  static const char* kColors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  std::map<std::string, std::vector<std::pair<std::size_t, double>>> series;
  std::vector<std::string> order;
  for (auto* r : mine) {
    if (r->lambda != lambda) continue;
    const std::string key = to_string(r->implicator) + "/" + to_string(r->distance);
    if (!series.count(key)) order.push_back(key);
    series[key].emplace_back(r->c, r->avg_rule_conf);
  }
  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* color = kColors[s % 8];
    auto pts = series[order[s]];
    std::sort(pts.begin(), pts.end());
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [c, v] : pts) svg << text::fixed(px(c), 1) << ',' << text::fixed(py(v), 1) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(s) + 8;
    svg << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kW - kRight + 35 << "\" y=\"" << ly + 4 << "\">" << order[s] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fuzzex
