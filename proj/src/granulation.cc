#include "fuzzex/granulation.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "fuzzex/errors.h"
#include "fuzzex/text_util.h"
#include "json.hpp"

namespace fuzzex {

void FcmConfig::validate() const {
  if (c < 2) throw ConfigError("fuzzy c-means needs at least 2 clusters");
  if (!(m > 1.0)) throw ConfigError("fuzzification coefficient m must be > 1");
  if (!(tol > 0.0)) throw ConfigError("convergence tolerance must be > 0");
  if (max_iters == 0) throw ConfigError("max_iters must be positive");
}

std::optional<std::size_t> FeatureGranulation::find_term(std::string_view term) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (text::iequals(terms[i], term)) return i;
  }
  return std::nullopt;
}

std::vector<std::string> default_terms(std::size_t c) {
  switch (c) {
    case 2: return {"low", "high"};
    case 3: return {"low", "medium", "high"};
    case 4: return {"low", "medium_low", "medium_high", "high"};
    case 5: return {"very_low", "low", "medium", "high", "very_high"};
    case 6: return {"very_low", "low", "medium_low", "medium_high", "high", "very_high"};
    case 7:
      return {"very_low", "low", "medium_low", "medium", "medium_high", "high", "very_high"};
    case 8:
      return {"extremely_low", "very_low", "low", "medium_low",
              "medium_high", "high", "very_high", "extremely_high"};
    case 9:
      return {"extremely_low", "very_low", "low",       "medium_low",    "medium",
              "medium_high",   "high",     "very_high", "extremely_high"};
    case 10:
      return {"extremely_low", "very_low",    "low",         "rather_low", "medium_low",
              "medium_high",   "rather_high", "high",        "very_high",  "extremely_high"};
    case 11:
      return {"extremely_low", "very_low",    "low",  "rather_low", "medium_low",    "medium",
              "medium_high",   "rather_high", "high", "very_high",  "extremely_high"};
    default:
      throw ConfigError("no default term list for c = " + std::to_string(c) +
                        " (supported: 2..11)");
  }
}

std::vector<double> fcm_memberships(const std::vector<double>& prototypes, double x, double m) {
  const std::size_t c = prototypes.size();
  std::vector<double> u(c, 0.0);
  std::vector<double> dist(c);
  for (std::size_t j = 0; j < c; ++j) {
    dist[j] = std::abs(x - prototypes[j]);
    if (dist[j] == 0.0) {
      u[j] = 1.0;
      return u;
    }
  }
  const double exponent = 2.0 / (m - 1.0);
  for (std::size_t j = 0; j < c; ++j) {
    double sum = 0.0;
    for (std::size_t l = 0; l < c; ++l) sum += std::pow(dist[j] / dist[l], exponent);
    u[j] = 1.0 / sum;
  }
  return u;
}

namespace {

std::vector<double> quantile_init(const std::vector<double>& sorted, std::size_t c) {
  std::vector<double> z(c);
  const double n = static_cast<double>(sorted.size());
  for (std::size_t j = 0; j < c; ++j) {
    const auto idx = static_cast<std::size_t>((static_cast<double>(j) + 0.5) / static_cast<double>(c) * n);
    z[j] = sorted[std::min(idx, sorted.size() - 1)];
  }
  return z;
}

bool has_duplicates(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  return std::adjacent_find(z.begin(), z.end()) != z.end();
}

}  // namespace

FeatureGranulation fit_fcm(const std::vector<double>& values, const FcmConfig& cfg,
                           std::string feature) {
  cfg.validate();
  if (values.empty()) throw ValidationError("fit_fcm needs at least one value");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("fit_fcm expects normalized values in [0, 1]");
    }
  }

  FeatureGranulation g;
  g.feature = std::move(feature);
  g.m = cfg.m;

  // Work on distinct values with multiplicities; the objective is unchanged.
  std::map<double, double> counts;
  for (double v : values) counts[v] += 1.0;
  std::vector<double> xs, ws;
  for (const auto& [v, w] : counts) {
    xs.push_back(v);
    ws.push_back(w);
  }

  std::size_t c = cfg.c;
  if (c > xs.size()) {
    g.warnings.push_back("feature '" + g.feature + "' has only " + std::to_string(xs.size()) +
                         " distinct values; c reduced from " + std::to_string(c));
    c = xs.size();
  }
  if (c == 1) {
    g.prototypes = {xs[0]};
    g.terms = {"medium"};
    return g;
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> z = quantile_init(sorted, c);
  if (has_duplicates(z)) z = quantile_init(xs, c);

  std::vector<std::vector<double>> u(xs.size());
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    for (std::size_t i = 0; i < xs.size(); ++i) u[i] = fcm_memberships(z, xs[i], cfg.m);
    double shift = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = ws[i] * std::pow(u[i][j], cfg.m);
        num += w * xs[i];
        den += w;
      }
      if (den > 0.0) {
        const double next = num / den;
        shift = std::max(shift, std::abs(next - z[j]));
        z[j] = next;
      }
    }
    g.iterations = it + 1;
    if (shift < cfg.tol) break;
  }

  std::sort(z.begin(), z.end());
  if (std::adjacent_find(z.begin(), z.end()) != z.end()) {
    for (std::size_t j = 0; j < c; ++j) z[j] += 1e-9 * static_cast<double>(j);
    g.warnings.push_back("feature '" + g.feature + "' produced coincident prototypes");
  }
  g.prototypes = std::move(z);
  g.terms = default_terms(c);
  return g;
}

SymbolAssignment assign_symbol(const FeatureGranulation& g, double x, std::string* warning) {
  if (x < 0.0 || x > 1.0) {
    if (warning) *warning = "value " + text::exact(x) + " clamped to [0, 1]";
    x = std::clamp(x, 0.0, 1.0);
  }
  const auto u = fcm_memberships(g.prototypes, x, g.m);
  std::size_t best = 0;
  for (std::size_t j = 1; j < u.size(); ++j) {
    if (u[j] > u[best]) best = j;
  }
  return {g.terms[best], u[best]};
}

std::vector<std::optional<FeatureGranulation>> granulate(const Dataset& ds, const FcmConfig& cfg) {
  cfg.validate();
  if (ds.has_missing()) throw ValidationError("granulate requires an imputed dataset");
  std::vector<std::future<FeatureGranulation>> jobs(ds.feature_count());
  for (std::size_t f = 0; f < ds.feature_count(); ++f) {
    if (!ds.features[f].is_numeric()) continue;
    std::vector<double> column(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) column[r] = ds.rows[r][f];
    jobs[f] = std::async(std::launch::async, [column = std::move(column), &cfg, name = ds.features[f].name] {
      return fit_fcm(column, cfg, name);
    });
  }
  std::vector<std::optional<FeatureGranulation>> out(ds.feature_count());
  for (std::size_t f = 0; f < ds.feature_count(); ++f) {
    if (jobs[f].valid()) out[f] = jobs[f].get();
  }
  return out;
}

using nlohmann::json;

std::string granulations_to_json(const std::vector<std::optional<FeatureGranulation>>& grans,
                                 const std::vector<std::string>& feature_names) {
  json features = json::array();
  for (std::size_t f = 0; f < grans.size(); ++f) {
    if (!grans[f]) continue;
    const auto& g = *grans[f];
    features.push_back({{"feature", feature_names.at(f)},
                        {"prototypes", g.prototypes},
                        {"terms", g.terms},
                        {"m", g.m}});
  }
  return json{{"features", features}}.dump(2);
}

std::vector<std::optional<FeatureGranulation>> granulations_from_json(
    const std::string& json_text, const std::vector<std::string>& feature_names) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("granulation JSON: ") + e.what(), 0);
  }
  std::vector<std::optional<FeatureGranulation>> out(feature_names.size());
  for (const auto& item : doc.at("features")) {
    const auto name = item.at("feature").get<std::string>();
    auto it = std::find_if(feature_names.begin(), feature_names.end(),
                           [&](const std::string& n) { return text::iequals(n, name); });
    if (it == feature_names.end()) throw DomainError("granulation for unknown feature '" + name + "'");
    FeatureGranulation g;
    g.feature = name;
    g.prototypes = item.at("prototypes").get<std::vector<double>>();
    g.terms = item.at("terms").get<std::vector<std::string>>();
    g.m = item.at("m").get<double>();
    if (g.prototypes.size() != g.terms.size() || g.prototypes.empty()) {
      throw ValidationError("granulation for '" + name + "' has mismatched prototypes/terms");
    }
    out[static_cast<std::size_t>(it - feature_names.begin())] = std::move(g);
  }
  return out;
}

}  // namespace fuzzex
