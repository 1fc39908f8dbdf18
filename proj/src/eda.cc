#include "fuzzex/eda.h"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "fuzzex/errors.h"

namespace fuzzex {

namespace {

std::size_t numeric_feature(const Dataset& ds, std::string_view name) {
  const auto f = ds.find_feature(name);
  if (!f) throw DomainError("unknown feature '" + std::string(name) + "'");
  if (!ds.features[*f].is_numeric()) {
    throw DomainError("feature '" + ds.features[*f].name + "' is not numeric");
  }
  return *f;
}

double original(const Dataset& ds, std::size_t f, double v) {
  return ds.normalization_ranges.size() > f && ds.normalization_ranges[f] ? denormalize(ds, f, v) : v;
}

struct Pearson {
  double r = 0.0;
  double p = 1.0;
};

Pearson pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3) return {};
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return {};
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(r) == 1.0) return {r, 0.0};
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return {r, 2.0 * boost::math::cdf(boost::math::complement(dist, t))};
}

}  // namespace

Histogram histogram(const Dataset& ds, std::string_view feature, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  const std::size_t f = numeric_feature(ds, feature);
  std::vector<double> values;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (!ds.missing[r][f]) values.push_back(original(ds, f, ds.rows[r][f]));
  }
  Histogram h;
  h.feature = ds.features[f].name;
  h.counts.assign(bins, 0);
  if (values.empty()) {
    h.edges.assign(bins + 1, 0.0);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
  h.edges.back() = hi;
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

Correlation correlation(const Dataset& ds, std::string_view a, std::string_view b) {
  const std::size_t fa = numeric_feature(ds, a);
  const std::size_t fb = numeric_feature(ds, b);
  Correlation c;
  c.feature_a = ds.features[fa].name;
  c.feature_b = ds.features[fb].name;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (ds.missing[r][fa] || ds.missing[r][fb]) continue;
    c.x.push_back(original(ds, fa, ds.rows[r][fa]));
    c.y.push_back(original(ds, fb, ds.rows[r][fb]));
  }
  c.n = c.x.size();
  const auto p = pearson(c.x, c.y);
  c.r = p.r;
  c.p_value = p.p;
  return c;
}

CorrelationMatrix correlation_matrix(const Dataset& ds) {
  CorrelationMatrix m;
  for (const auto& f : ds.features) {
    if (f.is_numeric()) m.features.push_back(f.name);
  }
  if (m.features.empty()) throw DomainError("dataset has no numeric features");
  const std::size_t k = m.features.size();
  m.r.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      m.r[i][j] = m.r[j][i] = correlation(ds, m.features[i], m.features[j]).r;
    }
  }
  return m;
}

}  // namespace fuzzex
