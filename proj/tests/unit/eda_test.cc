#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "fuzzex/dataset.h"
#include "fuzzex/eda.h"
#include "fuzzex/errors.h"

using namespace fuzzex;

namespace {

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// Two-sided p-value as the regularized incomplete beta I_z(df/2, 1/2) with
// z = df / (df + t^2), integrated with composite Simpson.
double oracle_p_value(double r, std::size_t n) {
  const double df = static_cast<double>(n - 2);
  const double t2 = r * r * df / (1.0 - r * r);
  const double z = df / (df + t2);
  const double a = df / 2.0;
  const double b = 0.5;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) - log_beta);
  };
  const int steps = 200000;
  const double h = z / steps;
  double s = f(0.0) + f(z);
  for (int i = 1; i < steps; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

Dataset diabetes() { return load_arff(std::string(FUZZEX_DATA_DIR) + "/diabetes.arff"); }

}  // namespace

TEST(Correlation, PearsonAgainstOracle) {
  const Dataset ds = diabetes();
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"age", "pres"}, {"plas", "insu"}, {"preg", "age"}, {"mass", "skin"}, {"pedi", "preg"}}) {
    const auto c = correlation(ds, a, b);
    EXPECT_EQ(c.n, 768u);
    EXPECT_NEAR(c.r, oracle_pearson(c.x, c.y), 1e-12) << a << "/" << b;
    EXPECT_NEAR(c.p_value, oracle_p_value(c.r, c.n), 1e-6 * oracle_p_value(c.r, c.n) + 1e-300) << a << "/" << b;
  }
}

TEST(Correlation, AgeAndPressureWalkthroughValues) {
  // Reference values for this pair.
  const auto c = correlation(diabetes(), "Age", "Pres");
  EXPECT_NEAR(c.r, 0.24, 0.005);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", c.p_value);
  EXPECT_STREQ(buf, "1.75e-11");
}

TEST(Correlation, ScaleInvariantAndOnOriginalScale) {
  const Dataset raw = diabetes();
  const Dataset norm = normalize(impute(raw));
  const auto a = correlation(raw, "plas", "mass");
  const auto b = correlation(norm, "plas", "mass");
  EXPECT_NEAR(a.r, b.r, 1e-12);
  for (std::size_t i = 0; i < a.x.size(); i += 50) EXPECT_NEAR(a.x[i], b.x[i], 1e-9);
}

TEST(Correlation, SyntheticModerateCorrelation) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::string text = "@relation s\n@attribute x numeric\n@attribute y numeric\n@attribute c {a}\n@data\n";
  for (int i = 0; i < 40; ++i) {
    const double x = g(rng);
    text += std::to_string(x) + "," + std::to_string(0.3 * x + g(rng)) + ",a\n";
  }
  const auto c = correlation(parse_arff_text(text), "x", "y");
  EXPECT_NEAR(c.r, oracle_pearson(c.x, c.y), 1e-12);
  EXPECT_NEAR(c.p_value, oracle_p_value(c.r, c.n), 1e-8);
}

TEST(Correlation, DegenerateCases) {
  const Dataset constant = parse_arff_text(
      "@relation s\n@attribute x numeric\n@attribute y numeric\n@attribute n {p,q}\n@attribute c {a}\n@data\n"
      "1,5,p,a\n2,5,q,a\n3,5,p,a\n4,?,p,a\n");
  const auto c = correlation(constant, "x", "y");
  EXPECT_EQ(c.n, 3u);
  EXPECT_EQ(c.r, 0.0);
  EXPECT_EQ(c.p_value, 1.0);
  EXPECT_THROW(correlation(constant, "x", "n"), DomainError);
  EXPECT_THROW(correlation(constant, "x", "zz"), DomainError);

  const Dataset line = parse_arff_text(
      "@relation s\n@attribute x numeric\n@attribute y numeric\n@attribute c {a}\n@data\n1,2,a\n2,4,a\n3,6,a\n");
  const auto l = correlation(line, "x", "y");
  EXPECT_DOUBLE_EQ(l.r, 1.0);
  EXPECT_EQ(l.p_value, 0.0);
}

TEST(Histogram, CountsEveryValue) {
  const Dataset raw = diabetes();
  const auto h = histogram(raw, "mass", 12);
  ASSERT_EQ(h.counts.size(), 12u);
  ASSERT_EQ(h.edges.size(), 13u);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 768u);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_DOUBLE_EQ(h.edges.back(), 67.1);
  EXPECT_TRUE(std::is_sorted(h.edges.begin(), h.edges.end()));

  // Normalized data is reported back on the original scale.
  const auto hn = histogram(normalize(impute(raw)), "mass", 12);
  EXPECT_EQ(hn.counts, h.counts);
  EXPECT_THROW(histogram(raw, "mass", 0), ConfigError);
  EXPECT_THROW(histogram(raw, "nope"), DomainError);
}

TEST(CorrelationMatrix, SymmetricWithUnitDiagonal) {
  const auto m = correlation_matrix(diabetes());
  ASSERT_EQ(m.features.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(m.r[i][i], 1.0);
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_EQ(m.r[i][j], m.r[j][i]);
      EXPECT_LE(std::abs(m.r[i][j]), 1.0);
    }
  }
  EXPECT_THROW(correlation_matrix(parse_arff_text("@relation s\n@attribute n {p}\n@attribute c {a}\n@data\np,a\n")),
               DomainError);
}
