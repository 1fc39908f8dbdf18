#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fuzzex/dataset.h"
#include "fuzzex/errors.h"
#include "fuzzex/granulation.h"
#include "support/oracles.h"

using namespace fuzzex;

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(DefaultTerms, CoverTwoToEleven) {
  for (std::size_t c = 2; c <= 11; ++c) {
    const auto t = default_terms(c);
    EXPECT_EQ(t.size(), c);
    EXPECT_EQ(std::set<std::string>(t.begin(), t.end()).size(), c);
  }
  EXPECT_EQ(default_terms(5), (std::vector<std::string>{"very_low", "low", "medium", "high", "very_high"}));
  EXPECT_THROW(default_terms(1), ConfigError);
  EXPECT_THROW(default_terms(12), ConfigError);
}

TEST(FcmConfig, Validation) {
  FcmConfig cfg;
  cfg.c = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.m = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(fit_fcm({}, FcmConfig{}), ValidationError);
  EXPECT_THROW(fit_fcm({0.5, 1.5}, FcmConfig{}), ValidationError);
}

TEST(FcmMemberships, MatchOracleAndSumToOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto z = random_unit(rng, 2 + rng() % 8);
    std::sort(z.begin(), z.end());
    const double x = random_unit(rng, 1)[0];
    for (double m : {1.5, 2.0, 3.0}) {
      const auto u = fcm_memberships(z, x, m);
      const auto ref = oracle::fcm_memberships(z, x, m);
      ASSERT_EQ(u.size(), ref.size());
      for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(u[j], ref[j], 1e-12);
      EXPECT_NEAR(std::accumulate(u.begin(), u.end(), 0.0), 1.0, 1e-9);
    }
  }
}

TEST(FcmMemberships, CoincidentValueIsOneHot) {
  const auto u = fcm_memberships({0.1, 0.4, 0.9}, 0.4, 2.0);
  EXPECT_EQ(u, (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(FitFcm, PrototypesSortedAndDeterministic) {
  std::mt19937_64 rng(5);
  for (std::size_t c = 2; c <= 10; ++c) {
    const auto values = random_unit(rng, 300);
    FcmConfig cfg;
    cfg.c = c;
    const auto g = fit_fcm(values, cfg, "f");
    ASSERT_EQ(g.size(), c);
    EXPECT_TRUE(std::is_sorted(g.prototypes.begin(), g.prototypes.end()));
    EXPECT_EQ(std::adjacent_find(g.prototypes.begin(), g.prototypes.end()), g.prototypes.end());
    EXPECT_EQ(g.terms, default_terms(c));
    const auto again = fit_fcm(values, cfg, "f");
    EXPECT_EQ(again.prototypes, g.prototypes);  // bit-identical
    for (double x : values) {
      const auto u = fcm_memberships(g.prototypes, x, g.m);
      EXPECT_NEAR(std::accumulate(u.begin(), u.end(), 0.0), 1.0, 1e-9);
    }
  }
}

TEST(FitFcm, PrototypesSettleOnConcentratedSites) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.002);
  const double sites[] = {0.1, 0.5, 0.85};
  std::vector<double> values;
  for (double s : sites) {
    for (int i = 0; i < 200; ++i) values.push_back(std::clamp(s + noise(rng), 0.0, 1.0));
  }
  FcmConfig cfg;
  cfg.c = 3;
  const auto g = fit_fcm(values, cfg);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g.prototypes[j], sites[j], 1e-3);
}

TEST(FitFcm, FewDistinctValuesReduceC) {
  FcmConfig cfg;
  cfg.c = 5;
  const auto g = fit_fcm({0.0, 1.0, 0.0, 1.0, 0.5}, cfg);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.terms, default_terms(3));
  EXPECT_FALSE(g.warnings.empty());

  const auto single = fit_fcm({0.3, 0.3}, cfg);
  EXPECT_EQ(single.size(), 1u);
  EXPECT_EQ(assign_symbol(single, 0.9).confidence, 1.0);
}

TEST(AssignSymbol, ArgmaxWithLowerTermOnTies) {
  FeatureGranulation g;
  g.prototypes = {0.25, 0.75};  // exact binary fractions, so 0.5 is a true tie
  g.terms = {"low", "high"};
  const auto mid = assign_symbol(g, 0.5);
  EXPECT_EQ(mid.term, "low");
  EXPECT_DOUBLE_EQ(mid.confidence, 0.5);
  EXPECT_EQ(assign_symbol(g, 0.55).term, "high");
  EXPECT_EQ(assign_symbol(g, 0.75).confidence, 1.0);

  std::string warning;
  const auto clamped = assign_symbol(g, 1.4, &warning);
  EXPECT_EQ(clamped.term, "high");
  EXPECT_FALSE(warning.empty());
}

TEST(AssignSymbol, ConfidenceIsMaxMembership) {
  std::mt19937_64 rng(13);
  FcmConfig cfg;
  const auto g = fit_fcm(random_unit(rng, 100), cfg);
  for (double x : random_unit(rng, 100)) {
    const auto s = assign_symbol(g, x);
    const auto ref = oracle::fcm_memberships(g.prototypes, x, g.m);
    EXPECT_NEAR(s.confidence, *std::max_element(ref.begin(), ref.end()), 1e-12);
    EXPECT_GE(s.confidence, 1.0 / static_cast<double>(g.size()) - 1e-12);
  }
}

TEST(Granulate, DatasetAndJsonRoundTrip) {
  const Dataset ds = normalize(impute(load_arff(std::string(FUZZEX_DATA_DIR) + "/diabetes.arff")));
  const auto grans = granulate(ds, FcmConfig{});
  ASSERT_EQ(grans.size(), 8u);
  std::vector<std::string> names;
  for (const auto& f : ds.features) names.push_back(f.name);
  for (const auto& g : grans) ASSERT_TRUE(g.has_value());

  const auto back = granulations_from_json(granulations_to_json(grans, names), names);
  for (std::size_t f = 0; f < grans.size(); ++f) {
    EXPECT_EQ(back[f]->prototypes, grans[f]->prototypes);
    EXPECT_EQ(back[f]->terms, grans[f]->terms);
  }
  EXPECT_THROW(granulations_from_json("{", names), ParseError);
  EXPECT_THROW(granulations_from_json(R"({"features":[{"feature":"zz","prototypes":[0.5],"terms":["a"],"m":2}]})",
                                      names),
               DomainError);

  EXPECT_THROW(granulate(load_arff(std::string(FUZZEX_DATA_DIR) + "/diabetes.arff"), FcmConfig{}),
               ValidationError);  // raw values lie outside [0, 1]
}
