#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "latacc/grid_oracle.hpp"

namespace {

using latacc::BetaParams;
using latacc::CrossTab;
using latacc::ModelVariant;
using latacc::PriorSet;

double mean_of(const std::vector<std::pair<std::string, double>>& means,
               const std::string& name) {
  for (const auto& [n, m] : means)
    if (n == name) return m;
  throw std::runtime_error("missing " + name);
}

const std::vector<CrossTab> kNoData{CrossTab(0, 0, 0, 0)};

TEST(GridOracle, NoDataUniformPosterior) {
  const auto priors = PriorSet::one_dataset(latacc::uniform_prior(), latacc::uniform_prior(),
                                            latacc::uniform_prior(), latacc::uniform_prior(),
                                            latacc::uniform_prior());
  const auto means = latacc::grid_posterior_means(ModelVariant::one_dataset, kNoData,
                                                  priors, 15, false);
  for (const auto& [name, mean] : means) EXPECT_NEAR(mean, 0.5, 1.0 / 15.0) << name;
  // The symmetric grid actually nails the uniform mean.
  for (const auto& [name, mean] : means) EXPECT_NEAR(mean, 0.5, 1e-9) << name;
}

TEST(GridOracle, NoDataRecoversBetaMeans) {
  const auto priors = PriorSet::one_dataset(BetaParams(3, 3), BetaParams(2, 4),
                                            latacc::uniform_prior(), latacc::uniform_prior(),
                                            BetaParams(2, 4));
  const auto means = latacc::grid_posterior_means(ModelVariant::one_dataset, kNoData,
                                                  priors, 15, false);
  EXPECT_NEAR(mean_of(means, "Se_A"), 0.5, 1e-6);
  EXPECT_NEAR(mean_of(means, "Sp_A"), 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(mean_of(means, "pi"), 1.0 / 3.0, 1e-3);
}

// Under flat priors the constraint restricts (Se,Sp) to the triangle above
// the anti-diagonal, whose marginal mean is 2/3.
TEST(GridOracle, ConstraintRestrictsToTriangle) {
  const auto priors = PriorSet::one_dataset(latacc::uniform_prior(), latacc::uniform_prior(),
                                            latacc::uniform_prior(), latacc::uniform_prior(),
                                            latacc::uniform_prior());
  const auto means = latacc::grid_posterior_means(ModelVariant::one_dataset, kNoData,
                                                  priors, 25, true);
  for (const char* name : {"Se_A", "Sp_A", "Se_B", "Sp_B"})
    EXPECT_NEAR(mean_of(means, name), 2.0 / 3.0, 0.02) << name;
  EXPECT_NEAR(mean_of(means, "pi"), 0.5, 1e-9);
}

TEST(GridOracle, TwoDatasetPrevalencePriors) {
  const auto priors = PriorSet::two_datasets(latacc::uniform_prior(), latacc::uniform_prior(),
                                             latacc::uniform_prior(), latacc::uniform_prior(),
                                             BetaParams(2, 4), BetaParams(4, 2));
  const std::vector<CrossTab> tabs{CrossTab(0, 0, 0, 0), CrossTab(0, 0, 0, 0)};
  const auto means = latacc::grid_posterior_means(ModelVariant::two_datasets, tabs,
                                                  priors, 11, false);
  EXPECT_NEAR(mean_of(means, "pi"), 1.0 / 3.0, 3e-3);
  EXPECT_NEAR(mean_of(means, "pi_beta"), 2.0 / 3.0, 3e-3);
}

TEST(GridOracle, RefinementStability) {
  const auto priors = PriorSet::one_dataset(BetaParams(20, 4), BetaParams(20, 4),
                                            BetaParams(20, 4), BetaParams(20, 4),
                                            latacc::uniform_prior());
  const std::vector<CrossTab> tabs{CrossTab(40, 3, 7, 100)};
  const auto coarse =
      latacc::grid_posterior_means(ModelVariant::one_dataset, tabs, priors, 15, true);
  const auto fine =
      latacc::grid_posterior_means(ModelVariant::one_dataset, tabs, priors, 30, true);
  for (std::size_t i = 0; i < coarse.size(); ++i)
    EXPECT_NEAR(coarse[i].second, fine[i].second, 2.0 / 15.0) << coarse[i].first;
}

TEST(GridOracle, DeterministicAcrossRuns) {
  const auto priors = PriorSet::one_dataset(BetaParams(20, 4), BetaParams(20, 4),
                                            BetaParams(20, 4), BetaParams(20, 4),
                                            latacc::uniform_prior());
  const std::vector<CrossTab> tabs{CrossTab(40, 3, 7, 100)};
  const auto a =
      latacc::grid_posterior_means(ModelVariant::one_dataset, tabs, priors, 13, true);
  const auto b =
      latacc::grid_posterior_means(ModelVariant::one_dataset, tabs, priors, 13, true);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(a[i].second, b[i].second) << a[i].first;
}

TEST(GridOracle, Guards) {
  const auto priors = PriorSet::one_dataset(latacc::uniform_prior(), latacc::uniform_prior(),
                                            latacc::uniform_prior(), latacc::uniform_prior(),
                                            latacc::uniform_prior());
  EXPECT_THROW(latacc::grid_posterior_means(ModelVariant::one_dataset, kNoData, priors,
                                            10, false),
               latacc::grid_error);
  EXPECT_THROW(latacc::grid_posterior_means(ModelVariant::one_dataset, kNoData, priors,
                                            64, false),
               latacc::grid_error);  // 64^5 > 1e9
  const std::vector<CrossTab> two{CrossTab(0, 0, 0, 0), CrossTab(0, 0, 0, 0)};
  EXPECT_THROW(latacc::grid_posterior_means(ModelVariant::two_datasets, two, priors, 11,
                                            false),
               latacc::grid_error);  // priors carry a single prevalence
}

}  // namespace
