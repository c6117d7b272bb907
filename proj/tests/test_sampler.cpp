#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "latacc/sampler.hpp"
#include "test_util.hpp"

namespace {

using latacc::BetaParams;
using latacc::CrossTab;
using latacc::LatentSplit;
using latacc::ModelVariant;
using latacc::ParamState;
using latacc::PriorSet;
using latacc::Rng;
using latacc::SamplerConfig;

PriorSet flat_priors(std::size_t prevalences = 1) {
  std::vector<BetaParams> pi(prevalences, latacc::uniform_prior());
  return PriorSet(latacc::uniform_prior(), latacc::uniform_prior(),
                  latacc::uniform_prior(), latacc::uniform_prior(), pi);
}

TEST(SampleLatents, PerfectSpecificityPinsBothPositiveCell) {
  Rng rng(1);
  const CrossTab tab(25, 5, 5, 65);
  const auto state = ParamState::one_dataset(0.8, 1.0, 0.7, 1.0, 0.4);
  for (int i = 0; i < 50; ++i) {
    const LatentSplit z = latacc::sample_latents(tab, state, 0, rng);
    EXPECT_EQ(z.z1, tab.y1());
  }
}

TEST(SampleLatents, PerfectSensitivityEmptiesBothNegativeCell) {
  Rng rng(2);
  const CrossTab tab(25, 5, 5, 65);
  const auto state = ParamState::one_dataset(1.0, 0.9, 1.0, 0.85, 0.4);
  for (int i = 0; i < 50; ++i) {
    const LatentSplit z = latacc::sample_latents(tab, state, 0, rng);
    EXPECT_EQ(z.z4, 0);
  }
}

// Empirical mean of z1/y1 against the independently evaluated latent-positive
// fraction 0.24454336 / 0.246525824 at the worked example's posterior means.
TEST(SampleLatents, BinomialFractionAtPosteriorMeanPoint) {
  Rng rng(3);
  const CrossTab tab(10000, 1, 1, 1);
  const auto state = ParamState::one_dataset(0.898, 0.956, 0.920, 0.936, 0.296);
  constexpr int reps = 1000;
  const double expected = 0.9919583921561094;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    const LatentSplit z = latacc::sample_latents(tab, state, 0, rng);
    EXPECT_LE(z.z1, tab.y1());
    sum += static_cast<double>(z.z1) / static_cast<double>(tab.y1());
  }
  const double se =
      std::sqrt(expected * (1.0 - expected) / (10000.0 * static_cast<double>(reps)));
  EXPECT_NEAR(sum / reps, expected, 3.0 * se);
}

TEST(SampleLatents, ZeroProbabilityCellWithObservationsThrows) {
  Rng rng(4);
  // Perfect classifiers make the disagreement cells impossible.
  const auto state = ParamState::one_dataset(1.0, 1.0, 1.0, 1.0, 0.3);
  const CrossTab tab(10, 2, 0, 5);
  EXPECT_THROW(latacc::sample_latents(tab, state, 0, rng), latacc::sampler_error);
}

// Hand-tallied conjugate updates for a frozen latent split of (40,3,7,100):
// z=(38,2,5,3) gives Se_A~Beta(60,12), Sp_A~Beta(119,7), Se_B~Beta(63,9),
// Sp_B~Beta(118,8), pi~Beta(49,103) under Beta(20,4) rate / Beta(1,1)
// prevalence priors.
TEST(FullConditionals, MatchHandTalliedCounts) {
  const std::vector<CrossTab> tabs{CrossTab(40, 3, 7, 100)};
  const std::vector<LatentSplit> latents{LatentSplit{38, 2, 5, 3}};
  const auto priors = PriorSet::one_dataset(BetaParams(20, 4), BetaParams(20, 4),
                                            BetaParams(20, 4), BetaParams(20, 4),
                                            latacc::uniform_prior());
  const auto cond = latacc::full_conditionals(latents, tabs, priors);
  EXPECT_EQ(cond.se_a, BetaParams(60, 12));
  EXPECT_EQ(cond.sp_a, BetaParams(119, 7));
  EXPECT_EQ(cond.se_b, BetaParams(63, 9));
  EXPECT_EQ(cond.sp_b, BetaParams(118, 8));
  ASSERT_EQ(cond.prevalence.size(), 1u);
  EXPECT_EQ(cond.prevalence[0], BetaParams(49, 103));
}

TEST(FullConditionals, NoDataReducesToPriors) {
  const std::vector<CrossTab> tabs{CrossTab(0, 0, 0, 0)};
  const std::vector<LatentSplit> latents{LatentSplit{}};
  const auto priors = PriorSet::one_dataset(BetaParams(3, 5), BetaParams(2, 7),
                                            BetaParams(4, 4), BetaParams(6, 1),
                                            BetaParams(9, 2));
  const auto cond = latacc::full_conditionals(latents, tabs, priors);
  EXPECT_EQ(cond.se_a, priors.se_a());
  EXPECT_EQ(cond.sp_a, priors.sp_a());
  EXPECT_EQ(cond.se_b, priors.se_b());
  EXPECT_EQ(cond.sp_b, priors.sp_b());
  EXPECT_EQ(cond.prevalence[0], priors.prevalence_prior(0));
}

TEST(FullConditionals, AllLatentPositiveBookkeeping) {
  const std::vector<CrossTab> tabs{CrossTab(12, 7, 9, 22)};
  const std::vector<LatentSplit> latents{LatentSplit{12, 7, 9, 22}};
  const auto priors = flat_priors();
  const auto cond = latacc::full_conditionals(latents, tabs, priors);
  EXPECT_EQ(cond.prevalence[0], BetaParams(1 + 50, 1));
  EXPECT_EQ(cond.sp_a, BetaParams(1, 1));  // no latent negatives anywhere
}

TEST(FullConditionals, RejectsInconsistentLatents) {
  const std::vector<CrossTab> tabs{CrossTab(5, 0, 0, 5)};
  const std::vector<LatentSplit> latents{LatentSplit{6, 0, 0, 0}};
  EXPECT_THROW(latacc::full_conditionals(latents, tabs, flat_priors()),
               std::invalid_argument);
}

TEST(UpdateParameters, EnforcedConstraintHoldsOnEveryDraw) {
  Rng rng(5);
  const std::vector<CrossTab> tabs{CrossTab(8, 6, 7, 9)};
  const std::vector<LatentSplit> latents{LatentSplit{4, 3, 3, 4}};
  const auto priors = flat_priors();
  for (int i = 0; i < 200; ++i) {
    const ParamState s = latacc::update_parameters(latents, tabs, priors, rng, true);
    EXPECT_GT(s.se_a() + s.sp_a(), 1.0);
    EXPECT_GT(s.se_b() + s.sp_b(), 1.0);
  }
}

TEST(InitialState, PriorMeansWithDeterministicJitter) {
  const auto priors = PriorSet::one_dataset(BetaParams(20, 4), BetaParams(20, 4),
                                            BetaParams(2, 2), BetaParams(2, 2),
                                            latacc::uniform_prior());
  const auto chain0 = latacc::initial_state(priors, 0);
  EXPECT_DOUBLE_EQ(chain0.se_a(), 20.0 / 24.0);
  EXPECT_DOUBLE_EQ(chain0.prevalence(0), 0.5);
  const auto chain1 = latacc::initial_state(priors, 1);
  EXPECT_DOUBLE_EQ(chain1.se_a(), 20.0 / 24.0 + 0.05);
  const auto chain2 = latacc::initial_state(priors, 2);
  EXPECT_DOUBLE_EQ(chain2.se_a(), 20.0 / 24.0 - 0.05);
  const auto chain3 = latacc::initial_state(priors, 3);
  EXPECT_DOUBLE_EQ(chain3.se_a(), 20.0 / 24.0 + 0.025);
  // Clipping keeps extreme prior means inside the open cube.
  const auto extreme = PriorSet::one_dataset(BetaParams(1000, 1), BetaParams(20, 4),
                                             BetaParams(20, 4), BetaParams(20, 4),
                                             latacc::uniform_prior());
  EXPECT_DOUBLE_EQ(latacc::initial_state(extreme, 1).se_a(), 0.99);
}

TEST(RunChain, DeterministicAcrossInvocations) {
  const std::vector<CrossTab> tabs{CrossTab(40, 3, 7, 100)};
  const auto priors = PriorSet::one_dataset(BetaParams(20, 4), BetaParams(20, 4),
                                            BetaParams(20, 4), BetaParams(20, 4),
                                            latacc::uniform_prior());
  SamplerConfig config;
  config.n_iterations = 1500;
  config.burn_in = 300;
  config.thin = 3;
  config.n_chains = 3;
  config.seed = 99;
  const auto a = latacc::run_chain(ModelVariant::one_dataset, tabs, priors, config);
  const auto b = latacc::run_chain(ModelVariant::one_dataset, tabs, priors, config);
  ASSERT_EQ(a.draws.size(), b.draws.size());
  for (std::size_t q = 0; q < a.draws.size(); ++q) EXPECT_EQ(a.draws[q], b.draws[q]);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.size(), 3 * (1500 - 300) / 3);
}

TEST(RunChain, DrawsStayInsideSupportWithConstraint) {
  const std::vector<CrossTab> tabs{CrossTab(40, 3, 7, 100)};
  const auto priors = flat_priors();
  SamplerConfig config;
  config.n_iterations = 1200;
  config.burn_in = 200;
  config.thin = 2;
  config.n_chains = 2;
  config.seed = 7;
  config.enforce_identifiability = true;
  const auto chains = latacc::run_chain(ModelVariant::one_dataset, tabs, priors, config);
  const auto& se_a = chains.quantity("Se_A");
  const auto& sp_a = chains.quantity("Sp_A");
  const auto& se_b = chains.quantity("Se_B");
  const auto& sp_b = chains.quantity("Sp_B");
  const auto& pi = chains.quantity("pi");
  for (std::size_t i = 0; i < se_a.size(); ++i) {
    for (const double v : {se_a[i], sp_a[i], se_b[i], sp_b[i], pi[i]}) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
    EXPECT_GT(se_a[i] + sp_a[i], 1.0);
    EXPECT_GT(se_b[i] + sp_b[i], 1.0);
  }
}

// With no data the chain draws from the prior.
TEST(RunChain, NoDataRecoversPriorMeans) {
  const std::vector<CrossTab> tabs{CrossTab(0, 0, 0, 0)};
  const auto priors = PriorSet::one_dataset(BetaParams(2, 5), BetaParams(4, 2),
                                            BetaParams(3, 3), BetaParams(5, 1),
                                            BetaParams(1, 3));
  SamplerConfig config;
  config.enforce_identifiability = false;
  config.seed = 21;
  const auto chains = latacc::run_chain(ModelVariant::one_dataset, tabs, priors, config);
  const auto mean = [&](const char* name) {
    const auto& v = chains.quantity(name);
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  EXPECT_NEAR(mean("Se_A"), 2.0 / 7.0, 0.01);
  EXPECT_NEAR(mean("Sp_A"), 4.0 / 6.0, 0.01);
  EXPECT_NEAR(mean("Se_B"), 0.5, 0.01);
  EXPECT_NEAR(mean("Sp_B"), 5.0 / 6.0, 0.01);
  EXPECT_NEAR(mean("pi"), 0.25, 0.01);
}

TEST(RunChain, IdenticalDatasetsAreExchangeable) {
  const CrossTab tab(20, 6, 6, 68);
  const std::vector<CrossTab> tabs{tab, tab};
  const auto priors = PriorSet::two_datasets(BetaParams(8, 3), BetaParams(8, 3),
                                             BetaParams(8, 3), BetaParams(8, 3),
                                             BetaParams(2, 2), BetaParams(2, 2));
  SamplerConfig config;
  config.seed = 31;
  const auto chains = latacc::run_chain(ModelVariant::two_datasets, tabs, priors, config);
  const auto mean = [&](const char* name) {
    const auto& v = chains.quantity(name);
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  EXPECT_NEAR(mean("pi"), mean("pi_beta"), 0.01);
}

TEST(RunChain, ValidatesConfigAndShapes) {
  const std::vector<CrossTab> one{CrossTab(1, 1, 1, 1)};
  const std::vector<CrossTab> two{CrossTab(1, 1, 1, 1), CrossTab(1, 1, 1, 1)};
  SamplerConfig bad;
  bad.burn_in = bad.n_iterations;
  EXPECT_THROW(latacc::run_chain(ModelVariant::one_dataset, one, flat_priors(), bad),
               latacc::config_error);
  SamplerConfig tiny;
  tiny.n_iterations = 150;
  tiny.burn_in = 50;
  tiny.thin = 2;  // keeps 50 < 100
  EXPECT_THROW(latacc::run_chain(ModelVariant::one_dataset, one, flat_priors(), tiny),
               latacc::config_error);
  SamplerConfig ok;
  EXPECT_THROW(latacc::run_chain(ModelVariant::one_dataset, two, flat_priors(), ok),
               latacc::config_error);
  EXPECT_THROW(latacc::run_chain(ModelVariant::two_datasets, two, flat_priors(), ok),
               latacc::config_error);  // priors carry one prevalence
}

// A prior stacked on the wrong side of Se+Sp=1 makes the constrained update
// reject until the cap trips.
TEST(RunChain, ConstraintCapRaisesIdentifiabilityError) {
  const std::vector<CrossTab> tabs{CrossTab(0, 0, 0, 0)};
  const auto priors = PriorSet::one_dataset(BetaParams(1, 500), BetaParams(1, 500),
                                            BetaParams(20, 4), BetaParams(20, 4),
                                            latacc::uniform_prior());
  SamplerConfig config;
  config.n_chains = 1;
  EXPECT_THROW(latacc::run_chain(ModelVariant::one_dataset, tabs, priors, config),
               latacc::identifiability_error);
}

}  // namespace
