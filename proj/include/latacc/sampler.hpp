#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "latacc/chains.hpp"
#include "latacc/errors.hpp"
#include "latacc/model.hpp"
#include "latacc/priors.hpp"
#include "latacc/rng.hpp"

namespace latacc {

// Number of latent-positive observations per cross-tab cell.
struct LatentSplit {
  std::int64_t z1 = 0;
  std::int64_t z2 = 0;
  std::int64_t z3 = 0;
  std::int64_t z4 = 0;

  std::int64_t total() const { return z1 + z2 + z3 + z4; }
  std::array<std::int64_t, 4> cells() const { return {z1, z2, z3, z4}; }
};

// Draws the latent true-label counts: cell i contributes
// z_i ~ Binomial(y_i, t_i / p_i) where t_i is the prevalence-weighted summand
// of cell probability p_i.
inline LatentSplit sample_latents(const CrossTab& tab, const ParamState& state,
                                  std::size_t prevalence_index, Rng& rng) {
  const auto terms = detail::cell_terms(state, prevalence_index);
  std::array<std::int64_t, 4> z{};
  for (int i = 0; i < 4; ++i) {
    const std::int64_t y = tab.cells()[i];
    if (y == 0) continue;
    if (terms.total[i] <= 0.0)
      throw sampler_error("cell " + std::to_string(i + 1) +
                          " has zero probability but " + std::to_string(y) +
                          " observations");
    z[i] = rng.binomial(y, terms.positive[i] / terms.total[i]);
  }
  return LatentSplit{z[0], z[1], z[2], z[3]};
}

// The analytic Beta full conditionals implied by a set of latent splits.
struct FullConditionals {
  BetaParams se_a;
  BetaParams sp_a;
  BetaParams se_b;
  BetaParams sp_b;
  std::vector<BetaParams> prevalence;
};

// Tallies latent-positive / latent-negative counts into the conjugate Beta
// full conditionals, summing over datasets for the shared accuracy rates.
inline FullConditionals full_conditionals(std::span<const LatentSplit> latents,
                                          std::span<const CrossTab> tabs,
                                          const PriorSet& priors) {
  if (latents.size() != tabs.size() || tabs.empty())
    throw std::invalid_argument("full_conditionals: one latent split per cross-tab required");
  if (priors.prevalence_count() != tabs.size())
    throw std::invalid_argument("full_conditionals: prior set does not match dataset count");

  std::int64_t se_a_pos = 0, se_a_neg = 0, sp_a_pos = 0, sp_a_neg = 0;
  std::int64_t se_b_pos = 0, se_b_neg = 0, sp_b_pos = 0, sp_b_neg = 0;
  std::vector<BetaParams> prevalence;
  prevalence.reserve(tabs.size());

  for (std::size_t d = 0; d < tabs.size(); ++d) {
    const auto y = tabs[d].cells();
    const auto z = latents[d].cells();
    for (int i = 0; i < 4; ++i)
      if (z[i] < 0 || z[i] > y[i])
        throw std::invalid_argument("latent split inconsistent with cross-tab counts");

    // A predicts 1 in cells 1,2 and 0 in cells 3,4; B predicts 1 in cells 1,3.
    se_a_pos += z[0] + z[1];
    se_a_neg += z[2] + z[3];
    sp_a_pos += (y[2] - z[2]) + (y[3] - z[3]);
    sp_a_neg += (y[0] - z[0]) + (y[1] - z[1]);
    se_b_pos += z[0] + z[2];
    se_b_neg += z[1] + z[3];
    sp_b_pos += (y[1] - z[1]) + (y[3] - z[3]);
    sp_b_neg += (y[0] - z[0]) + (y[2] - z[2]);

    const std::int64_t zd = latents[d].total();
    const auto& pp = priors.prevalence_prior(d);
    prevalence.emplace_back(pp.a() + static_cast<double>(zd),
                            pp.b() + static_cast<double>(tabs[d].n() - zd));
  }

  return FullConditionals{
      BetaParams(priors.se_a().a() + se_a_pos, priors.se_a().b() + se_a_neg),
      BetaParams(priors.sp_a().a() + sp_a_pos, priors.sp_a().b() + sp_a_neg),
      BetaParams(priors.se_b().a() + se_b_pos, priors.se_b().b() + se_b_neg),
      BetaParams(priors.sp_b().a() + sp_b_pos, priors.sp_b().b() + sp_b_neg),
      std::move(prevalence)};
}

namespace detail {

inline constexpr int kConstraintRedrawCap = 1000;

// Draws a (sensitivity, specificity) pair from its two Beta conditionals,
// optionally rejecting until se + sp > 1. Joint rejection from the product of
// the two conditionals is an exact draw from the constrained conditional.
inline std::pair<double, double> draw_rate_pair(const BetaParams& se_cond,
                                                const BetaParams& sp_cond, Rng& rng,
                                                bool enforce_identifiability,
                                                const char* classifier) {
  for (int attempt = 0; attempt < kConstraintRedrawCap; ++attempt) {
    const double se = rng.beta(se_cond.a(), se_cond.b());
    const double sp = rng.beta(sp_cond.a(), sp_cond.b());
    if (!enforce_identifiability || se + sp > 1.0) return {se, sp};
  }
  throw identifiability_error(
      std::string("classifier ") + classifier + ": could not draw Se + Sp > 1 in " +
      std::to_string(kConstraintRedrawCap) +
      " attempts; the posterior concentrates on the non-identifiable side -- "
      "use stronger (more accurate-classifier) priors or disable the constraint");
}

}  // namespace detail

// One conjugate Gibbs parameter update given frozen latents. With
// enforce_identifiability the accuracy pairs are redrawn until Se + Sp > 1
// (capped, then identifiability_error).
inline ParamState update_parameters(std::span<const LatentSplit> latents,
                                    std::span<const CrossTab> tabs,
                                    const PriorSet& priors, Rng& rng,
                                    bool enforce_identifiability = false) {
  const FullConditionals cond = full_conditionals(latents, tabs, priors);
  const auto [se_a, sp_a] =
      detail::draw_rate_pair(cond.se_a, cond.sp_a, rng, enforce_identifiability, "A");
  const auto [se_b, sp_b] =
      detail::draw_rate_pair(cond.se_b, cond.sp_b, rng, enforce_identifiability, "B");
  std::vector<Rate> prevalences;
  prevalences.reserve(cond.prevalence.size());
  for (const auto& pc : cond.prevalence)
    prevalences.emplace_back(rng.beta(pc.a(), pc.b()));
  return ParamState(Rate(se_a), Rate(sp_a), Rate(se_b), Rate(sp_b),
                    std::move(prevalences));
}

// Deterministic per-chain start: prior means plus a fixed overdispersion
// offset (0, +0.05, -0.05, +0.025, -0.025, ...), clipped to [0.01, 0.99].
inline ParamState initial_state(const PriorSet& priors, std::int64_t chain_index) {
  double offset = 0.0;
  if (chain_index > 0) {
    const double magnitude =
        0.05 * std::pow(0.5, static_cast<double>((chain_index - 1) / 2));
    offset = (chain_index % 2 == 1) ? magnitude : -magnitude;
  }
  const auto place = [offset](double mean) {
    return std::clamp(mean + offset, 0.01, 0.99);
  };
  std::vector<Rate> prevalences;
  prevalences.reserve(priors.prevalence_count());
  for (const auto& pp : priors.prevalence_priors())
    prevalences.emplace_back(place(pp.mean()));
  return ParamState(Rate(place(priors.se_a().mean())), Rate(place(priors.sp_a().mean())),
                    Rate(place(priors.se_b().mean())), Rate(place(priors.sp_b().mean())),
                    std::move(prevalences));
}

// Runs the latent-label Gibbs sampler: alternating latent draws and conjugate
// parameter updates, burn-in discarded, every thin-th draw kept. Chains are
// independent given their derived streams and run concurrently; the result is
// assembled chain-major so output is identical regardless of scheduling.
inline ChainSet run_chain(ModelVariant variant, std::span<const CrossTab> tabs,
                          const PriorSet& priors, const SamplerConfig& config) {
  config.validate();
  if (tabs.size() != prevalence_count(variant))
    throw config_error(std::string(to_string(variant)) + " model requires " +
                       std::to_string(prevalence_count(variant)) + " cross-tab(s), got " +
                       std::to_string(tabs.size()));
  if (priors.prevalence_count() != tabs.size())
    throw config_error("prior set provides " + std::to_string(priors.prevalence_count()) +
                       " prevalence prior(s) but the model needs " +
                       std::to_string(tabs.size()));

  ChainSet out;
  out.variant = variant;
  out.config = config;
  out.names = parameter_names(variant);
  out.n_chains = config.n_chains;
  out.kept_per_chain = config.kept_per_chain();
  out.draws.assign(out.names.size(), std::vector<double>(out.size()));
  out.iterations.assign(out.size(), 0);

  const auto run_one = [&](std::int64_t chain) {
    Rng rng(config.seed, static_cast<std::uint64_t>(chain));
    ParamState state = initial_state(priors, chain);
    std::vector<LatentSplit> latents(tabs.size());
    std::int64_t kept = 0;
    const std::int64_t base = chain * out.kept_per_chain;
    for (std::int64_t iter = 1; iter <= config.n_iterations; ++iter) {
      for (std::size_t d = 0; d < tabs.size(); ++d)
        latents[d] = sample_latents(tabs[d], state, d, rng);
      state = update_parameters(latents, tabs, priors, rng,
                                config.enforce_identifiability);
      if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0 &&
          kept < out.kept_per_chain) {
        const std::int64_t slot = base + kept;
        out.draws[0][slot] = state.se_a();
        out.draws[1][slot] = state.sp_a();
        out.draws[2][slot] = state.se_b();
        out.draws[3][slot] = state.sp_b();
        out.draws[4][slot] = state.prevalence(0);
        if (variant == ModelVariant::two_datasets)
          out.draws[5][slot] = state.prevalence(1);
        out.iterations[slot] = iter;
        ++kept;
      }
    }
  };

  if (config.n_chains == 1) {
    run_one(0);
  } else {
    std::vector<std::exception_ptr> failures(config.n_chains);
    std::vector<std::thread> workers;
    workers.reserve(config.n_chains);
    for (std::int64_t c = 0; c < config.n_chains; ++c)
      workers.emplace_back([&, c] {
        try {
          run_one(c);
        } catch (...) {
          failures[c] = std::current_exception();
        }
      });
    for (auto& w : workers) w.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  return out;
}

}  // namespace latacc
