#pragma once

#include <limits>
#include <span>
#include <stdexcept>

#include "latacc/model.hpp"
#include "latacc/priors.hpp"

namespace latacc {

// Unnormalized-by-nothing joint log posterior: per-dataset multinomial
// log-likelihoods (coefficient included) plus Beta prior log-densities
// (normalizing constants included), so the only offset from the true log
// posterior is the marginal-likelihood constant. Boundary parameter values
// with zero or non-finite prior density evaluate to -inf, never throw.
inline double joint_log_posterior(const ParamState& state,
                                  std::span<const CrossTab> tabs,
                                  const PriorSet& priors) {
  if (tabs.size() != state.prevalences().size())
    throw std::invalid_argument("joint_log_posterior: one cross-tab per prevalence required");
  if (priors.prevalence_count() != state.prevalences().size())
    throw std::invalid_argument("joint_log_posterior: prior set does not match model variant");

  double lp = 0.0;
  lp += priors.se_a().log_pdf(state.se_a());
  lp += priors.sp_a().log_pdf(state.sp_a());
  lp += priors.se_b().log_pdf(state.se_b());
  lp += priors.sp_b().log_pdf(state.sp_b());
  for (std::size_t d = 0; d < tabs.size(); ++d)
    lp += priors.prevalence_prior(d).log_pdf(state.prevalence(d));
  if (lp == -std::numeric_limits<double>::infinity()) return lp;

  for (std::size_t d = 0; d < tabs.size(); ++d)
    lp += log_likelihood(tabs[d], cell_probs(state, d));
  return lp;
}

}  // namespace latacc
