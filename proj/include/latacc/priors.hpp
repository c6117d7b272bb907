#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "latacc/errors.hpp"
#include "latacc/special.hpp"

namespace latacc {

// Beta(a,b) hyperparameters.
class BetaParams {
 public:
  BetaParams(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("Beta shape parameters must be positive, got (" +
                                  std::to_string(a) + ", " + std::to_string(b) + ")");
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double mean() const { return a_ / (a_ + b_); }
  double mode() const {
    if (!(a_ > 1.0 && b_ > 1.0))
      throw std::invalid_argument("Beta mode requires a > 1 and b > 1");
    return (a_ - 1.0) / (a_ + b_ - 2.0);
  }

  // Log density with normalizing constant. At the support boundary the value
  // is -inf unless the adjacent exponent is zero; in particular an exponent
  // below zero (shape < 1) is mapped to -inf rather than a diverging density,
  // so boundary states always evaluate to an impossible-point sentinel.
  double log_pdf(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("Beta log_pdf argument must lie in [0,1]");
    const double lognorm = log_beta(a_, b_);
    if (x == 0.0)
      return a_ == 1.0 ? (b_ - 1.0) * std::log1p(-x) - lognorm
                       : -std::numeric_limits<double>::infinity();
    if (x == 1.0)
      return b_ == 1.0 ? (a_ - 1.0) * std::log(x) - lognorm
                       : -std::numeric_limits<double>::infinity();
    return (a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log1p(-x) - lognorm;
  }

  friend bool operator==(const BetaParams&, const BetaParams&) = default;

 private:
  double a_, b_;
};

// Noninformative default used when no prior statement is given.
inline BetaParams uniform_prior() { return BetaParams(1.0, 1.0); }

// Upper-tail probability P(X > x) for X ~ Beta(a,b).
inline double beta_tail(const BetaParams& params, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("beta_tail threshold must lie in [0,1]");
  return 1.0 - ibeta(params.a(), params.b(), x);
}

// One Beta prior per model parameter.
class PriorSet {
 public:
  PriorSet(BetaParams se_a, BetaParams sp_a, BetaParams se_b, BetaParams sp_b,
           std::vector<BetaParams> prevalence_priors)
      : se_a_(se_a), sp_a_(sp_a), se_b_(se_b), sp_b_(sp_b),
        prevalence_priors_(std::move(prevalence_priors)) {
    if (prevalence_priors_.size() != 1 && prevalence_priors_.size() != 2)
      throw std::invalid_argument("PriorSet requires 1 or 2 prevalence priors");
  }

  static PriorSet one_dataset(BetaParams se_a, BetaParams sp_a, BetaParams se_b,
                              BetaParams sp_b, BetaParams pi) {
    return PriorSet(se_a, sp_a, se_b, sp_b, {pi});
  }
  static PriorSet two_datasets(BetaParams se_a, BetaParams sp_a, BetaParams se_b,
                               BetaParams sp_b, BetaParams pi_alpha, BetaParams pi_beta) {
    return PriorSet(se_a, sp_a, se_b, sp_b, {pi_alpha, pi_beta});
  }

  const BetaParams& se_a() const { return se_a_; }
  const BetaParams& sp_a() const { return sp_a_; }
  const BetaParams& se_b() const { return se_b_; }
  const BetaParams& sp_b() const { return sp_b_; }
  const std::vector<BetaParams>& prevalence_priors() const { return prevalence_priors_; }
  const BetaParams& prevalence_prior(std::size_t index) const {
    if (index >= prevalence_priors_.size())
      throw std::out_of_range("prevalence prior index out of range");
    return prevalence_priors_[index];
  }
  std::size_t prevalence_count() const { return prevalence_priors_.size(); }

 private:
  BetaParams se_a_, sp_a_, se_b_, sp_b_;
  std::vector<BetaParams> prevalence_priors_;
};

// Solves the BetaBuster-style statement "the mode is m, and P(X > threshold) =
// tail_mass" for Beta(a,b) with a > 1, b >= 1. With the mode held fixed the
// tail probability at a fixed threshold is monotone in the concentration
// s = a+b (increasing when the threshold sits below the mode, decreasing
// above), so the solve is a geometric bracket expansion followed by bisection.
inline BetaParams elicit_beta(double mode, double threshold, double tail_mass) {
  if (!(mode > 0.0 && mode < 1.0))
    throw std::invalid_argument("elicit_beta: mode must lie strictly inside (0,1)");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("elicit_beta: threshold must lie strictly inside (0,1)");
  if (!(tail_mass > 0.0 && tail_mass < 1.0))
    throw std::invalid_argument("elicit_beta: tail mass must lie strictly inside (0,1)");
  if (mode == threshold)
    throw std::invalid_argument("elicit_beta: mode and threshold must differ");

  const auto shapes = [mode](double s) {
    return BetaParams(1.0 + mode * (s - 2.0), 1.0 + (1.0 - mode) * (s - 2.0));
  };
  const auto residual = [&](double s) { return beta_tail(shapes(s), threshold) - tail_mass; };

  constexpr double s_min = 2.0 + 1e-9;
  constexpr double s_max = 1e7;
  const bool increasing = threshold < mode;

  // Near s = 2 the density is uniform, so the achievable tail range is
  // (1 - threshold, 1) below the mode and (0, 1 - threshold) above it.
  const double f_lo = residual(s_min);
  if (increasing && f_lo >= 0.0)
    throw elicitation_error(
        "tail mass too small: with the mode above the threshold, P(X > threshold) "
        "exceeds " + std::to_string(1.0 - threshold) + " for every unimodal Beta");
  if (!increasing && f_lo <= 0.0)
    throw elicitation_error(
        "tail mass too large: with the mode below the threshold, P(X > threshold) "
        "is below " + std::to_string(1.0 - threshold) + " for every unimodal Beta");

  double lo = s_min;
  double hi = 4.0;
  while (residual(hi) * f_lo > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > s_max) {
      if (increasing)
        throw elicitation_error(
            "tail mass too large: no Beta with a+b <= 1e7 concentrates that much "
            "mass above the threshold");
      throw elicitation_error(
          "tail mass too small: no Beta with a+b <= 1e7 pushes that much mass "
          "below the threshold");
    }
  }

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) * f_lo > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return shapes(0.5 * (lo + hi));
}

}  // namespace latacc
