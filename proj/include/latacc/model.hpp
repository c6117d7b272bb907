#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "latacc/errors.hpp"

namespace latacc {

enum class ModelVariant { one_dataset, two_datasets };

inline std::size_t prevalence_count(ModelVariant v) {
  return v == ModelVariant::one_dataset ? 1u : 2u;
}

inline const char* to_string(ModelVariant v) {
  return v == ModelVariant::one_dataset ? "one-dataset" : "two-datasets";
}

// Probability in [0,1]; construction enforces the range.
class Rate {
 public:
  explicit Rate(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
      throw std::invalid_argument("Rate must lie in [0,1], got " + std::to_string(value));
  }
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

// Joint prediction counts for one dataset. Cell order is fixed as
// (A=1,B=1), (A=1,B=0), (A=0,B=1), (A=0,B=0).
class CrossTab {
 public:
  CrossTab(std::int64_t y1, std::int64_t y2, std::int64_t y3, std::int64_t y4)
      : y_{y1, y2, y3, y4} {
    for (auto y : y_)
      if (y < 0) throw std::invalid_argument("CrossTab counts must be non-negative");
  }

  std::int64_t y1() const { return y_[0]; }
  std::int64_t y2() const { return y_[1]; }
  std::int64_t y3() const { return y_[2]; }
  std::int64_t y4() const { return y_[3]; }
  std::int64_t n() const { return y_[0] + y_[1] + y_[2] + y_[3]; }
  const std::array<std::int64_t, 4>& cells() const { return y_; }

  friend bool operator==(const CrossTab&, const CrossTab&) = default;

 private:
  std::array<std::int64_t, 4> y_;
};

// A point on the 4-cell probability simplex.
class CellProbs {
 public:
  CellProbs(double p1, double p2, double p3, double p4) : p_{p1, p2, p3, p4} {
    double sum = 0.0;
    for (auto p : p_) {
      if (!(p >= 0.0)) throw std::invalid_argument("CellProbs entries must be non-negative");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("CellProbs must sum to 1 within 1e-12, got " +
                                  std::to_string(sum));
  }

  double p1() const { return p_[0]; }
  double p2() const { return p_[1]; }
  double p3() const { return p_[2]; }
  double p4() const { return p_[3]; }
  const std::array<double, 4>& as_array() const { return p_; }

 private:
  std::array<double, 4> p_;
};

// One point in parameter space: four accuracy rates and one prevalence per
// dataset (1 for the one-dataset model, 2 for the two-datasets model).
class ParamState {
 public:
  ParamState(Rate se_a, Rate sp_a, Rate se_b, Rate sp_b, std::vector<Rate> prevalences)
      : se_a_(se_a), sp_a_(sp_a), se_b_(se_b), sp_b_(sp_b),
        prevalences_(std::move(prevalences)) {
    if (prevalences_.size() != 1 && prevalences_.size() != 2)
      throw std::invalid_argument("ParamState requires 1 or 2 prevalences");
  }

  static ParamState one_dataset(double se_a, double sp_a, double se_b, double sp_b,
                                double pi) {
    return ParamState(Rate(se_a), Rate(sp_a), Rate(se_b), Rate(sp_b), {Rate(pi)});
  }
  static ParamState two_datasets(double se_a, double sp_a, double se_b, double sp_b,
                                 double pi_alpha, double pi_beta) {
    return ParamState(Rate(se_a), Rate(sp_a), Rate(se_b), Rate(sp_b),
                      {Rate(pi_alpha), Rate(pi_beta)});
  }

  Rate se_a() const { return se_a_; }
  Rate sp_a() const { return sp_a_; }
  Rate se_b() const { return se_b_; }
  Rate sp_b() const { return sp_b_; }
  const std::vector<Rate>& prevalences() const { return prevalences_; }
  Rate prevalence(std::size_t index) const {
    if (index >= prevalences_.size())
      throw std::out_of_range("prevalence index " + std::to_string(index) +
                              " out of range for " + std::to_string(prevalences_.size()) +
                              " prevalence(s)");
    return prevalences_[index];
  }
  ModelVariant variant() const {
    return prevalences_.size() == 1 ? ModelVariant::one_dataset
                                    : ModelVariant::two_datasets;
  }

 private:
  Rate se_a_, sp_a_, se_b_, sp_b_;
  std::vector<Rate> prevalences_;
};

namespace detail {

// Each cell probability decomposes as (latent-positive term) + (latent-negative
// term); the positive term is the one weighted by the prevalence. The sampler
// needs both pieces, so they are computed together. Term evaluation order is
// kept uniform across cells so the algebraic cell symmetries hold bit-exactly
// on inputs whose complements are exact.
struct CellTerms {
  std::array<double, 4> positive;
  std::array<double, 4> total;
};

inline CellTerms cell_terms(double se_a, double sp_a, double se_b, double sp_b,
                            double pi) {
  const double q = 1.0 - pi;
  CellTerms t;
  t.positive[0] = pi * se_a * se_b;
  t.positive[1] = pi * se_a * (1.0 - se_b);
  t.positive[2] = pi * (1.0 - se_a) * se_b;
  t.positive[3] = pi * (1.0 - se_a) * (1.0 - se_b);
  t.total[0] = t.positive[0] + q * (1.0 - sp_a) * (1.0 - sp_b);
  t.total[1] = t.positive[1] + q * (1.0 - sp_a) * sp_b;
  t.total[2] = t.positive[2] + q * sp_a * (1.0 - sp_b);
  t.total[3] = t.positive[3] + q * sp_a * sp_b;
  return t;
}

inline CellTerms cell_terms(const ParamState& state, std::size_t prevalence_index) {
  return cell_terms(state.se_a(), state.sp_a(), state.se_b(), state.sp_b(),
                    state.prevalence(prevalence_index));
}

}  // namespace detail

// The four joint-prediction cell probabilities implied by a parameter state,
// using the prevalence of the given dataset.
inline CellProbs cell_probs(const ParamState& state, std::size_t prevalence_index = 0) {
  const auto t = detail::cell_terms(state, prevalence_index);
  return CellProbs(t.total[0], t.total[1], t.total[2], t.total[3]);
}

// The latent-positive summand of each cell probability (the prevalence-weighted
// term), in cell order.
inline std::array<double, 4> positive_cell_terms(const ParamState& state,
                                                 std::size_t prevalence_index = 0) {
  return detail::cell_terms(state, prevalence_index).positive;
}

namespace detail {

// Data-independent part of the multinomial log-pmf.
inline double log_multinomial_coefficient(const CrossTab& tab) {
  double c = std::lgamma(static_cast<double>(tab.n()) + 1.0);
  for (auto y : tab.cells())
    if (y > 0) c -= std::lgamma(static_cast<double>(y) + 1.0);
  return c;
}

// The count-weighted log-probability part; -inf when a populated cell carries
// zero probability.
inline double log_multinomial_kernel(const std::array<std::int64_t, 4>& y,
                                     const std::array<double, 4>& p) {
  double ll = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (y[i] == 0) continue;
    if (p[i] == 0.0) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(y[i]) * std::log(p[i]);
  }
  return ll;
}

}  // namespace detail

// Log of the multinomial pmf of the cross-tab counts, coefficient included, so
// values agree with the standard pmf. Empty data gives 0 (likelihood 1).
inline double log_likelihood(const CrossTab& tab, const CellProbs& probs) {
  const double kernel = detail::log_multinomial_kernel(tab.cells(), probs.as_array());
  if (kernel == -std::numeric_limits<double>::infinity()) return kernel;
  return detail::log_multinomial_coefficient(tab) + kernel;
}

}  // namespace latacc
