#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latacc/chains.hpp"
#include "latacc/errors.hpp"
#include "latacc/model.hpp"

namespace latacc {

struct SummaryRow {
  std::int64_t count = 0;
  double mean = 0;
  double std = 0;
  double min = 0;
  double q25 = 0;
  double median = 0;
  double q75 = 0;
  double max = 0;
};

struct PosteriorSummary {
  std::vector<std::pair<std::string, SummaryRow>> rows;

  const SummaryRow& row(std::string_view name) const {
    for (const auto& [n, r] : rows)
      if (n == name) return r;
    throw analysis_error("no summary row named '" + std::string(name) + "'");
  }
};

// Type-7 quantile (linear interpolation between order statistics) on an
// already-sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw analysis_error("quantile of empty sample");
  if (sorted.size() == 1) return sorted.front();
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline SummaryRow summarize_draws(const std::vector<double>& draws) {
  if (draws.empty()) throw analysis_error("cannot summarize an empty chain");
  SummaryRow r;
  r.count = static_cast<std::int64_t>(draws.size());
  double sum = 0.0;
  for (double x : draws) sum += x;
  r.mean = sum / static_cast<double>(draws.size());
  double ss = 0.0;
  for (double x : draws) ss += (x - r.mean) * (x - r.mean);
  r.std = draws.size() > 1 ? std::sqrt(ss / static_cast<double>(draws.size() - 1)) : 0.0;
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  r.min = sorted.front();
  r.q25 = quantile_sorted(sorted, 0.25);
  r.median = quantile_sorted(sorted, 0.50);
  r.q75 = quantile_sorted(sorted, 0.75);
  r.max = sorted.back();
  return r;
}

// Per-quantity count/mean/std/min/quartiles/max over all kept draws.
inline PosteriorSummary summarize(const ChainSet& chains) {
  if (chains.names.empty() || chains.size() == 0)
    throw analysis_error("cannot summarize an empty chain set");
  PosteriorSummary summary;
  summary.rows.reserve(chains.names.size());
  for (std::size_t q = 0; q < chains.names.size(); ++q)
    summary.rows.emplace_back(chains.names[q], summarize_draws(chains.draws[q]));
  return summary;
}

// 2x2 confusion matrix for one classifier: rows are the actual value (1,0),
// columns the prediction (1,0). Proportion rows are (se, 1-se) and
// (1-sp, sp); the count form scales every entry by n and rounds half away
// from zero.
struct ConfusionMatrix {
  std::array<std::array<double, 2>, 2> proportions{};
  std::optional<std::array<std::array<std::int64_t, 2>, 2>> counts;
  std::optional<std::int64_t> n;
};

inline ConfusionMatrix confusion_matrix(Rate se, Rate sp,
                                        std::optional<std::int64_t> n = std::nullopt) {
  ConfusionMatrix m;
  m.proportions = {{{se.value(), 1.0 - se.value()}, {1.0 - sp.value(), sp.value()}}};
  if (n) {
    if (*n < 0) throw std::invalid_argument("confusion matrix count scale must be >= 0");
    std::array<std::array<std::int64_t, 2>, 2> counts{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        counts[i][j] = static_cast<std::int64_t>(
            std::round(m.proportions[i][j] * static_cast<double>(*n)));
    m.counts = counts;
    m.n = n;
  }
  return m;
}

enum class Classifier { A, B };
enum class PpvConvention { standard, paper };

inline const char* to_string(Classifier c) { return c == Classifier::A ? "A" : "B"; }
inline const char* to_string(PpvConvention c) {
  return c == PpvConvention::standard ? "standard" : "paper";
}

// Element-wise accuracy-metric chains for one classifier:
//   accuracy = se*pi + sp*(1-pi)
//   recall   = se
//   ppv      = se*pi / (se*pi + (1-se)*(1-pi))   ["paper" convention]
//   ppv      = se*pi / (se*pi + (1-sp)*(1-pi))   ["standard" convention]
//   f1       = harmonic mean of recall and ppv.
// The "paper" convention reproduces the source model's published tables; the
// standard definition is the library default.
inline ChainSet derived_chains(const ChainSet& chains, Classifier which,
                               PpvConvention convention,
                               std::size_t prevalence_index = 0) {
  if (chains.size() == 0) throw analysis_error("cannot derive metrics from empty chains");
  if (prevalence_index >= prevalence_count(chains.variant))
    throw analysis_error("prevalence index out of range for model variant");

  const auto& se = chains.quantity(which == Classifier::A ? "Se_A" : "Se_B");
  const auto& sp = chains.quantity(which == Classifier::A ? "Sp_A" : "Sp_B");
  const auto& pi = chains.quantity(prevalence_index == 0 ? "pi" : "pi_beta");

  ChainSet out;
  out.variant = chains.variant;
  out.config = chains.config;
  out.names = {"accuracy", "recall", "ppv", "f1"};
  out.n_chains = chains.n_chains;
  out.kept_per_chain = chains.kept_per_chain;
  out.iterations = chains.iterations;
  out.draws.assign(4, std::vector<double>(se.size()));

  for (std::size_t i = 0; i < se.size(); ++i) {
    const double s = se[i];
    const double t = sp[i];
    const double p = pi[i];
    const double pos = s * p;
    const double ppv_denom =
        convention == PpvConvention::paper ? pos + (1.0 - s) * (1.0 - p)
                                           : pos + (1.0 - t) * (1.0 - p);
    if (ppv_denom == 0.0)
      throw analysis_error("ppv denominator is zero at draw " + std::to_string(i));
    const double ppv = pos / ppv_denom;
    if (s + ppv == 0.0)
      throw analysis_error("f1 denominator is zero at draw " + std::to_string(i));
    out.draws[0][i] = s * p + t * (1.0 - p);
    out.draws[1][i] = s;
    out.draws[2][i] = ppv;
    out.draws[3][i] = 2.0 * s * ppv / (s + ppv);
  }
  return out;
}

}  // namespace latacc
