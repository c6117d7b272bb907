#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "latacc/analysis.hpp"
#include "latacc/chains.hpp"
#include "latacc/errors.hpp"

namespace latacc {

namespace detail {

struct MeanVar {
  double mean = 0;
  double var = 0;  // n-1 denominator
};

inline MeanVar mean_var(std::span<const double> xs) {
  MeanVar mv;
  for (double x : xs) mv.mean += x;
  mv.mean /= static_cast<double>(xs.size());
  for (double x : xs) mv.var += (x - mv.mean) * (x - mv.mean);
  mv.var = xs.size() > 1 ? mv.var / static_cast<double>(xs.size() - 1) : 0.0;
  return mv;
}

// Biased (1/N) autocovariance at a single lag.
inline double autocovariance(std::span<const double> xs, double mean, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t i = 0; i + lag < xs.size(); ++i)
    acc += (xs[i] - mean) * (xs[i + lag] - mean);
  return acc / static_cast<double>(xs.size());
}

}  // namespace detail

// Split potential-scale-reduction factor: each chain is halved (middle draw
// dropped when the kept length is odd) and the usual between/within variance
// ratio is computed over the half-chains. Values below 1 are estimator noise
// and are clamped to 1; two constant identical chains report 1 by convention.
inline double split_rhat(const ChainSet& chains, std::string_view name) {
  if (chains.n_chains < 2)
    throw analysis_error("split_rhat requires at least 2 chains");
  if (chains.kept_per_chain < 4)
    throw analysis_error("split_rhat requires at least 4 kept draws per chain");

  std::size_t q = 0;
  while (q < chains.names.size() && chains.names[q] != name) ++q;
  if (q == chains.names.size())
    throw analysis_error("unknown chain quantity '" + std::string(name) + "'");

  const std::int64_t half = chains.kept_per_chain / 2;
  std::vector<detail::MeanVar> halves;
  halves.reserve(static_cast<std::size_t>(2 * chains.n_chains));
  for (std::int64_t c = 0; c < chains.n_chains; ++c) {
    const auto slice = chains.chain_slice(q, c);
    halves.push_back(detail::mean_var(slice.first(static_cast<std::size_t>(half))));
    halves.push_back(detail::mean_var(slice.last(static_cast<std::size_t>(half))));
  }

  double within = 0.0;
  for (const auto& h : halves) within += h.var;
  within /= static_cast<double>(halves.size());

  double grand = 0.0;
  for (const auto& h : halves) grand += h.mean;
  grand /= static_cast<double>(halves.size());
  double between = 0.0;  // var of half means, n-1 denominator
  for (const auto& h : halves) between += (h.mean - grand) * (h.mean - grand);
  between /= static_cast<double>(halves.size() - 1);

  if (within <= 0.0)
    return between <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();

  const double n = static_cast<double>(half);
  const double var_plus = (n - 1.0) / n * within + between;
  return std::max(1.0, std::sqrt(var_plus / within));
}

// Effective sample size via Geyer's initial positive sequence, estimated per
// chain and summed. Degenerate (zero-variance) chains count as fully
// independent; strongly antithetic chains are capped at 1.5x the draw count.
inline double effective_sample_size(const ChainSet& chains, std::string_view name) {
  if (chains.kept_per_chain < 8)
    throw analysis_error("effective_sample_size requires at least 8 kept draws per chain");

  std::size_t q = 0;
  while (q < chains.names.size() && chains.names[q] != name) ++q;
  if (q == chains.names.size())
    throw analysis_error("unknown chain quantity '" + std::string(name) + "'");

  double total = 0.0;
  for (std::int64_t c = 0; c < chains.n_chains; ++c) {
    const auto xs = chains.chain_slice(q, c);
    const std::size_t len = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(len);
    const double gamma0 = detail::autocovariance(xs, mean, 0);
    if (gamma0 <= 0.0) {
      total += static_cast<double>(len);
      continue;
    }
    // tau = -1 + 2*sum of positive paired autocorrelations Gamma_k =
    // rho_{2k} + rho_{2k+1}, truncated at the first non-positive pair.
    double tau = -1.0;
    for (std::size_t k = 0; 2 * k + 1 < len; ++k) {
      const double rho_even = detail::autocovariance(xs, mean, 2 * k) / gamma0;
      const double rho_odd = detail::autocovariance(xs, mean, 2 * k + 1) / gamma0;
      const double pair = rho_even + rho_odd;
      if (pair <= 0.0) break;
      tau += 2.0 * pair;
    }
    const double cap = 1.5 * static_cast<double>(len);
    const double ess = tau > 0.0 ? static_cast<double>(len) / tau : cap;
    total += std::min(ess, cap);
  }
  return total;
}

struct DiagnosticRow {
  std::optional<double> rhat;  // absent with a single chain
  std::optional<double> ess;
  std::optional<double> mcse;  // posterior std / sqrt(ess)
};

struct DiagnosticsReport {
  std::vector<std::pair<std::string, DiagnosticRow>> rows;

  const DiagnosticRow& row(std::string_view name) const {
    for (const auto& [n, r] : rows)
      if (n == name) return r;
    throw analysis_error("no diagnostics row named '" + std::string(name) + "'");
  }
};

inline DiagnosticsReport diagnose(const ChainSet& chains) {
  DiagnosticsReport report;
  report.rows.reserve(chains.names.size());
  for (const auto& name : chains.names) {
    DiagnosticRow row;
    if (chains.n_chains >= 2 && chains.kept_per_chain >= 4)
      row.rhat = split_rhat(chains, name);
    if (chains.kept_per_chain >= 8) {
      row.ess = effective_sample_size(chains, name);
      const double sd = summarize_draws(chains.quantity(name)).std;
      row.mcse = *row.ess > 0.0 ? sd / std::sqrt(*row.ess) : 0.0;
    }
    report.rows.emplace_back(name, row);
  }
  return report;
}

// Nonfatal quality warnings at the conventional thresholds.
inline std::vector<std::string> diagnostic_warnings(const DiagnosticsReport& report,
                                                    double rhat_threshold = 1.05,
                                                    double ess_threshold = 400.0) {
  std::vector<std::string> warnings;
  for (const auto& [name, row] : report.rows) {
    if (row.rhat && *row.rhat > rhat_threshold)
      warnings.push_back("split-Rhat for " + name + " is " + std::to_string(*row.rhat) +
                         " (> " + std::to_string(rhat_threshold) +
                         "); chains may not have converged");
    if (row.ess && *row.ess < ess_threshold)
      warnings.push_back("effective sample size for " + name + " is " +
                         std::to_string(*row.ess) + " (< " +
                         std::to_string(static_cast<std::int64_t>(ess_threshold)) +
                         "); estimates may be noisy");
  }
  return warnings;
}

}  // namespace latacc
