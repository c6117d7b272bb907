#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "latacc/errors.hpp"
#include "latacc/model.hpp"
#include "latacc/posterior.hpp"
#include "latacc/priors.hpp"

namespace latacc {

namespace detail {

// Streaming sum of exp(log-weight - running max) together with the weighted
// first moments, rescaled whenever a larger log-weight appears. Addition
// order is fixed by the caller, so results are bit-stable.
struct GridAccumulator {
  double max_log = -std::numeric_limits<double>::infinity();
  double weight = 0.0;
  std::array<double, 6> moments{};

  void add(double log_w, const std::array<double, 6>& theta, std::size_t dim) {
    if (log_w == -std::numeric_limits<double>::infinity()) return;
    if (log_w <= max_log) {
      const double w = std::exp(log_w - max_log);
      weight += w;
      for (std::size_t d = 0; d < dim; ++d) moments[d] += w * theta[d];
    } else {
      const double scale =
          weight > 0.0 ? std::exp(max_log - log_w) : 0.0;
      weight = weight * scale + 1.0;
      for (std::size_t d = 0; d < dim; ++d)
        moments[d] = moments[d] * scale + theta[d];
      max_log = log_w;
    }
  }

  void merge(const GridAccumulator& other, std::size_t dim) {
    if (other.weight == 0.0) return;
    if (weight == 0.0) {
      *this = other;
      return;
    }
    if (other.max_log <= max_log) {
      const double scale = std::exp(other.max_log - max_log);
      weight += scale * other.weight;
      for (std::size_t d = 0; d < dim; ++d) moments[d] += scale * other.moments[d];
    } else {
      const double scale = std::exp(max_log - other.max_log);
      weight = weight * scale + other.weight;
      for (std::size_t d = 0; d < dim; ++d)
        moments[d] = moments[d] * scale + other.moments[d];
      max_log = other.max_log;
    }
  }
};

}  // namespace detail

// Brute-force midpoint-rule integration of the joint posterior over the open
// hypercube (nodes (k+0.5)/m per dimension), with exp evaluated relative to a
// running maximum for stability. When `constrained` is set, mass where
// Se_j + Sp_j <= 1 for either classifier is zeroed, matching the sampler's
// identifiability constraint. Returns the normalized posterior mean per
// parameter in canonical name order. Slabs over the first dimension evaluate
// in parallel and are merged in fixed order, so the result does not depend on
// the worker count.
inline std::vector<std::pair<std::string, double>> grid_posterior_means(
    ModelVariant variant, std::span<const CrossTab> tabs, const PriorSet& priors,
    std::int64_t points_per_dim, bool constrained) {
  const std::size_t dim = prevalence_count(variant) + 4;
  if (tabs.size() != prevalence_count(variant))
    throw grid_error(std::string(to_string(variant)) + " model requires " +
                     std::to_string(prevalence_count(variant)) + " cross-tab(s)");
  if (priors.prevalence_count() != tabs.size())
    throw grid_error("prior set does not match the model variant");
  if (points_per_dim < 11) throw grid_error("points_per_dim must be at least 11");
  if (std::pow(static_cast<double>(points_per_dim), static_cast<double>(dim)) > 1e9)
    throw grid_error("grid of " + std::to_string(points_per_dim) + "^" +
                     std::to_string(dim) + " points exceeds the 1e9 evaluation guard");

  const std::size_t m = static_cast<std::size_t>(points_per_dim);
  std::vector<double> node(m);
  for (std::size_t k = 0; k < m; ++k)
    node[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(m);

  const auto prior_grid = [&](const BetaParams& p) {
    std::vector<double> lp(m);
    for (std::size_t k = 0; k < m; ++k) lp[k] = p.log_pdf(node[k]);
    return lp;
  };
  const auto lp_se_a = prior_grid(priors.se_a());
  const auto lp_sp_a = prior_grid(priors.sp_a());
  const auto lp_se_b = prior_grid(priors.se_b());
  const auto lp_sp_b = prior_grid(priors.sp_b());
  std::vector<std::vector<double>> lp_pi;
  std::vector<double> log_coeff;
  for (std::size_t d = 0; d < tabs.size(); ++d) {
    lp_pi.push_back(prior_grid(priors.prevalence_prior(d)));
    log_coeff.push_back(detail::log_multinomial_coefficient(tabs[d]));
  }

  // Per-dataset log-likelihood at fixed rates, for every prevalence node.
  const auto likelihood_row = [&](std::size_t d, double sa, double pa, double sb,
                                  double pb, std::vector<double>& out) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto terms = detail::cell_terms(sa, pa, sb, pb, node[k]);
      out[k] = log_coeff[d] +
               detail::log_multinomial_kernel(tabs[d].cells(), terms.total) +
               lp_pi[d][k];
    }
  };

  // One slab = one node of se_a.
  const auto run_slab = [&](std::size_t ia, detail::GridAccumulator& acc) {
    const double sa = node[ia];
    std::array<double, 6> theta{};
    theta[0] = sa;
    std::vector<double> lik_alpha(m), lik_beta(m);
    for (std::size_t ja = 0; ja < m; ++ja) {
      const double pa = node[ja];
      if (constrained && sa + pa <= 1.0) continue;
      theta[1] = pa;
      const double base_a = lp_se_a[ia] + lp_sp_a[ja];
      for (std::size_t ib = 0; ib < m; ++ib) {
        const double sb = node[ib];
        theta[2] = sb;
        for (std::size_t jb = 0; jb < m; ++jb) {
          const double pb = node[jb];
          if (constrained && sb + pb <= 1.0) continue;
          theta[3] = pb;
          const double base = base_a + lp_se_b[ib] + lp_sp_b[jb];
          likelihood_row(0, sa, pa, sb, pb, lik_alpha);
          if (variant == ModelVariant::one_dataset) {
            for (std::size_t k = 0; k < m; ++k) {
              theta[4] = node[k];
              acc.add(base + lik_alpha[k], theta, dim);
            }
          } else {
            likelihood_row(1, sa, pa, sb, pb, lik_beta);
            for (std::size_t ka = 0; ka < m; ++ka) {
              theta[4] = node[ka];
              const double with_alpha = base + lik_alpha[ka];
              for (std::size_t kb = 0; kb < m; ++kb) {
                theta[5] = node[kb];
                acc.add(with_alpha + lik_beta[kb], theta, dim);
              }
            }
          }
        }
      }
    }
  };

  std::vector<detail::GridAccumulator> slabs(m);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>({hw, m, 8});
  if (workers <= 1) {
    for (std::size_t ia = 0; ia < m; ++ia) run_slab(ia, slabs[ia]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t ia = w; ia < m; ia += workers) run_slab(ia, slabs[ia]);
      });
    for (auto& t : pool) t.join();
  }

  detail::GridAccumulator total;
  for (const auto& slab : slabs) total.merge(slab, dim);
  if (!(total.weight > 0.0))
    throw grid_error("posterior mass underflowed to zero on the grid");

  const auto names = parameter_names(variant);
  std::vector<std::pair<std::string, double>> means;
  means.reserve(dim);
  for (std::size_t d = 0; d < dim; ++d)
    means.emplace_back(names[d], total.moments[d] / total.weight);
  return means;
}

}  // namespace latacc
