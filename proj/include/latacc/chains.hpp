#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latacc/errors.hpp"
#include "latacc/model.hpp"

namespace latacc {

struct SamplerConfig {
  std::int64_t n_iterations = 20000;
  std::int64_t burn_in = 5000;
  std::int64_t thin = 5;
  std::int64_t n_chains = 4;
  std::uint64_t seed = 1;
  bool enforce_identifiability = true;

  std::int64_t kept_per_chain() const { return (n_iterations - burn_in) / thin; }

  void validate() const {
    if (n_iterations < 1) throw config_error("n_iterations must be positive");
    if (burn_in < 0) throw config_error("burn_in must be non-negative");
    if (burn_in >= n_iterations)
      throw config_error("burn_in (" + std::to_string(burn_in) +
                         ") must be smaller than n_iterations (" +
                         std::to_string(n_iterations) + ")");
    if (thin < 1) throw config_error("thin must be positive");
    if (n_chains < 1) throw config_error("n_chains must be positive");
    if (kept_per_chain() < 100)
      throw config_error("schedule keeps only " + std::to_string(kept_per_chain()) +
                         " draws per chain; (n_iterations - burn_in)/thin must be >= 100");
  }
};

// Post-burn-in, thinned draws for a set of named quantities, stored
// chain-major (all of chain 0, then chain 1, ...). Every quantity holds the
// same number of draws; `iterations` records the absolute within-chain
// iteration each kept draw came from. `config` echoes the sampler settings
// and is absent for chains reloaded from CSV.
struct ChainSet {
  ModelVariant variant = ModelVariant::one_dataset;
  std::optional<SamplerConfig> config;
  std::vector<std::string> names;
  std::vector<std::vector<double>> draws;
  std::int64_t n_chains = 0;
  std::int64_t kept_per_chain = 0;
  std::vector<std::int64_t> iterations;

  std::int64_t size() const { return n_chains * kept_per_chain; }

  std::int64_t chain_of(std::int64_t draw_index) const {
    return draw_index / kept_per_chain;
  }

  const std::vector<double>& quantity(std::string_view name) const {
    for (std::size_t q = 0; q < names.size(); ++q)
      if (names[q] == name) return draws[q];
    throw analysis_error("unknown chain quantity '" + std::string(name) + "'");
  }

  bool has_quantity(std::string_view name) const {
    for (const auto& n : names)
      if (n == name) return true;
    return false;
  }

  // One chain's slice of a quantity.
  std::span<const double> chain_slice(std::size_t quantity_index,
                                      std::int64_t chain) const {
    const auto& v = draws.at(quantity_index);
    return std::span<const double>(v).subspan(
        static_cast<std::size_t>(chain * kept_per_chain),
        static_cast<std::size_t>(kept_per_chain));
  }

  void validate() const {
    if (names.size() != draws.size())
      throw analysis_error("chain set has mismatched name/draw columns");
    if (n_chains < 1 || kept_per_chain < 1)
      throw analysis_error("chain set is empty");
    for (const auto& v : draws)
      if (static_cast<std::int64_t>(v.size()) != size())
        throw analysis_error("chain quantities have unequal lengths");
    if (!iterations.empty() && static_cast<std::int64_t>(iterations.size()) != size())
      throw analysis_error("iteration labels do not match draw count");
    if (config) {
      config->validate();
      if (config->n_chains != n_chains || config->kept_per_chain() != kept_per_chain)
        throw analysis_error("chain set shape disagrees with its config echo");
    }
  }
};

// Quantity names in canonical column order for a model variant.
inline std::vector<std::string> parameter_names(ModelVariant variant) {
  std::vector<std::string> names = {"Se_A", "Sp_A", "Se_B", "Sp_B", "pi"};
  if (variant == ModelVariant::two_datasets) names.push_back("pi_beta");
  return names;
}

}  // namespace latacc
