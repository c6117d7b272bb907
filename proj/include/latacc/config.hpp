#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "latacc/analysis.hpp"
#include "latacc/chains.hpp"
#include "latacc/errors.hpp"
#include "latacc/priors.hpp"

namespace latacc {

struct ReportOptions {
  Classifier classifier = Classifier::A;
  std::size_t prevalence_index = 0;
  std::optional<std::int64_t> count_n;  // confusion-matrix count form scale
};

// Fully resolved fit configuration: elicitation statements are solved into
// Beta(a,b) at parse time, and `echo` carries the resolved settings for the
// report.
struct FitConfig {
  ModelVariant model = ModelVariant::one_dataset;
  PriorSet priors = PriorSet::one_dataset(uniform_prior(), uniform_prior(),
                                          uniform_prior(), uniform_prior(),
                                          uniform_prior());
  SamplerConfig sampler;
  PpvConvention ppv_convention = PpvConvention::standard;
  ReportOptions report;
  nlohmann::json echo;
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw config_error(where + ": unknown key '" + key + "'");
}

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw config_error(where + ": '" + key + "' must be a number");
  return obj[key].get<double>();
}

// A prior is either an explicit {a,b} or an elicitation statement
// {mode,threshold,tail_mass}; exactly one form per parameter.
inline BetaParams parse_prior(const nlohmann::json& obj, const std::string& name) {
  const std::string where = "priors." + name;
  if (!obj.is_object()) throw config_error(where + ": must be an object");
  const bool explicit_form = obj.contains("a") || obj.contains("b");
  const bool elicited_form =
      obj.contains("mode") || obj.contains("threshold") || obj.contains("tail_mass");
  if (explicit_form && elicited_form)
    throw config_error(where + ": give either {a,b} or {mode,threshold,tail_mass}, not both");
  if (explicit_form) {
    require_keys(obj, {"a", "b"}, where);
    try {
      return BetaParams(require_number(obj, "a", where), require_number(obj, "b", where));
    } catch (const std::invalid_argument& e) {
      throw config_error(where + ": " + e.what());
    }
  }
  if (elicited_form) {
    require_keys(obj, {"mode", "threshold", "tail_mass"}, where);
    try {
      return elicit_beta(require_number(obj, "mode", where),
                         require_number(obj, "threshold", where),
                         require_number(obj, "tail_mass", where));
    } catch (const std::invalid_argument& e) {
      throw config_error(where + ": " + e.what());
    } catch (const elicitation_error& e) {
      throw config_error(where + ": " + e.what());
    }
  }
  throw config_error(where + ": empty prior specification");
}

inline nlohmann::json prior_echo(const BetaParams& p) {
  return nlohmann::json{{"a", p.a()}, {"b", p.b()}};
}

}  // namespace detail

inline FitConfig parse_fit_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw config_error("config root must be a JSON object");
  detail::require_keys(doc, {"model", "priors", "sampler", "ppv_convention", "report"},
                       "config");

  FitConfig cfg;

  if (!doc.contains("model") || !doc["model"].is_string())
    throw config_error("config: 'model' must be \"one-dataset\" or \"two-datasets\"");
  const std::string model = doc["model"].get<std::string>();
  if (model == "one-dataset") cfg.model = ModelVariant::one_dataset;
  else if (model == "two-datasets") cfg.model = ModelVariant::two_datasets;
  else throw config_error("config: unknown model '" + model + "'");

  const std::vector<std::string> prevalence_keys =
      cfg.model == ModelVariant::one_dataset ? std::vector<std::string>{"pi"}
                                             : std::vector<std::string>{"pi_alpha", "pi_beta"};
  nlohmann::json priors_obj = doc.value("priors", nlohmann::json::object());
  if (!priors_obj.is_object()) throw config_error("config: 'priors' must be an object");
  {
    std::set<std::string> allowed = {"se_a", "sp_a", "se_b", "sp_b"};
    allowed.insert(prevalence_keys.begin(), prevalence_keys.end());
    detail::require_keys(priors_obj, allowed, "priors");
  }
  const auto prior_or_uniform = [&](const std::string& key) {
    return priors_obj.contains(key) ? detail::parse_prior(priors_obj[key], key)
                                    : uniform_prior();
  };
  const BetaParams se_a = prior_or_uniform("se_a");
  const BetaParams sp_a = prior_or_uniform("sp_a");
  const BetaParams se_b = prior_or_uniform("se_b");
  const BetaParams sp_b = prior_or_uniform("sp_b");
  std::vector<BetaParams> prevalence;
  for (const auto& key : prevalence_keys) prevalence.push_back(prior_or_uniform(key));
  cfg.priors = PriorSet(se_a, sp_a, se_b, sp_b, prevalence);

  if (doc.contains("sampler")) {
    const auto& s = doc["sampler"];
    if (!s.is_object()) throw config_error("config: 'sampler' must be an object");
    detail::require_keys(s,
                         {"n_iterations", "burn_in", "thin", "n_chains", "seed",
                          "enforce_identifiability"},
                         "sampler");
    const auto integer = [&](const char* key, std::int64_t fallback) {
      if (!s.contains(key)) return fallback;
      if (!s[key].is_number_integer())
        throw config_error(std::string("sampler: '") + key + "' must be an integer");
      return s[key].get<std::int64_t>();
    };
    cfg.sampler.n_iterations = integer("n_iterations", cfg.sampler.n_iterations);
    cfg.sampler.burn_in = integer("burn_in", cfg.sampler.burn_in);
    cfg.sampler.thin = integer("thin", cfg.sampler.thin);
    cfg.sampler.n_chains = integer("n_chains", cfg.sampler.n_chains);
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer())
        throw config_error("sampler: 'seed' must be a non-negative integer");
      cfg.sampler.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("enforce_identifiability")) {
      if (!s["enforce_identifiability"].is_boolean())
        throw config_error("sampler: 'enforce_identifiability' must be a boolean");
      cfg.sampler.enforce_identifiability = s["enforce_identifiability"].get<bool>();
    }
  }
  cfg.sampler.validate();

  if (doc.contains("ppv_convention")) {
    const auto& c = doc["ppv_convention"];
    if (!c.is_string()) throw config_error("config: 'ppv_convention' must be a string");
    const std::string conv = c.get<std::string>();
    if (conv == "standard") cfg.ppv_convention = PpvConvention::standard;
    else if (conv == "paper") cfg.ppv_convention = PpvConvention::paper;
    else throw config_error("config: unknown ppv_convention '" + conv + "'");
  }

  if (doc.contains("report")) {
    const auto& r = doc["report"];
    if (!r.is_object()) throw config_error("config: 'report' must be an object");
    detail::require_keys(r, {"classifier", "prevalence_index", "count_n"}, "report");
    if (r.contains("classifier")) {
      const std::string c = r["classifier"].is_string() ? r["classifier"].get<std::string>() : "";
      if (c == "A") cfg.report.classifier = Classifier::A;
      else if (c == "B") cfg.report.classifier = Classifier::B;
      else throw config_error("report: 'classifier' must be \"A\" or \"B\"");
    }
    if (r.contains("prevalence_index")) {
      if (!r["prevalence_index"].is_number_integer())
        throw config_error("report: 'prevalence_index' must be an integer");
      const auto idx = r["prevalence_index"].get<std::int64_t>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= prevalence_count(cfg.model))
        throw config_error("report: 'prevalence_index' out of range for model");
      cfg.report.prevalence_index = static_cast<std::size_t>(idx);
    }
    if (r.contains("count_n")) {
      if (!r["count_n"].is_number_integer() || r["count_n"].get<std::int64_t>() <= 0)
        throw config_error("report: 'count_n' must be a positive integer");
      cfg.report.count_n = r["count_n"].get<std::int64_t>();
    }
  }

  // Echo the fully resolved configuration.
  nlohmann::json echo;
  echo["model"] = model;
  echo["priors"] = {{"se_a", detail::prior_echo(cfg.priors.se_a())},
                    {"sp_a", detail::prior_echo(cfg.priors.sp_a())},
                    {"se_b", detail::prior_echo(cfg.priors.se_b())},
                    {"sp_b", detail::prior_echo(cfg.priors.sp_b())}};
  for (std::size_t d = 0; d < prevalence_keys.size(); ++d)
    echo["priors"][prevalence_keys[d]] = detail::prior_echo(cfg.priors.prevalence_prior(d));
  echo["sampler"] = {{"n_iterations", cfg.sampler.n_iterations},
                     {"burn_in", cfg.sampler.burn_in},
                     {"thin", cfg.sampler.thin},
                     {"n_chains", cfg.sampler.n_chains},
                     {"seed", cfg.sampler.seed},
                     {"enforce_identifiability", cfg.sampler.enforce_identifiability}};
  echo["ppv_convention"] = to_string(cfg.ppv_convention);
  echo["report"] = {{"classifier", to_string(cfg.report.classifier)},
                    {"prevalence_index", cfg.report.prevalence_index}};
  if (cfg.report.count_n) echo["report"]["count_n"] = *cfg.report.count_n;
  cfg.echo = std::move(echo);
  return cfg;
}

inline FitConfig load_fit_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_fit_config(doc);
}

}  // namespace latacc
