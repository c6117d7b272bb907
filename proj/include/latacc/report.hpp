#pragma once

#include <chrono>
#include <ctime>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "latacc/analysis.hpp"
#include "latacc/chains.hpp"
#include "latacc/config.hpp"
#include "latacc/diagnostics.hpp"
#include "latacc/model.hpp"

namespace latacc {

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json summary_json(const PosteriorSummary& summary) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [name, r] : summary.rows) {
    rows.push_back({{"name", name},
                    {"count", r.count},
                    {"mean", r.mean},
                    {"std", r.std},
                    {"min", r.min},
                    {"25%", r.q25},
                    {"50%", r.median},
                    {"75%", r.q75},
                    {"max", r.max}});
  }
  return rows;
}

inline nlohmann::json confusion_json(const ConfusionMatrix& m) {
  nlohmann::json j;
  j["proportions"] = {{m.proportions[0][0], m.proportions[0][1]},
                      {m.proportions[1][0], m.proportions[1][1]}};
  if (m.counts) {
    j["counts"] = {{(*m.counts)[0][0], (*m.counts)[0][1]},
                   {(*m.counts)[1][0], (*m.counts)[1][1]}};
    j["n"] = *m.n;
  }
  return j;
}

inline nlohmann::json diagnostics_json(const DiagnosticsReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [name, r] : report.rows) {
    nlohmann::json row{{"name", name}};
    if (r.rhat) row["rhat"] = *r.rhat;
    if (r.ess) row["ess"] = *r.ess;
    if (r.mcse) row["mcse"] = *r.mcse;
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json crosstab_json(const CrossTab& tab) {
  return {{"y1", tab.y1()}, {"y2", tab.y2()}, {"y3", tab.y3()}, {"y4", tab.y4()},
          {"n", tab.n()}};
}

}  // namespace detail

// Assembles the JSON fit report: config echo, data, summary tables for the
// parameters and the derived metrics, the confusion matrix for the selected
// classifier, diagnostics, and any warnings.
inline nlohmann::json build_fit_report(const FitConfig& config,
                                       std::span<const CrossTab> tabs,
                                       const ChainSet& params, const ChainSet& derived,
                                       const DiagnosticsReport& diagnostics,
                                       const std::vector<std::string>& warnings) {
  const PosteriorSummary param_summary = summarize(params);
  const PosteriorSummary derived_summary = summarize(derived);

  const char* se_name = config.report.classifier == Classifier::A ? "Se_A" : "Se_B";
  const char* sp_name = config.report.classifier == Classifier::A ? "Sp_A" : "Sp_B";
  const ConfusionMatrix confusion =
      confusion_matrix(Rate(param_summary.row(se_name).mean),
                       Rate(param_summary.row(sp_name).mean), config.report.count_n);

  nlohmann::json report;
  report["tool"] = "latacc";
  report["timestamp"] = detail::utc_timestamp();
  report["model"] = to_string(params.variant);
  report["seed"] = config.sampler.seed;
  report["config"] = config.echo;
  report["data"] = nlohmann::json::array();
  for (const auto& tab : tabs) report["data"].push_back(detail::crosstab_json(tab));
  report["parameters"] = {{"summary", detail::summary_json(param_summary)}};
  report["derived"] = {{"classifier", to_string(config.report.classifier)},
                       {"ppv_convention", to_string(config.ppv_convention)},
                       {"prevalence_index", config.report.prevalence_index},
                       {"summary", detail::summary_json(derived_summary)}};
  report["confusion_matrix"] = detail::confusion_json(confusion);
  report["diagnostics"] = detail::diagnostics_json(diagnostics);
  report["warnings"] = warnings;
  return report;
}

}  // namespace latacc
