// latacc command-line interface: cross-tabulate predictions, elicit Beta
// priors, fit the latent-class accuracy models, audit fits against the grid
// oracle, and re-summarize existing chain CSVs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "latacc/latacc.hpp"

namespace {

using nlohmann::json;

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const latacc::config_error*>(&e)) return "config";
  if (dynamic_cast<const latacc::data_error*>(&e)) return "data";
  if (dynamic_cast<const latacc::elicitation_error*>(&e)) return "elicitation";
  if (dynamic_cast<const latacc::sampler_error*>(&e)) return "sampler";
  if (dynamic_cast<const latacc::identifiability_error*>(&e)) return "identifiability";
  if (dynamic_cast<const latacc::grid_error*>(&e)) return "grid";
  if (dynamic_cast<const latacc::io_error*>(&e)) return "io";
  if (dynamic_cast<const latacc::analysis_error*>(&e)) return "analysis";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid-argument";
  if (dynamic_cast<const std::out_of_range*>(&e)) return "invalid-argument";
  return "internal";
}

struct DataFlags {
  std::string tab;
  std::string tab2;
  std::string pred_a, pred_b, pred_a2, pred_b2;

  void attach(CLI::App& cmd) {
    cmd.add_option("--tab", tab, "dataset cross-tab as y1,y2,y3,y4");
    cmd.add_option("--tab2", tab2, "second dataset cross-tab (two-datasets model)");
    cmd.add_option("--pred-a", pred_a, "classifier A prediction file");
    cmd.add_option("--pred-b", pred_b, "classifier B prediction file");
    cmd.add_option("--pred-a2", pred_a2, "classifier A predictions, second dataset");
    cmd.add_option("--pred-b2", pred_b2, "classifier B predictions, second dataset");
  }
};

latacc::CrossTab parse_tab(const std::string& text) {
  std::array<std::int64_t, 4> y{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const auto comma = text.find(',', pos);
    const std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      y[i] = std::stoll(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw latacc::data_error("--tab expects y1,y2,y3,y4 integers, got '" + text + "'");
    }
    if (comma == std::string::npos) {
      if (i != 3)
        throw latacc::data_error("--tab expects four comma-separated counts, got '" + text + "'");
      break;
    }
    pos = comma + 1;
  }
  return latacc::CrossTab(y[0], y[1], y[2], y[3]);
}

std::vector<latacc::CrossTab> resolve_tabs(latacc::ModelVariant variant,
                                           const DataFlags& flags) {
  const bool tab_form = !flags.tab.empty() || !flags.tab2.empty();
  const bool pred_form = !flags.pred_a.empty() || !flags.pred_b.empty() ||
                         !flags.pred_a2.empty() || !flags.pred_b2.empty();
  if (tab_form && pred_form)
    throw latacc::config_error("give data either as --tab counts or as prediction files, not both");
  if (!tab_form && !pred_form)
    throw latacc::config_error("no data: give --tab counts or --pred-a/--pred-b files");

  std::vector<latacc::CrossTab> tabs;
  if (tab_form) {
    if (flags.tab.empty()) throw latacc::config_error("--tab2 given without --tab");
    tabs.push_back(parse_tab(flags.tab));
    if (variant == latacc::ModelVariant::two_datasets) {
      if (flags.tab2.empty())
        throw latacc::config_error("two-datasets model needs --tab and --tab2");
      tabs.push_back(parse_tab(flags.tab2));
    } else if (!flags.tab2.empty()) {
      throw latacc::config_error("--tab2 is only valid for the two-datasets model");
    }
  } else {
    if (flags.pred_a.empty() || flags.pred_b.empty())
      throw latacc::config_error("prediction-file input needs both --pred-a and --pred-b");
    tabs.push_back(latacc::crosstab_from_files(flags.pred_a, flags.pred_b));
    const bool second = !flags.pred_a2.empty() || !flags.pred_b2.empty();
    if (variant == latacc::ModelVariant::two_datasets) {
      if (flags.pred_a2.empty() || flags.pred_b2.empty())
        throw latacc::config_error(
            "two-datasets model needs --pred-a2 and --pred-b2 for the second dataset");
      tabs.push_back(latacc::crosstab_from_files(flags.pred_a2, flags.pred_b2));
    } else if (second) {
      throw latacc::config_error("--pred-a2/--pred-b2 are only valid for the two-datasets model");
    }
  }
  return tabs;
}

// Seed precedence: --seed flag > LATACC_SEED environment variable > config.
void apply_seed_override(latacc::SamplerConfig& sampler, bool flag_given,
                         std::uint64_t flag_seed) {
  if (const char* env = std::getenv("LATACC_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw latacc::config_error("LATACC_SEED must be a non-negative integer, got '" +
                                 std::string(env) + "'");
    sampler.seed = value;
  }
  if (flag_given) sampler.seed = flag_seed;
}

void print_summary_table(std::ostream& out, const char* title,
                         const latacc::PosteriorSummary& summary) {
  out << title << '\n';
  std::fprintf(stdout, "%-10s %8s %9s %9s %9s %9s %9s %9s %9s\n", "quantity", "count",
               "mean", "std", "min", "25%", "50%", "75%", "max");
  for (const auto& [name, r] : summary.rows)
    std::fprintf(stdout, "%-10s %8lld %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f\n",
                 name.c_str(), static_cast<long long>(r.count), r.mean, r.std, r.min,
                 r.q25, r.median, r.q75, r.max);
}

int run_crosstab(const std::string& file_a, const std::string& file_b, bool as_json) {
  const latacc::CrossTab tab = latacc::crosstab_from_files(file_a, file_b);
  if (as_json) {
    std::cout << json{{"y1", tab.y1()}, {"y2", tab.y2()}, {"y3", tab.y3()},
                      {"y4", tab.y4()}, {"n", tab.n()}}
                     .dump()
              << '\n';
  } else {
    std::cout << "y1 (A=1,B=1): " << tab.y1() << '\n'
              << "y2 (A=1,B=0): " << tab.y2() << '\n'
              << "y3 (A=0,B=1): " << tab.y3() << '\n'
              << "y4 (A=0,B=0): " << tab.y4() << '\n'
              << "n: " << tab.n() << '\n';
  }
  return 0;
}

int run_elicit(double mode, double threshold, double tail_mass) {
  const latacc::BetaParams p = latacc::elicit_beta(mode, threshold, tail_mass);
  std::printf("a = %.6g\nb = %.6g\n", p.a(), p.b());
  return 0;
}

int run_fit(const std::string& config_path, const DataFlags& data,
            const std::string& out_prefix, bool seed_given, std::uint64_t seed) {
  latacc::FitConfig config = latacc::load_fit_config(config_path);
  apply_seed_override(config.sampler, seed_given, seed);
  config.echo["sampler"]["seed"] = config.sampler.seed;
  const std::vector<latacc::CrossTab> tabs = resolve_tabs(config.model, data);

  const latacc::ChainSet params =
      latacc::run_chain(config.model, tabs, config.priors, config.sampler);
  const latacc::ChainSet derived =
      latacc::derived_chains(params, config.report.classifier, config.ppv_convention,
                             config.report.prevalence_index);
  const latacc::DiagnosticsReport diagnostics = latacc::diagnose(params);
  std::vector<std::string> warnings = latacc::diagnostic_warnings(diagnostics);
  if (params.n_chains < 2)
    warnings.push_back("split-Rhat unavailable: fewer than 2 chains");

  const std::filesystem::path chains_path = out_prefix + "_chains.csv";
  const std::filesystem::path report_path = out_prefix + "_report.json";
  latacc::write_chain_csv(chains_path, params, derived);
  const json report =
      latacc::build_fit_report(config, tabs, params, derived, diagnostics, warnings);
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw latacc::io_error("cannot open '" + report_path.string() + "' for writing");
    out << report.dump(2) << '\n';
  }

  print_summary_table(std::cout, "posterior parameter summary", latacc::summarize(params));
  std::cout << '\n';
  print_summary_table(std::cout, "derived accuracy metrics", latacc::summarize(derived));
  for (const auto& w : warnings) std::cout << "warning: " << w << '\n';
  std::cout << "wrote " << chains_path.string() << '\n'
            << "wrote " << report_path.string() << '\n';
  return 0;
}

int run_oracle(const std::string& config_path, const DataFlags& data,
               std::optional<std::int64_t> points, bool as_json) {
  const latacc::FitConfig config = latacc::load_fit_config(config_path);
  const std::vector<latacc::CrossTab> tabs = resolve_tabs(config.model, data);
  const std::int64_t points_per_dim =
      points.value_or(config.model == latacc::ModelVariant::one_dataset ? 25 : 17);
  const auto means = latacc::grid_posterior_means(
      config.model, tabs, config.priors, points_per_dim,
      config.sampler.enforce_identifiability);
  if (as_json) {
    json j;
    for (const auto& [name, mean] : means) j[name] = mean;
    j["points_per_dim"] = points_per_dim;
    j["constrained"] = config.sampler.enforce_identifiability;
    std::cout << j.dump() << '\n';
  } else {
    std::printf("grid oracle posterior means (points_per_dim=%lld, %s)\n",
                static_cast<long long>(points_per_dim),
                config.sampler.enforce_identifiability ? "constrained" : "unconstrained");
    for (const auto& [name, mean] : means)
      std::printf("%-10s %9.4f\n", name.c_str(), mean);
  }
  return 0;
}

int run_report(const std::string& chains_path, const std::string& classifier,
               const std::string& ppv, std::int64_t prevalence_index,
               std::optional<std::int64_t> count_n, const std::string& out_path,
               const std::string& format, bool recompute) {
  latacc::LoadedChains loaded = latacc::read_chain_csv(chains_path);

  const latacc::Classifier which =
      classifier == "B" ? latacc::Classifier::B : latacc::Classifier::A;
  const latacc::PpvConvention convention =
      ppv == "paper" ? latacc::PpvConvention::paper : latacc::PpvConvention::standard;
  if (prevalence_index < 0 ||
      static_cast<std::size_t>(prevalence_index) >=
          latacc::prevalence_count(loaded.params.variant))
    throw latacc::config_error("--prevalence-index out of range for this chain file");

  if (recompute || loaded.derived.names.empty())
    loaded.derived = latacc::derived_chains(loaded.params, which, convention,
                                            static_cast<std::size_t>(prevalence_index));

  const latacc::PosteriorSummary param_summary = latacc::summarize(loaded.params);
  const latacc::PosteriorSummary derived_summary = latacc::summarize(loaded.derived);
  const latacc::DiagnosticsReport diagnostics = latacc::diagnose(loaded.params);
  std::vector<std::string> warnings = latacc::diagnostic_warnings(diagnostics);
  if (loaded.params.n_chains < 2)
    warnings.push_back("split-Rhat unavailable: fewer than 2 chains");

  const char* se_name = which == latacc::Classifier::A ? "Se_A" : "Se_B";
  const char* sp_name = which == latacc::Classifier::A ? "Sp_A" : "Sp_B";
  const latacc::ConfusionMatrix confusion = latacc::confusion_matrix(
      latacc::Rate(param_summary.row(se_name).mean),
      latacc::Rate(param_summary.row(sp_name).mean), count_n);

  std::ostringstream body;
  if (format == "csv") {
    latacc::PosteriorSummary all = param_summary;
    for (const auto& row : derived_summary.rows) all.rows.push_back(row);
    latacc::write_summary_csv(body, all);
  } else {
    json report;
    report["tool"] = "latacc";
    report["timestamp"] = latacc::detail::utc_timestamp();
    report["model"] = latacc::to_string(loaded.params.variant);
    report["source"] = chains_path;
    report["parameters"] = {{"summary", latacc::detail::summary_json(param_summary)}};
    report["derived"] = {{"classifier", latacc::to_string(which)},
                         {"ppv_convention", latacc::to_string(convention)},
                         {"prevalence_index", prevalence_index},
                         {"summary", latacc::detail::summary_json(derived_summary)}};
    report["confusion_matrix"] = latacc::detail::confusion_json(confusion);
    report["diagnostics"] = latacc::detail::diagnostics_json(diagnostics);
    report["warnings"] = warnings;
    body << report.dump(2) << '\n';
  }

  if (out_path.empty() || out_path == "-") {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw latacc::io_error("cannot open '" + out_path + "' for writing");
    out << body.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian accuracy estimation for binary classifiers on unlabeled data"};
  app.require_subcommand(1);

  // crosstab
  auto* crosstab_cmd =
      app.add_subcommand("crosstab", "cross-tabulate two prediction files");
  std::string ct_a, ct_b;
  bool ct_json = false;
  crosstab_cmd->add_option("file_a", ct_a, "classifier A predictions")->required();
  crosstab_cmd->add_option("file_b", ct_b, "classifier B predictions")->required();
  crosstab_cmd->add_flag("--json", ct_json, "emit JSON");

  // elicit
  auto* elicit_cmd =
      app.add_subcommand("elicit", "solve a mode/tail statement for Beta(a,b)");
  double el_mode = 0, el_threshold = 0, el_tail = 0;
  elicit_cmd->add_option("--mode", el_mode, "most likely value, in (0,1)")->required();
  elicit_cmd->add_option("--threshold", el_threshold, "tail threshold x, in (0,1)")
      ->required();
  elicit_cmd->add_option("--tail-mass", el_tail, "required P(X > threshold), in (0,1)")
      ->required();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "run the Gibbs sampler and write reports");
  std::string fit_config, fit_prefix = "latacc_fit";
  std::uint64_t fit_seed = 0;
  DataFlags fit_data;
  fit_cmd->add_option("--config", fit_config, "fit configuration JSON")->required();
  fit_data.attach(*fit_cmd);
  fit_cmd->add_option("--out-prefix", fit_prefix,
                      "output prefix for <prefix>_chains.csv and <prefix>_report.json");
  auto* fit_seed_opt =
      fit_cmd->add_option("--seed", fit_seed, "seed override (also: LATACC_SEED)");

  // oracle
  auto* oracle_cmd =
      app.add_subcommand("oracle", "brute-force grid posterior means for auditing");
  std::string oracle_config;
  DataFlags oracle_data;
  std::int64_t oracle_points = 0;
  bool oracle_json = false;
  oracle_cmd->add_option("--config", oracle_config, "fit configuration JSON")->required();
  oracle_data.attach(*oracle_cmd);
  auto* oracle_points_opt = oracle_cmd->add_option(
      "--points", oracle_points, "grid points per dimension (default 25, or 17 for two-datasets)");
  oracle_cmd->add_flag("--json", oracle_json, "emit JSON");

  // report
  auto* report_cmd =
      app.add_subcommand("report", "re-summarize an existing chain CSV");
  std::string rp_chains, rp_classifier = "A", rp_ppv, rp_out, rp_format = "json";
  std::int64_t rp_prevalence = 0;
  std::int64_t rp_count_n = 0;
  report_cmd->add_option("--chains", rp_chains, "chain CSV from a previous fit")->required();
  auto* rp_classifier_opt =
      report_cmd->add_option("--classifier", rp_classifier, "A or B")
          ->check(CLI::IsMember({"A", "B"}));
  auto* rp_ppv_opt = report_cmd
                         ->add_option("--ppv-convention", rp_ppv,
                                      "recompute derived metrics with this convention")
                         ->check(CLI::IsMember({"standard", "paper"}));
  auto* rp_prev_opt =
      report_cmd->add_option("--prevalence-index", rp_prevalence, "prevalence chain to use");
  auto* rp_count_opt =
      report_cmd->add_option("--count-n", rp_count_n, "emit confusion counts scaled by n");
  report_cmd->add_option("--out", rp_out, "output path (default stdout)");
  report_cmd->add_option("--format", rp_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*crosstab_cmd) return run_crosstab(ct_a, ct_b, ct_json);
    if (*elicit_cmd) return run_elicit(el_mode, el_threshold, el_tail);
    if (*fit_cmd)
      return run_fit(fit_config, fit_data, fit_prefix, fit_seed_opt->count() > 0, fit_seed);
    if (*oracle_cmd)
      return run_oracle(oracle_config, oracle_data,
                        oracle_points_opt->count() > 0
                            ? std::optional<std::int64_t>(oracle_points)
                            : std::nullopt,
                        oracle_json);
    if (*report_cmd) {
      const bool recompute = rp_ppv_opt->count() > 0 || rp_classifier_opt->count() > 0 ||
                             rp_prev_opt->count() > 0;
      return run_report(rp_chains, rp_classifier,
                        rp_ppv_opt->count() > 0 ? rp_ppv : "standard", rp_prevalence,
                        rp_count_opt->count() > 0
                            ? std::optional<std::int64_t>(rp_count_n)
                            : std::nullopt,
                        rp_out, rp_format, recompute);
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", error_kind(e)}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 1;
  }
  return 0;
}
