#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latacc/analysis.hpp"
#include "latacc/chains.hpp"
#include "latacc/errors.hpp"
#include "latacc/model.hpp"

namespace latacc {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return std::string(s.substr(first, last - first + 1));
}

// Shortest round-trip-safe representation.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

struct PredictionList {
  std::vector<std::uint8_t> values;
  std::optional<std::size_t> header_line;  // line number of a "prediction" header
};

// Newline-delimited 0/1 predictions; blank lines are ignored and a single
// leading "prediction" header line is tolerated (it only counts as a header
// if the paired file has one too -- see crosstab_from_files).
inline PredictionList read_prediction_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open prediction file '" + path.string() + "'");
  PredictionList list;
  std::string line;
  std::size_t line_number = 0;
  bool seen_value = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string token = detail::trim(line);
    if (token.empty()) continue;
    if (token == "0") {
      list.values.push_back(0);
      seen_value = true;
    } else if (token == "1") {
      list.values.push_back(1);
      seen_value = true;
    } else if (token == "prediction" && !seen_value && !list.header_line) {
      list.header_line = line_number;
    } else {
      throw data_error("'" + path.string() + "' line " + std::to_string(line_number) +
                       ": invalid token '" + token + "' (expected 0 or 1)");
    }
  }
  return list;
}

inline CrossTab crosstab_from_lists(std::span<const std::uint8_t> a,
                                    std::span<const std::uint8_t> b) {
  if (a.size() != b.size())
    throw data_error("prediction lists have different lengths: " +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  std::int64_t y1 = 0, y2 = 0, y3 = 0, y4 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++y1;
    else if (a[i]) ++y2;
    else if (b[i]) ++y3;
    else ++y4;
  }
  return CrossTab(y1, y2, y3, y4);
}

// Cross-tabulates two prediction files (file A varies across columns). The
// optional "prediction" header is skipped only when present in both files;
// a header in just one file is an invalid token there.
inline CrossTab crosstab_from_files(const std::filesystem::path& file_a,
                                    const std::filesystem::path& file_b) {
  const PredictionList a = read_prediction_list(file_a);
  const PredictionList b = read_prediction_list(file_b);
  if (a.header_line.has_value() != b.header_line.has_value()) {
    const auto& with = a.header_line ? file_a : file_b;
    const auto line = a.header_line ? *a.header_line : *b.header_line;
    throw data_error("'" + with.string() + "' line " + std::to_string(line) +
                     ": invalid token 'prediction' (header present in only one file)");
  }
  return crosstab_from_lists(a.values, b.values);
}

// Chain CSV: fixed header
//   chain,iteration,Se_A,Sp_A,Se_B,Sp_B,pi[,pi_beta],accuracy,recall,ppv,f1
// with one row per kept draw, chain-major, doubles printed round-trip-exact.
inline void write_chain_csv(std::ostream& out, const ChainSet& params,
                            const ChainSet& derived) {
  params.validate();
  derived.validate();
  if (derived.size() != params.size())
    throw io_error("parameter and derived chains have different lengths");

  out << "chain,iteration";
  for (const auto& name : params.names) out << ',' << name;
  for (const auto& name : derived.names) out << ',' << name;
  out << '\n';
  for (std::int64_t i = 0; i < params.size(); ++i) {
    out << params.chain_of(i) << ','
        << (params.iterations.empty() ? i : params.iterations[i]);
    for (const auto& column : params.draws)
      out << ',' << detail::format_double(column[static_cast<std::size_t>(i)]);
    for (const auto& column : derived.draws)
      out << ',' << detail::format_double(column[static_cast<std::size_t>(i)]);
    out << '\n';
  }
}

inline void write_chain_csv(const std::filesystem::path& path, const ChainSet& params,
                            const ChainSet& derived) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  write_chain_csv(out, params, derived);
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

struct LoadedChains {
  ChainSet params;
  ChainSet derived;  // empty names when the file carries no derived columns
};

// Reads a chain CSV produced by write_chain_csv (or compatible). Rows must be
// grouped into equal-length contiguous blocks per chain id 0..C-1.
inline LoadedChains read_chain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open chain CSV '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw io_error("chain CSV '" + path.string() + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(detail::trim(line));
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(detail::trim(field));
  }
  if (header.size() < 3 || header[0] != "chain" || header[1] != "iteration")
    throw io_error("chain CSV must start with columns 'chain,iteration'");

  const std::vector<std::string> derived_names = {"accuracy", "recall", "ppv", "f1"};
  std::vector<std::string> param_names;
  std::vector<std::string> found_derived;
  for (std::size_t i = 2; i < header.size(); ++i) {
    if (std::find(derived_names.begin(), derived_names.end(), header[i]) !=
        derived_names.end())
      found_derived.push_back(header[i]);
    else
      param_names.push_back(header[i]);
  }
  const auto expect_one = parameter_names(ModelVariant::one_dataset);
  const auto expect_two = parameter_names(ModelVariant::two_datasets);
  ModelVariant variant;
  if (param_names == expect_one) variant = ModelVariant::one_dataset;
  else if (param_names == expect_two) variant = ModelVariant::two_datasets;
  else throw io_error("chain CSV parameter columns do not match a known model variant");

  const std::size_t n_cols = header.size();
  std::vector<std::vector<double>> columns(n_cols - 2);
  std::vector<std::int64_t> chain_ids;
  std::vector<std::int64_t> iterations;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string row = detail::trim(line);
    if (row.empty()) continue;
    std::stringstream ss(row);
    std::string field;
    std::size_t col = 0;
    while (std::getline(ss, field, ',')) {
      try {
        if (col == 0) chain_ids.push_back(std::stoll(field));
        else if (col == 1) iterations.push_back(std::stoll(field));
        else if (col - 2 < columns.size()) columns[col - 2].push_back(std::stod(field));
        else throw std::invalid_argument("extra field");
      } catch (const std::exception&) {
        throw io_error("'" + path.string() + "' line " + std::to_string(line_number) +
                       ": malformed field '" + field + "'");
      }
      ++col;
    }
    if (col != n_cols)
      throw io_error("'" + path.string() + "' line " + std::to_string(line_number) +
                     ": expected " + std::to_string(n_cols) + " fields, got " +
                     std::to_string(col));
  }
  if (chain_ids.empty()) throw io_error("chain CSV '" + path.string() + "' has no draws");

  std::int64_t n_chains = 0;
  for (auto id : chain_ids) n_chains = std::max(n_chains, id + 1);
  std::vector<std::int64_t> per_chain(static_cast<std::size_t>(n_chains), 0);
  std::int64_t previous = -1;
  for (auto id : chain_ids) {
    if (id < 0 || (id != previous && per_chain[static_cast<std::size_t>(id)] > 0))
      throw io_error("chain CSV rows must form contiguous blocks per chain id");
    ++per_chain[static_cast<std::size_t>(id)];
    previous = id;
  }
  for (auto count : per_chain)
    if (count != per_chain.front())
      throw io_error("chain CSV chains must have equal lengths");

  LoadedChains loaded;
  loaded.params.variant = variant;
  loaded.params.names = param_names;
  loaded.params.n_chains = n_chains;
  loaded.params.kept_per_chain = per_chain.front();
  loaded.params.iterations = iterations;
  for (std::size_t i = 0; i + 2 < n_cols; ++i) {
    if (std::find(derived_names.begin(), derived_names.end(), header[i + 2]) !=
        derived_names.end())
      continue;
    loaded.params.draws.push_back(std::move(columns[i]));
  }
  loaded.params.validate();

  if (!found_derived.empty()) {
    loaded.derived.variant = variant;
    loaded.derived.names = found_derived;
    loaded.derived.n_chains = n_chains;
    loaded.derived.kept_per_chain = per_chain.front();
    loaded.derived.iterations = iterations;
    for (std::size_t i = 0; i + 2 < n_cols; ++i)
      if (std::find(derived_names.begin(), derived_names.end(), header[i + 2]) !=
          derived_names.end())
        loaded.derived.draws.push_back(std::move(columns[i]));
    loaded.derived.validate();
  }
  return loaded;
}

// Summary table CSV with the fixed column order
//   quantity,count,mean,std,min,25%,50%,75%,max
inline void write_summary_csv(std::ostream& out, const PosteriorSummary& summary) {
  out << "quantity,count,mean,std,min,25%,50%,75%,max\n";
  for (const auto& [name, r] : summary.rows) {
    out << name << ',' << r.count << ',' << detail::format_double(r.mean) << ','
        << detail::format_double(r.std) << ',' << detail::format_double(r.min) << ','
        << detail::format_double(r.q25) << ',' << detail::format_double(r.median) << ','
        << detail::format_double(r.q75) << ',' << detail::format_double(r.max) << '\n';
  }
}

}  // namespace latacc
