// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file record.hpp
 * @brief Run records: per-sample rows, the summary recomputed from them, and
 *        append-only JSONL persistence.
 */

#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ginlab {

struct SampleRow {
  std::int64_t index = 0;
  std::uint64_t seed = 0;
  double lambda1 = 0.0;
  double trace_resolvent = 0.0;  ///< n^{-1} Tr (Y + eps^2)^{-1}

  friend bool operator==(const SampleRow&, const SampleRow&) = default;
};

/// Probabilities reported for both observables.
inline constexpr double kQuantileLevels[] = {0.05, 0.25, 0.5, 0.75, 0.95};

struct Moments {
  double mean = 0.0;
  double standard_error = 0.0;  ///< sample standard deviation / sqrt(count); 0 for one sample
  std::vector<double> quantiles;
};

/// Empirical CDF of lambda_1 / c(n, z) on a grid and the fitted constant.
struct TailSummary {
  double scale = 0.0;  ///< c(n, z)
  std::vector<double> x;
  std::vector<double> cdf;
  std::vector<double> envelope;  ///< (1 + |log x|) x
  double C_hat = 0.0;
};

struct RunSummary {
  std::int64_t count = 0;
  Moments lambda1;
  Moments trace_resolvent;
  std::optional<double> prediction;
  std::optional<double> ratio;  ///< mean trace / prediction
  std::optional<TailSummary> tail;
  std::vector<std::string> warnings;
};

enum class RecordKind { t_experiment, tail_experiment, samples };

[[nodiscard]] std::string to_string(RecordKind k);
[[nodiscard]] RecordKind parse_record_kind(const std::string& s);

struct RunRecord {
  RecordKind kind = RecordKind::samples;
  nlohmann::json config;  ///< resolved configuration echo, including derived eps
  std::string config_digest;
  std::vector<SampleRow> rows;
  RunSummary summary;
};

/// Type 7 (linear interpolation) quantile of `sorted`.
[[nodiscard]] double quantile_sorted(const std::vector<double>& sorted, double p);

[[nodiscard]] Moments moments(const std::vector<double>& values);

/// Mean, errors and quantiles from rows in index order.  Prediction and tail
/// grid are inputs; ratio and C_hat are derived.
[[nodiscard]] RunSummary summarize(const std::vector<SampleRow>& rows, std::optional<double> prediction,
                                   const std::optional<TailSummary>& tail_grid, std::vector<std::string> warnings);

/// Fills cdf, envelope and C_hat for the grid in `tail.x`.
void fill_tail(TailSummary& tail, const std::vector<SampleRow>& rows);

/// 20 log-spaced points in [0.01, 1].
[[nodiscard]] std::vector<double> default_tail_grid();

[[nodiscard]] nlohmann::json to_json(const SampleRow& r);
[[nodiscard]] nlohmann::json to_json(const RunSummary& s);
[[nodiscard]] SampleRow sample_row_from_json(const nlohmann::json& j);
[[nodiscard]] RunSummary summary_from_json(const nlohmann::json& j);

/// FNV-1a over the compact dump of `config`, 16 hex digits.
[[nodiscard]] std::string config_digest(const nlohmann::json& config);

/// One `sample` line per row, then one `summary` line carrying the config.
[[nodiscard]] std::string to_jsonl(const RunRecord& r);
void write_jsonl(const std::string& path, const RunRecord& r);

/// Parses a record and recomputes its summary from the rows; throws
/// InputError if the stored summary or digest does not match bit for bit.
[[nodiscard]] RunRecord parse_jsonl(const std::string& text);
[[nodiscard]] RunRecord read_jsonl(const std::string& path);

/// Validates `doc` against the subset of JSON Schema used by the golden
/// files: type, required, properties, items, minItems, maxItems, enum,
/// minimum and maximum.  Returns one message per violation.
[[nodiscard]] std::vector<std::string> schema_violations(const nlohmann::json& doc, const nlohmann::json& schema);

}  // namespace ginlab
