// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file harness.hpp
 * @brief Monte Carlo experiments over the deformed Ginibre ensemble, their
 *        comparison with the asymptotic evaluators, and plain plots.
 */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ginlab/asymptotics.hpp"
#include "ginlab/record.hpp"

namespace ginlab {

struct ExperimentConfig {
  DeformationSpec deformation;
  cd z = 0.0;
  Regime regime = Regime::bulk;
  double eps_tilde = 1.0;
  Index n = 100;
  std::int64_t samples = 100;
  std::uint64_t master_seed = 1;
  std::string output_path;
  /// Random deformations are redrawn per sample unless pinned here.
  bool fixed_A0 = false;
  int workers = 1;
  /// Grid step for tracing the boundary, relative to the size of the box.
  double grid_fraction = 1.0 / 200.0;

  void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& c);
/// Fields present in `j` override those of `base`.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig read_config(const std::string& path, ExperimentConfig base = {});

/// Config plus everything derived from the reference A0: coefficients, eps
/// and the regime prediction of T.
struct ResolvedConfig {
  ExperimentConfig config;
  Eigen::MatrixXcd reference_a0;
  SaddleCoefficients coeffs;
  double eps = 0.0;
  double delta = 0.0;        ///< sqrt(dist)
  double delta_tilde = 0.0;  ///< (dist n^{1/2})^{1/2}
  std::optional<double> prediction;
  std::vector<std::string> warnings;
  bool has_geometry = false;  ///< false for sampling-only configurations

  [[nodiscard]] RegimeInput regime_input() const;
  /// Full resolved configuration, as embedded in every record.
  [[nodiscard]] nlohmann::json echo() const;
};

/// Square box centred at 0 containing D: F < 1 once |z| > ||A0||_2 + 1.
[[nodiscard]] Box support_box(const Eigen::MatrixXcd& a0);

/// Traces the boundary for the reference A0 and evaluates the regime
/// predictor.  Throws ConfigError when z is outside the closure of D, or
/// outside D for the bulk and transition regimes.
[[nodiscard]] ResolvedConfig resolve(const ExperimentConfig& c);

/// Skips geometry and prediction: eps is given, z may lie anywhere.
[[nodiscard]] ResolvedConfig resolve_for_sampling(const ExperimentConfig& c, double eps);

/// Calls f(i) for i in [0, count) on `workers` threads.  The first exception
/// by index is rethrown after all workers finish.
void parallel_for_index(std::int64_t count, int workers, const std::function<void(std::int64_t)>& f);

/// Per-sample rows; row i depends only on (config, master seed, i).
[[nodiscard]] std::vector<SampleRow> run_samples(const ResolvedConfig& r);

/// Rows and summary without a prediction.
[[nodiscard]] RunRecord run_sample_record(const ResolvedConfig& r);

/// Sample mean of n^{-1} Tr (Y + eps^2)^{-1} with the regime prediction.
[[nodiscard]] RunRecord run_T_experiment(const ExperimentConfig& c);
[[nodiscard]] RunRecord run_T_experiment(const ResolvedConfig& r);

/// Empirical CDF of lambda_1 / c(n, z) on the default grid.  Requires
/// dist(z, boundary) >= n^{-1/2}.
[[nodiscard]] RunRecord run_tail_experiment(const ExperimentConfig& c);
[[nodiscard]] RunRecord run_tail_experiment(const ResolvedConfig& r);

/// Bins with fewer hits than this in the smallest x trigger a warning.
inline constexpr std::int64_t kMinTailHits = 10;

struct EvaluatorOutput {
  Regime regime = Regime::bulk;
  double n = 0.0;
  double eps = 0.0;
  double value = 0.0;
};

[[nodiscard]] EvaluatorOutput evaluate(const ResolvedConfig& r);

struct ComparisonReport {
  bool comparable = false;
  bool pass = false;
  double measured = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  double ratio_low = 0.0, ratio_high = 0.0;  ///< ratio -/+ 2 standard errors
  double band_low = 0.0, band_high = 0.0;
  std::string note;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Measured/predicted ratio against the band [low, high].  A zero or
/// non-finite prediction is reported as non-comparable.
[[nodiscard]] ComparisonReport compare(const RunRecord& record, const EvaluatorOutput& prediction, double band_low,
                                       double band_high);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

/// Minimal SVG line plot; log_x and log_y take log10 of positive values.
[[nodiscard]] std::string svg_line_plot(const std::string& title, const std::vector<PlotSeries>& series, bool log_x,
                                        bool log_y);

}  // namespace ginlab
