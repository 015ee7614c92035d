// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ginlab/rng.hpp"

namespace ginlab {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (n < 1) throw UsageError("n must be >= 1");
  if (samples < 1) throw UsageError("samples must be >= 1");
  if (!(eps_tilde > 0.0) || !std::isfinite(eps_tilde)) throw UsageError("eps_tilde must be positive");
  if (workers < 1) throw UsageError("workers must be >= 1");
  if (!(grid_fraction > 0.0 && grid_fraction < 0.5)) throw UsageError("grid_fraction must lie in (0, 0.5)");
  deformation.validate();
  if (deformation.kind != DeformationKind::user_matrix && deformation.n != n)
    throw UsageError("deformation dimension " + std::to_string(deformation.n) + " differs from n = " +
                     std::to_string(n));
}

namespace {

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw UsageError("complex values are [re, im] pairs");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json deformation_json(const DeformationSpec& d) {
  json j = {{"kind", to_string(d.kind)}, {"n", d.n}};
  if (d.kind == DeformationKind::diagonal) {
    json diag = json::array();
    for (cd v : d.diagonal) diag.push_back(complex_json(v));
    j["diagonal"] = diag;
  }
  if (d.kind == DeformationKind::user_matrix) j["path"] = d.path;
  j["seed"] = d.seed ? json(*d.seed) : json(nullptr);
  return j;
}

DeformationSpec deformation_from_json(const json& j, DeformationSpec base, Index n) {
  if (j.contains("kind")) base.kind = parse_deformation_kind(j.at("kind").get<std::string>());
  if (j.contains("diagonal")) {
    base.diagonal.clear();
    for (const auto& v : j.at("diagonal")) base.diagonal.push_back(complex_from_json(v));
  }
  if (j.contains("path")) base.path = j.at("path").get<std::string>();
  if (j.contains("seed")) base.seed = j.at("seed").is_null() ? std::nullopt : std::optional(j.at("seed").get<std::uint64_t>());
  if (j.contains("n"))
    base.n = j.at("n").get<Index>();
  else if (base.kind == DeformationKind::diagonal)
    base.n = static_cast<Index>(base.diagonal.size());
  else
    base.n = n;
  return base;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return {{"deformation", deformation_json(c.deformation)},
          {"z", complex_json(c.z)},
          {"regime", to_string(c.regime)},
          {"eps_tilde", c.eps_tilde},
          {"n", c.n},
          {"samples", c.samples},
          {"master_seed", c.master_seed},
          {"output_path", c.output_path},
          {"fixed_A0", c.fixed_A0},
          {"grid_fraction", c.grid_fraction}};
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig base) {
  try {
    if (j.contains("n")) base.n = j.at("n").get<Index>();
    if (j.contains("z")) base.z = complex_from_json(j.at("z"));
    if (j.contains("regime")) base.regime = parse_regime(j.at("regime").get<std::string>());
    if (j.contains("eps_tilde")) base.eps_tilde = j.at("eps_tilde").get<double>();
    if (j.contains("samples")) base.samples = j.at("samples").get<std::int64_t>();
    if (j.contains("master_seed")) base.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_path")) base.output_path = j.at("output_path").get<std::string>();
    if (j.contains("fixed_A0")) base.fixed_A0 = j.at("fixed_A0").get<bool>();
    if (j.contains("workers")) base.workers = j.at("workers").get<int>();
    if (j.contains("grid_fraction")) base.grid_fraction = j.at("grid_fraction").get<double>();
    base.deformation = deformation_from_json(j.value("deformation", json::object()), base.deformation, base.n);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  return base;
}

ExperimentConfig read_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

RegimeInput ResolvedConfig::regime_input() const {
  return RegimeInput::from_coefficients(config.regime, static_cast<double>(config.n), config.eps_tilde, coeffs);
}

json ResolvedConfig::echo() const {
  json j = to_json(config);
  json d = {{"eps", eps},
            {"reference_a0_digest", matrix_digest(reference_a0)},
            {"a0_policy", config.deformation.is_random() && !config.fixed_A0 ? "redrawn" : "fixed"},
            {"prediction", prediction ? json(*prediction) : json(nullptr)},
            {"warnings", warnings}};
  if (has_geometry) {
    d["dist"] = coeffs.dist;
    d["delta"] = delta;
    d["delta_tilde"] = delta_tilde;
    d["u_star"] = coeffs.u_star;
    d["c2"] = coeffs.c2;
    d["c3"] = coeffs.c3;
    d["k"] = coeffs.k;
    d["z_star"] = complex_json(coeffs.z_star);
    d["base_point"] = coeffs.base == BasePoint::zero ? "zero" : "u_star_squared";
    d["location"] = to_string(coeffs.location);
  }
  j["derived"] = d;
  return j;
}

Box support_box(const Eigen::MatrixXcd& a0) {
  const double radius = (a0.size() == 0 ? 0.0 : a0.operatorNorm()) + 1.05;
  return {-radius, radius, -radius, radius};
}

namespace {

Eigen::MatrixXcd reference_deformation(const ExperimentConfig& c) {
  if (!c.deformation.is_random()) return realize_deformation(c.deformation);
  return realize_deformation(c.deformation,
                             c.deformation.seed.value_or(stream_seed(c.master_seed, 0, Stream::deformation)));
}

}  // namespace

ResolvedConfig resolve(const ExperimentConfig& c) {
  c.validate();
  ResolvedConfig r;
  r.config = c;
  r.reference_a0 = reference_deformation(c);
  if (r.reference_a0.rows() != c.n) throw UsageError("deformation matrix dimension differs from n");

  const Box box = support_box(r.reference_a0);
  if (!box.contains(c.z)) throw ConfigError("z lies outside D");
  const SupportMap f(r.reference_a0);
  const BoundaryContour contour = trace_boundary(f, box, c.grid_fraction * (box.re_max - box.re_min));
  r.warnings = contour.warnings;
  const BasePoint base = c.regime == Regime::edge ? BasePoint::zero : BasePoint::u_star_squared;
  try {
    r.coeffs = saddle_coefficients(f, r.reference_a0, c.z, contour, base);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("z is not in the closure of D: ") + e.what());
  }
  if (c.regime != Regime::edge && r.coeffs.location != Location::inside)
    throw ConfigError(to_string(c.regime) + " regime needs z inside D");
  r.has_geometry = true;
  r.delta = r.coeffs.delta;
  const RegimeInput in = r.regime_input();
  r.delta_tilde = in.regime == Regime::edge ? in.delta_tilde : r.delta * std::pow(static_cast<double>(c.n), 0.25);
  r.eps = in.eps();
  try {
    switch (c.regime) {
      case Regime::edge: r.prediction = edge_T(in).T; break;
      case Regime::bulk: r.prediction = bulk_T(in); break;
      case Regime::transition: r.prediction = transition_T(in).value; break;
    }
  } catch (const RegimeError& e) {
    throw ConfigError(e.what());
  }
  return r;
}

ResolvedConfig resolve_for_sampling(const ExperimentConfig& c, double eps) {
  c.validate();
  if (!(eps > 0.0) || !std::isfinite(eps)) throw UsageError("eps must be positive");
  ResolvedConfig r;
  r.config = c;
  r.reference_a0 = reference_deformation(c);
  if (r.reference_a0.rows() != c.n) throw UsageError("deformation matrix dimension differs from n");
  r.coeffs.z = c.z;
  r.eps = eps;
  return r;
}

void parallel_for_index(std::int64_t count, int workers, const std::function<void(std::int64_t)>& f) {
  if (count <= 0) return;
  const int threads = static_cast<int>(std::min<std::int64_t>(std::max(workers, 1), count));
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex m;
  std::int64_t failed_index = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SampleRow> run_samples(const ResolvedConfig& r) {
  const ExperimentConfig& c = r.config;
  const bool redraw = c.deformation.is_random() && !c.fixed_A0;
  std::vector<SampleRow> rows(static_cast<std::size_t>(c.samples));
  parallel_for_index(c.samples, c.workers, [&](std::int64_t i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const std::uint64_t seed = stream_seed(c.master_seed, idx, Stream::noise);
    const Eigen::MatrixXcd h0 = sample_ginibre(c.n, seed);
    const SampleObservables o =
        redraw ? observe(realize_deformation(c.deformation, stream_seed(c.master_seed, idx, Stream::deformation)), h0,
                         c.z, r.eps, seed)
               : observe(r.reference_a0, h0, c.z, r.eps, seed);
    rows[static_cast<std::size_t>(i)] = {i, seed, o.lambda1, o.trace_resolvent};
  });
  return rows;
}

namespace {

RunRecord make_record(RecordKind kind, const ResolvedConfig& r, std::vector<SampleRow> rows,
                      std::optional<double> prediction, const std::optional<TailSummary>& grid,
                      std::vector<std::string> warnings) {
  RunRecord rec;
  rec.kind = kind;
  rec.config = r.echo();
  rec.config_digest = config_digest(rec.config);
  rec.summary = summarize(rows, prediction, grid, std::move(warnings));
  rec.rows = std::move(rows);
  if (!r.config.output_path.empty()) write_jsonl(r.config.output_path, rec);
  return rec;
}

}  // namespace

RunRecord run_sample_record(const ResolvedConfig& r) {
  return make_record(RecordKind::samples, r, run_samples(r), std::nullopt, std::nullopt, r.warnings);
}

RunRecord run_T_experiment(const ExperimentConfig& c) { return run_T_experiment(resolve(c)); }

RunRecord run_T_experiment(const ResolvedConfig& r) {
  auto rows = run_samples(r);
  return make_record(RecordKind::t_experiment, r, std::move(rows), r.prediction, std::nullopt, r.warnings);
}

RunRecord run_tail_experiment(const ExperimentConfig& c) { return run_tail_experiment(resolve(c)); }

RunRecord run_tail_experiment(const ResolvedConfig& r) {
  const double n = static_cast<double>(r.config.n);
  if (r.coeffs.dist < 1.0 / std::sqrt(n))
    throw ConfigError("tail experiment needs dist(z, boundary) >= n^{-1/2}");
  TailSummary grid;
  grid.scale = tail_scale(n, r.coeffs.dist);
  grid.x = default_tail_grid();
  auto rows = run_samples(r);
  std::vector<std::string> warnings = r.warnings;
  const auto hits = std::count_if(rows.begin(), rows.end(),
                                  [&](const SampleRow& s) { return s.lambda1 / grid.scale <= grid.x.front(); });
  if (hits < kMinTailHits) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "only %lld samples below x = %.3g: the smallest bins are unresolved",
                  static_cast<long long>(hits), grid.x.front());
    warnings.emplace_back(buf);
  }
  return make_record(RecordKind::tail_experiment, r, std::move(rows), std::nullopt, grid, std::move(warnings));
}

EvaluatorOutput evaluate(const ResolvedConfig& r) {
  if (!r.prediction) throw NumericError("no prediction for this configuration");
  return {r.config.regime, static_cast<double>(r.config.n), r.eps, *r.prediction};
}

json ComparisonReport::to_json() const {
  return {{"comparable", comparable}, {"pass", pass},          {"measured", measured},
          {"standard_error", standard_error}, {"predicted", predicted}, {"ratio", comparable ? json(ratio) : json(nullptr)},
          {"ratio_low", comparable ? json(ratio_low) : json(nullptr)},
          {"ratio_high", comparable ? json(ratio_high) : json(nullptr)},
          {"band", json::array({band_low, band_high})},
          {"note", note}};
}

ComparisonReport compare(const RunRecord& record, const EvaluatorOutput& p, double band_low, double band_high) {
  if (!(band_low > 0.0 && band_low <= band_high)) throw UsageError("comparison band must satisfy 0 < low <= high");
  if (record.kind != RecordKind::t_experiment && record.kind != RecordKind::samples)
    throw UsageError("only T records can be compared with an evaluator");
  try {
    const std::string regime = record.config.at("regime").get<std::string>();
    const double n = record.config.at("n").get<double>();
    const double eps = record.config.at("derived").at("eps").get<double>();
    if (regime != to_string(p.regime)) throw UsageError("record regime " + regime + " differs from " + to_string(p.regime));
    if (n != p.n) throw UsageError("record n differs from the evaluator n");
    if (std::abs(eps - p.eps) > 1e-12 * std::abs(eps)) throw UsageError("record eps differs from the evaluator eps");
  } catch (const json::exception& e) {
    throw UsageError(std::string("record lacks a resolved config: ") + e.what());
  }
  ComparisonReport r;
  r.measured = record.summary.trace_resolvent.mean;
  r.standard_error = record.summary.trace_resolvent.standard_error;
  r.predicted = p.value;
  r.band_low = band_low;
  r.band_high = band_high;
  if (p.value == 0.0 || !std::isfinite(p.value)) {
    r.note = "prediction is zero or not finite; ratio not defined";
    return r;
  }
  r.comparable = true;
  r.ratio = r.measured / r.predicted;
  const double spread = 2.0 * r.standard_error / std::abs(r.predicted);
  r.ratio_low = r.ratio - spread;
  r.ratio_high = r.ratio + spread;
  r.pass = r.ratio >= band_low && r.ratio <= band_high;
  return r;
}

std::string svg_line_plot(const std::string& title, const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  const auto tx = [log_x](double v) { return log_x ? std::log10(v) : v; };
  const auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };
  const auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
  };
  double xa = std::numeric_limits<double>::infinity(), xb = -std::numeric_limits<double>::infinity(), ya = std::numeric_limits<double>::infinity(), yb = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xa = std::min(xa, tx(s.x[i]));
      xb = std::max(xb, tx(s.x[i]));
      ya = std::min(ya, ty(s.y[i]));
      yb = std::max(yb, ty(s.y[i]));
    }
  if (!(xa <= xb)) xa = 0, xb = 1;
  if (!(ya <= yb)) ya = 0, yb = 1;
  if (xb == xa) xb = xa + 1;
  if (yb == ya) yb = ya + 1;
  const auto px = [&](double v) { return L + (tx(v) - xa) / (xb - xa) * (W - L - R); };
  const auto py = [&](double v) { return H - B - (ty(v) - ya) / (yb - ya) * (H - T - B); };

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title << "</text>\n"
      << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto label = [](double v, bool lg) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", lg ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  out << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << label(xa, log_x) << "</text>\n"
      << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(xb, log_x) << "</text>\n"
      << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << label(ya, log_y)
      << "</text>\n"
      << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">" << label(yb, log_y)
      << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "\"/>\n"
        << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 14 * k << "\" font-size=\"12\" fill=\"" << color << "\">"
        << s.name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ginlab
