// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

// Command line front end: sampling, identity checks, boundary tracing,
// asymptotic evaluation and the Monte Carlo experiments.
//
// Exit codes: 0 pass, 1 numeric failure or failed check, 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ginlab/harness.hpp"
#include "ginlab/identities.hpp"

using namespace ginlab;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct ExperimentFlags {
  Index n = 100;
  std::int64_t samples = 100;
  std::uint64_t seed = 1;
  double z_re = 0.0, z_im = 0.0;
  std::string regime = "bulk";
  double eps_tilde = 1.0;
  std::string deformation = "zero";
  std::optional<std::uint64_t> deformation_seed;
  std::string diagonal;
  std::string matrix;
  bool fixed_a0 = false;
  int workers = 1;
  double grid_fraction = 1.0 / 200.0;
  std::string config;
  std::string out;
};

void add_deformation_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--n", f.n, "Matrix dimension")->check(CLI::PositiveNumber);
  app->add_option("--deformation", f.deformation, "zero | diagonal | hermitian_wigner | ginibre | user_matrix");
  app->add_option("--deformation-seed", f.deformation_seed, "Seed of a random deformation");
  app->add_option("--diagonal", f.diagonal, "Diagonal entries as 're,im;re,im;...'");
  app->add_option("--matrix", f.matrix, "A0 file for user_matrix");
  app->add_option("--config", f.config, "JSON file whose fields override the flags");
}

void add_experiment_flags(CLI::App* app, ExperimentFlags& f) {
  add_deformation_flags(app, f);
  app->add_option("--samples", f.samples, "Number of independent samples")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--z-re", f.z_re, "Re z");
  app->add_option("--z-im", f.z_im, "Im z");
  app->add_option("--regime", f.regime, "edge | bulk | transition");
  app->add_option("--eps-tilde", f.eps_tilde, "Rescaled regularisation");
  app->add_flag("--fixed-a0", f.fixed_a0, "Pin one realisation of a random deformation");
  app->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--grid-fraction", f.grid_fraction, "Boundary grid step relative to the box size");
  app->add_option("--out", f.out, "JSONL record path");
}

std::vector<cd> parse_diagonal(const std::string& text) {
  std::vector<cd> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    double re = 0.0, im = 0.0;
    char comma = 0;
    std::istringstream in(item);
    in >> re;
    if (in >> comma) {
      if (comma != ',' || !(in >> im)) throw UsageError("bad diagonal entry '" + item + "'");
    } else if (in.fail() && !in.eof()) {
      throw UsageError("bad diagonal entry '" + item + "'");
    }
    values.emplace_back(re, im);
  }
  return values;
}

ExperimentConfig build_config(const ExperimentFlags& f) {
  ExperimentConfig c;
  c.n = f.n;
  c.samples = f.samples;
  c.master_seed = f.seed;
  c.z = cd(f.z_re, f.z_im);
  c.regime = parse_regime(f.regime);
  c.eps_tilde = f.eps_tilde;
  c.fixed_A0 = f.fixed_a0;
  c.workers = f.workers;
  c.grid_fraction = f.grid_fraction;
  c.output_path = f.out;
  c.deformation.kind = parse_deformation_kind(f.deformation);
  c.deformation.n = f.n;
  c.deformation.seed = f.deformation_seed;
  if (c.deformation.kind == DeformationKind::diagonal) {
    c.deformation.diagonal = parse_diagonal(f.diagonal);
    if (f.diagonal.empty()) throw UsageError("diagonal deformation needs --diagonal");
  }
  if (c.deformation.kind == DeformationKind::user_matrix) c.deformation.path = f.matrix;
  if (!f.config.empty()) c = read_config(f.config, c);
  if (c.deformation.kind == DeformationKind::diagonal && f.config.empty()) c.n = c.deformation.n;
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

void emit_record(const RunRecord& rec, const std::string& out) {
  if (out.empty()) std::cout << to_jsonl(rec);
}

int cmd_sample(const ExperimentFlags& f, double eps) {
  const RunRecord rec = run_sample_record(resolve_for_sampling(build_config(f), eps));
  emit_record(rec, f.out);
  if (!f.out.empty()) std::cout << json{{"samples", rec.summary.count}, {"out", f.out}}.dump() << '\n';
  return kExitPass;
}

int cmd_verify(std::uint64_t seed, const std::string& json_out) {
  bool ok = true;
  json report = json::array();
  for (const auto& c : verify_identities(seed)) {
    std::printf("%-32s deviation %.3e  tolerance %.1e  %3d instances  %.3f s  %s\n", c.name.c_str(), c.deviation,
                c.tolerance, c.instances, c.seconds, c.pass() ? "PASS" : "FAIL");
    ok = ok && c.pass();
    report.push_back({{"name", c.name},
                      {"deviation", c.deviation},
                      {"tolerance", c.tolerance},
                      {"instances", c.instances},
                      {"seconds", c.seconds},
                      {"pass", c.pass()}});
  }
  if (!json_out.empty()) write_text(json_out, report.dump(2) + "\n");
  return ok ? kExitPass : kExitFail;
}

int cmd_trace(const ExperimentFlags& f, double grid_step, const std::string& csv, const std::string& sidecar,
              const std::string& svg) {
  ExperimentConfig c = build_config(f);
  c.validate();
  const Eigen::MatrixXcd a0 = realize_deformation(c.deformation);
  const Box box = support_box(a0);
  const double step = grid_step > 0.0 ? grid_step : c.grid_fraction * (box.re_max - box.re_min);
  const BoundaryContour contour = trace_boundary(a0, box, step);
  if (!csv.empty()) write_contour_csv(csv, contour);
  if (!sidecar.empty()) write_contour_sidecar(sidecar, contour, matrix_digest(a0), c.deformation.seed);
  if (!svg.empty()) {
    std::vector<PlotSeries> series;
    for (std::size_t k = 0; k < contour.polylines.size(); ++k) {
      PlotSeries s{"component " + std::to_string(k), {}, {}};
      for (cd p : contour.polylines[k]) {
        s.x.push_back(p.real());
        s.y.push_back(p.imag());
      }
      series.push_back(std::move(s));
    }
    write_text(svg, svg_line_plot("F(z) = 1", series, false, false));
  }
  std::cout << json{{"components", contour.polylines.size()},
                    {"vertices", contour.vertex_count()},
                    {"grid_step", contour.grid_step},
                    {"warnings", contour.warnings}}
                   .dump()
            << '\n';
  return kExitPass;
}

struct SyntheticFlags {
  std::optional<double> k, c2, dist, u_star;
};

int cmd_evaluate(const ExperimentFlags& f, const SyntheticFlags& s) {
  json out;
  if (s.k || s.c2 || s.dist) {
    if (!s.k || !s.c2 || !s.dist) throw UsageError("synthetic coefficients need --k, --c2 and --dist");
    SaddleCoefficients c;
    c.k = *s.k;
    c.c2 = *s.c2;
    c.dist = *s.dist;
    c.delta = std::sqrt(*s.dist);
    c.u_star = s.u_star.value_or(std::sqrt(*s.k / *s.c2) * c.delta);
    const Regime regime = parse_regime(f.regime);
    const RegimeInput in = RegimeInput::from_coefficients(regime, static_cast<double>(f.n), f.eps_tilde, c);
    out = {{"regime", f.regime}, {"n", f.n}, {"eps", in.eps()}, {"synthetic", true}};
    switch (regime) {
      case Regime::edge: out["T"] = edge_T(in).T; break;
      case Regime::bulk: out["T"] = bulk_T(in); break;
      case Regime::transition: {
        const auto t = transition_T(in);
        out["T"] = t.value;
        out["error_scale"] = t.error_scale;
        break;
      }
    }
  } else {
    const ResolvedConfig r = resolve(build_config(f));
    out = r.echo();
    out["T"] = *r.prediction;
  }
  std::cout << out.dump(2) << '\n';
  return kExitPass;
}

void print_summary(const RunRecord& rec) {
  json j = to_json(rec.summary);
  j["kind"] = to_string(rec.kind);
  j["config_digest"] = rec.config_digest;
  std::cerr << j.dump(2) << '\n';
}

int cmd_t_experiment(const ExperimentFlags& f, const std::string& svg) {
  const RunRecord rec = run_T_experiment(build_config(f));
  emit_record(rec, f.out);
  print_summary(rec);
  if (!svg.empty()) {
    PlotSeries mean{"running mean of T", {}, {}}, pred{"prediction", {}, {}};
    double sum = 0.0;
    for (const auto& row : rec.rows) {
      sum += row.trace_resolvent;
      mean.x.push_back(static_cast<double>(row.index + 1));
      mean.y.push_back(sum / static_cast<double>(row.index + 1));
    }
    pred.x = {1.0, static_cast<double>(rec.rows.size())};
    pred.y = {*rec.summary.prediction, *rec.summary.prediction};
    write_text(svg, svg_line_plot("T estimate vs prediction", {mean, pred}, true, false));
  }
  return kExitPass;
}

int cmd_tail_experiment(const ExperimentFlags& f, const std::string& csv, const std::string& svg) {
  const RunRecord rec = run_tail_experiment(build_config(f));
  emit_record(rec, f.out);
  print_summary(rec);
  const TailSummary& t = *rec.summary.tail;
  if (!csv.empty()) {
    std::ostringstream out;
    out << "x,cdf,envelope\n";
    char buf[96];
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t.x[i], t.cdf[i], t.envelope[i]);
      out << buf;
    }
    write_text(csv, out.str());
  }
  if (!svg.empty()) {
    std::vector<double> scaled(t.envelope.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = t.C_hat * t.envelope[i];
    write_text(svg, svg_line_plot("P(lambda_1 <= x c(n, z))", {{"empirical CDF", t.x, t.cdf},
                                                                 {"C (1 + |log x|) x", t.x, scaled}},
                                  true, true));
  }
  return kExitPass;
}

int cmd_compare(const std::string& record_path, double low, double high, const std::string& json_out) {
  const RunRecord rec = read_jsonl(record_path);
  const ExperimentConfig c = config_from_json(rec.config);
  const ComparisonReport r = compare(rec, evaluate(resolve(c)), low, high);
  const std::string text = r.to_json().dump(2) + "\n";
  if (!json_out.empty()) write_text(json_out, text);
  std::cout << text;
  if (r.comparable)
    std::printf("ratio %.6f  [%.6f, %.6f]  band [%g, %g]  %s\n", r.ratio, r.ratio_low, r.ratio_high, low, high,
                r.pass ? "PASS" : "FAIL");
  else
    std::printf("non-comparable: %s\n", r.note.c_str());
  return r.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ginlab: least singular values and resolvent traces of deformed Ginibre matrices"};
  app.require_subcommand(1);
  ExperimentFlags flags;
  int code = kExitPass;

  auto* sample = app.add_subcommand("sample", "Draw samples and record lambda_1 and the resolvent trace");
  add_experiment_flags(sample, flags);
  double eps = 0.0;
  sample->add_option("--eps", eps, "Regularisation eps")->required();

  auto* verify = app.add_subcommand("verify-identities", "Check the exact algebraic identities");
  std::uint64_t verify_seed = 2025;
  std::string verify_json;
  verify->add_option("--seed", verify_seed, "Seed of the random instances");
  verify->add_option("--json", verify_json, "Write the report as JSON");

  auto* trace = app.add_subcommand("trace-boundary", "Trace the level line F(z) = 1");
  add_deformation_flags(trace, flags);
  double grid_step = 0.0;
  std::string csv, sidecar, svg;
  trace->add_option("--grid-step", grid_step, "Absolute grid step (default: box size / 200)");
  trace->add_option("--csv", csv, "Contour CSV path");
  trace->add_option("--sidecar", sidecar, "Contour metadata JSON path");
  trace->add_option("--svg", svg, "Contour plot path");

  auto* eval = app.add_subcommand("evaluate", "Evaluate the asymptotic prediction of T");
  add_experiment_flags(eval, flags);
  SyntheticFlags synth;
  eval->add_option("--k", synth.k, "Synthetic |grad F| at the foot point");
  eval->add_option("--c2", synth.c2, "Synthetic c2");
  eval->add_option("--dist", synth.dist, "Synthetic distance to the boundary");
  eval->add_option("--u-star", synth.u_star, "Synthetic u*");

  auto* texp = app.add_subcommand("t-experiment", "Monte Carlo estimate of T against its prediction");
  add_experiment_flags(texp, flags);
  texp->add_option("--svg", svg, "Running mean plot path");

  auto* tail = app.add_subcommand("tail-experiment", "Empirical tail of lambda_1 against the envelope");
  add_experiment_flags(tail, flags);
  tail->add_option("--csv", csv, "CDF CSV path");
  tail->add_option("--svg", svg, "CDF plot path");

  auto* cmp = app.add_subcommand("compare", "Compare a T record with its prediction");
  std::string record_path, cmp_json;
  double low = 0.8, high = 1.25;
  cmp->add_option("--record", record_path, "JSONL record")->required();
  cmp->add_option("--low", low, "Lower end of the ratio band");
  cmp->add_option("--high", high, "Upper end of the ratio band");
  cmp->add_option("--json", cmp_json, "Write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*sample) code = cmd_sample(flags, eps);
    else if (*verify) code = cmd_verify(verify_seed, verify_json);
    else if (*trace) code = cmd_trace(flags, grid_step, csv, sidecar, svg);
    else if (*eval) code = cmd_evaluate(flags, synth);
    else if (*texp) code = cmd_t_experiment(flags, svg);
    else if (*tail) code = cmd_tail_experiment(flags, csv, svg);
    else if (*cmp) code = cmd_compare(record_path, low, high, cmp_json);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return code;
}
