// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ginlab/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ginlab/errors.hpp"

namespace ginlab {

using nlohmann::json;

std::string to_string(RecordKind k) {
  switch (k) {
    case RecordKind::t_experiment: return "t-experiment";
    case RecordKind::tail_experiment: return "tail-experiment";
    case RecordKind::samples: return "samples";
  }
  return "unknown";
}

RecordKind parse_record_kind(const std::string& s) {
  if (s == "t-experiment") return RecordKind::t_experiment;
  if (s == "tail-experiment") return RecordKind::tail_experiment;
  if (s == "samples") return RecordKind::samples;
  throw InputError("unknown record kind '" + s + "'");
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw UsageError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("quantile level must lie in [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Moments moments(const std::vector<double>& values) {
  if (values.empty()) throw UsageError("moments of an empty sample");
  Moments m;
  const double count = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / count;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.standard_error = std::sqrt(ss / (count - 1.0) / count);
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  for (double p : kQuantileLevels) m.quantiles.push_back(quantile_sorted(sorted, p));
  return m;
}

std::vector<double> default_tail_grid() {
  std::vector<double> x(20);
  for (int i = 0; i < 20; ++i) x[i] = std::pow(10.0, -2.0 + 2.0 * i / 19.0);
  return x;
}

void fill_tail(TailSummary& tail, const std::vector<SampleRow>& rows) {
  if (!(tail.scale > 0.0)) throw UsageError("tail scale must be positive");
  std::vector<double> ratios;
  ratios.reserve(rows.size());
  for (const auto& r : rows) ratios.push_back(r.lambda1 / tail.scale);
  std::sort(ratios.begin(), ratios.end());
  tail.cdf.clear();
  tail.envelope.clear();
  tail.C_hat = 0.0;
  for (double x : tail.x) {
    const auto below = std::upper_bound(ratios.begin(), ratios.end(), x) - ratios.begin();
    const double cdf = static_cast<double>(below) / static_cast<double>(ratios.size());
    const double env = (1.0 + std::abs(std::log(x))) * x;
    tail.cdf.push_back(cdf);
    tail.envelope.push_back(env);
    tail.C_hat = std::max(tail.C_hat, cdf / env);
  }
}

RunSummary summarize(const std::vector<SampleRow>& rows, std::optional<double> prediction,
                     const std::optional<TailSummary>& tail_grid, std::vector<std::string> warnings) {
  if (rows.empty()) throw UsageError("cannot summarize an empty record");
  RunSummary s;
  s.count = static_cast<std::int64_t>(rows.size());
  std::vector<double> l, t;
  l.reserve(rows.size());
  t.reserve(rows.size());
  for (const auto& r : rows) {
    l.push_back(r.lambda1);
    t.push_back(r.trace_resolvent);
  }
  s.lambda1 = moments(l);
  s.trace_resolvent = moments(t);
  s.prediction = prediction;
  if (prediction && *prediction != 0.0 && std::isfinite(*prediction)) s.ratio = s.trace_resolvent.mean / *prediction;
  if (tail_grid) {
    s.tail = tail_grid;
    fill_tail(*s.tail, rows);
  }
  s.warnings = std::move(warnings);
  return s;
}

namespace {

json to_json(const Moments& m) { return {{"mean", m.mean}, {"standard_error", m.standard_error}, {"quantiles", m.quantiles}}; }

Moments moments_from_json(const json& j) {
  Moments m;
  m.mean = j.at("mean").get<double>();
  m.standard_error = j.at("standard_error").get<double>();
  m.quantiles = j.at("quantiles").get<std::vector<double>>();
  return m;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const SampleRow& r) {
  return {{"type", "sample"}, {"index", r.index}, {"seed", r.seed}, {"lambda1", r.lambda1},
          {"trace_resolvent", r.trace_resolvent}};
}

SampleRow sample_row_from_json(const json& j) {
  SampleRow r;
  r.index = j.at("index").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lambda1 = j.at("lambda1").get<double>();
  r.trace_resolvent = j.at("trace_resolvent").get<double>();
  return r;
}

json to_json(const RunSummary& s) {
  json j = {{"count", s.count},
            {"lambda1", to_json(s.lambda1)},
            {"trace_resolvent", to_json(s.trace_resolvent)},
            {"quantile_levels", std::vector<double>(std::begin(kQuantileLevels), std::end(kQuantileLevels))},
            {"prediction", optional_number(s.prediction)},
            {"ratio", optional_number(s.ratio)},
            {"warnings", s.warnings}};
  if (s.tail) {
    j["tail"] = {{"scale", s.tail->scale},
                 {"x", s.tail->x},
                 {"cdf", s.tail->cdf},
                 {"envelope", s.tail->envelope},
                 {"C_hat", s.tail->C_hat}};
  } else {
    j["tail"] = nullptr;
  }
  return j;
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.count = j.at("count").get<std::int64_t>();
  s.lambda1 = moments_from_json(j.at("lambda1"));
  s.trace_resolvent = moments_from_json(j.at("trace_resolvent"));
  s.prediction = number_or_null(j, "prediction");
  s.ratio = number_or_null(j, "ratio");
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (!j.at("tail").is_null()) {
    const json& t = j.at("tail");
    TailSummary tail;
    tail.scale = t.at("scale").get<double>();
    tail.x = t.at("x").get<std::vector<double>>();
    tail.cdf = t.at("cdf").get<std::vector<double>>();
    tail.envelope = t.at("envelope").get<std::vector<double>>();
    tail.C_hat = t.at("C_hat").get<double>();
    s.tail = tail;
  }
  return s;
}

std::string config_digest(const json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_jsonl(const RunRecord& r) {
  std::string out;
  for (const auto& row : r.rows) {
    out += to_json(row).dump();
    out += '\n';
  }
  const json tail = {{"type", "summary"},
                     {"kind", to_string(r.kind)},
                     {"config_digest", r.config_digest},
                     {"config", r.config},
                     {"summary", to_json(r.summary)}};
  out += tail.dump();
  out += '\n';
  return out;
}

void write_jsonl(const std::string& path, const RunRecord& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << to_jsonl(r);
  if (!out) throw InputError("write to " + path + " failed");
}

RunRecord parse_jsonl(const std::string& text) {
  RunRecord r;
  std::istringstream in(text);
  std::string line;
  std::optional<json> summary_line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (summary_line) throw InputError("record continues after its summary line");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "sample") {
      r.rows.push_back(sample_row_from_json(j));
    } else if (type == "summary") {
      summary_line = std::move(j);
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown line type '" + type + "'");
    }
  }
  if (!summary_line) throw InputError("record has no summary line");
  try {
    r.kind = parse_record_kind(summary_line->at("kind").get<std::string>());
    r.config = summary_line->at("config");
    r.config_digest = summary_line->at("config_digest").get<std::string>();
    r.summary = summary_from_json(summary_line->at("summary"));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed summary line: ") + e.what());
  }
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    if (r.rows[i].index != static_cast<std::int64_t>(i)) throw InputError("sample rows are not in index order");
  if (config_digest(r.config) != r.config_digest) throw InputError("config digest mismatch");

  std::optional<TailSummary> grid;
  if (r.summary.tail) {
    grid = TailSummary{};
    grid->scale = r.summary.tail->scale;
    grid->x = r.summary.tail->x;
  }
  const RunSummary again = summarize(r.rows, r.summary.prediction, grid, r.summary.warnings);
  if (to_json(again).dump() != summary_line->at("summary").dump())
    throw InputError("stored summary does not match the sample rows");
  return r;
}

RunRecord read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_jsonl(ss.str());
}

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  throw UsageError("unsupported schema type '" + t + "'");
}

void check(const json& v, const json& schema, const std::string& where, std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const json& t = schema.at("type");
    bool ok = false;
    if (t.is_array()) {
      for (const auto& each : t) ok = ok || has_type(v, each.get<std::string>());
    } else {
      ok = has_type(v, t.get<std::string>());
    }
    if (!ok) {
      out.push_back(where + ": expected type " + t.dump() + ", got " + v.type_name());
      return;
    }
  }
  if (schema.contains("enum")) {
    const json& e = schema.at("enum");
    if (std::find(e.begin(), e.end(), v) == e.end()) out.push_back(where + ": value " + v.dump() + " not in enum");
  }
  if (v.is_number()) {
    if (schema.contains("minimum") && v.get<double>() < schema.at("minimum").get<double>())
      out.push_back(where + ": below minimum");
    if (schema.contains("maximum") && v.get<double>() > schema.at("maximum").get<double>())
      out.push_back(where + ": above maximum");
  }
  if (v.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema.at("required"))
        if (!v.contains(key.get<std::string>())) out.push_back(where + ": missing key '" + key.get<std::string>() + "'");
    if (schema.contains("properties"))
      for (const auto& [key, sub] : schema.at("properties").items())
        if (v.contains(key)) check(v.at(key), sub, where + "." + key, out);
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>())
      out.push_back(where + ": fewer than " + schema.at("minItems").dump() + " items");
    if (schema.contains("maxItems") && v.size() > schema.at("maxItems").get<std::size_t>())
      out.push_back(where + ": more than " + schema.at("maxItems").dump() + " items");
    if (schema.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], schema.at("items"), where + "[" + std::to_string(i) + "]", out);
  }
}

}  // namespace

std::vector<std::string> schema_violations(const json& doc, const json& schema) {
  std::vector<std::string> out;
  check(doc, schema, "$", out);
  return out;
}

}  // namespace ginlab
