// Copyright 2026 The RANalyzer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ranalyzer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>

#include "ranalyzer/error.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::pipeline {

using json = nlohmann::json;
namespace cc = commitcat;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json parse_json_line(std::string_view line, std::string_view what) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw DataError("malformed " + std::string(what) + ": " + e.what());
  }
}

std::string fmt(double v) { return std::isfinite(v) ? text::format_double(v) : "nan"; }

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "undefined"; }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

/// Reads a tab-separated file with a header line into column-keyed records.
std::vector<std::map<std::string, std::string>> read_tsv(const fs::path& file) {
  const auto lines = read_lines(file);
  if (lines.empty()) throw DataError("empty table: " + file.string());
  const auto header = text::split(lines[0], '\t');
  std::vector<std::map<std::string, std::string>> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = text::split(lines[i], '\t');
    if (cells.size() != header.size()) throw DataError("ragged table row in " + file.string());
    std::map<std::string, std::string> rec;
    for (std::size_t c = 0; c < header.size(); ++c) rec[header[c]] = cells[c];
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Feature store

std::vector<std::string> read_lines(const fs::path& file) {
  std::vector<std::string> out;
  for (auto& line : text::split(text::read_file(file.string()), '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::trim(line).empty()) out.push_back(std::move(line));
  }
  return out;
}

void write_lines(const fs::path& file, const std::vector<std::string>& lines) {
  std::string content;
  for (const auto& l : lines) {
    content += l;
    content += '\n';
  }
  text::write_file(file.string(), content);
}

std::vector<ingest::TestRecord> read_test_store(const fs::path& file) {
  std::vector<ingest::TestRecord> out;
  for (const auto& l : read_lines(file)) out.push_back(ingest::test_record_from_store_line(l));
  return out;
}

void write_test_store(const fs::path& file, const std::vector<ingest::TestRecord>& records) {
  std::vector<std::string> lines;
  for (const auto& r : records) lines.push_back(ingest::to_store_line(r));
  write_lines(file, lines);
}

std::vector<CommitMeta> read_commit_metadata(const fs::path& file) {
  std::vector<CommitMeta> out;
  std::set<std::string> seen;
  for (const auto& l : read_lines(file)) {
    const auto j = parse_json_line(l, "commit metadata");
    try {
      CommitMeta m;
      m.text.hash = j.at("hash").get<std::string>();
      m.text.message = j.at("message").get<std::string>();
      m.text.files_changed = j.value("files_changed", std::int64_t{0});
      m.text.lines_added = j.value("lines_added", std::int64_t{0});
      m.text.lines_deleted = j.value("lines_deleted", std::int64_t{0});
      m.deployed_at = j.value("deployed_at", std::string{});
      if (!ingest::is_valid_commit_hash(m.text.hash)) throw DataError("bad commit hash in metadata: " + m.text.hash);
      if (!m.deployed_at.empty() && !ingest::TestId::parse(m.deployed_at))
        throw DataError("bad deployed_at for commit " + m.text.hash);
      if (!seen.insert(m.text.hash).second) throw DataError("duplicate commit in metadata: " + m.text.hash);
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed commit metadata: ") + e.what());
    }
  }
  return out;
}

std::string commit_record_line(const CommitRecord& r) {
  json j;
  j["schema_version"] = kCommitSchemaVersion;
  j["kind"] = "commit";
  j["layout_version"] = cc::kFeatureLayoutVersion;
  j["hash"] = r.features.hash;
  j["deployed_at"] = r.deployed_at;
  json features = json::object();
  for (std::size_t i = 0; i < cc::kFeatureCount; ++i) features[cc::feature_names()[i]] = r.features.values[i];
  j["features"] = features;
  const auto& res = r.result;
  j["categories"] = cc::category_names(res.affected);
  json scores = json::object();
  for (std::size_t i = 0; i < cc::kNumCategories; ++i)
    if (res.scores[i] > 0.0) scores[std::string(cc::category_name(cc::category_at(i)))] = res.scores[i];
  j["scores"] = scores;
  j["layers"] = res.layers;
  j["components"] = res.components;
  j["evidence"] = res.evidence;
  j["strong_matches"] = res.strong_matches;
  j["confidence"] = cc::confidence_name(res.confidence);
  j["refined_by_llm"] = res.refined_by_llm;
  j["degraded_mode"] = res.degraded_mode;
  j["change_type"] = cc::change_type_name(res.change_type);
  j["rationale"] = res.rationale;
  j["matched_keywords"] = res.matched_keywords;
  return j.dump();
}

CommitRecord commit_record_from_line(std::string_view line) {
  const auto j = parse_json_line(line, "commit record");
  try {
    if (j.value("kind", "") != "commit" || j.at("schema_version").get<int>() != kCommitSchemaVersion)
      throw DataError("commit record schema mismatch");
    if (j.at("layout_version").get<int>() != cc::kFeatureLayoutVersion)
      throw DataError("commit feature layout version mismatch");
    CommitRecord r;
    r.features.hash = j.at("hash").get<std::string>();
    r.deployed_at = j.at("deployed_at").get<std::string>();
    const auto& f = j.at("features");
    for (std::size_t i = 0; i < cc::kFeatureCount; ++i) r.features.values[i] = f.at(cc::feature_names()[i]).get<double>();
    cc::decode(r.features);
    auto& res = r.result;
    for (const auto& name : j.at("categories")) {
      const auto c = cc::category_from_name(name.get<std::string>());
      if (!c) throw DataError("unknown category in commit record");
      res.affected.set(cc::index_of(*c));
    }
    for (const auto& [k, v] : j.at("scores").items()) {
      const auto c = cc::category_from_name(k);
      if (!c) throw DataError("unknown category in commit record");
      res.scores[cc::index_of(*c)] = v.get<double>();
    }
    res.layers = j.at("layers").get<int>();
    res.components = j.at("components").get<int>();
    res.evidence = j.at("evidence").get<double>();
    res.strong_matches = j.at("strong_matches").get<int>();
    const auto conf = cc::confidence_from_name(j.at("confidence").get<std::string>());
    const auto type = cc::change_type_from_name(j.at("change_type").get<std::string>());
    if (!conf || !type) throw DataError("bad confidence or change type in commit record");
    res.confidence = *conf;
    res.change_type = *type;
    res.refined_by_llm = j.at("refined_by_llm").get<bool>();
    res.degraded_mode = j.at("degraded_mode").get<bool>();
    res.rationale = j.at("rationale").get<std::string>();
    res.matched_keywords = j.at("matched_keywords").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed commit record: ") + e.what());
  }
}

std::vector<CommitRecord> read_commit_store(const fs::path& file) {
  std::vector<CommitRecord> out;
  for (const auto& l : read_lines(file)) out.push_back(commit_record_from_line(l));
  return out;
}

void write_commit_store(const fs::path& file, const std::vector<CommitRecord>& records) {
  std::vector<std::string> lines;
  for (const auto& r : records) lines.push_back(commit_record_line(r));
  write_lines(file, lines);
}

double Row::get(const std::string& key) const {
  const auto it = values.find(key);
  return it == values.end() ? kNaN : it->second;
}

bool Row::operator==(const Row& o) const {
  if (id != o.id || commit != o.commit || values.size() != o.values.size()) return false;
  for (auto a = values.begin(), b = o.values.begin(); a != values.end(); ++a, ++b) {
    if (a->first != b->first) return false;
    const bool na = std::isnan(a->second), nb = std::isnan(b->second);
    if (na != nb || (!na && a->second != b->second)) return false;
  }
  return true;
}

std::string row_line(const Row& row) {
  json j;
  j["schema_version"] = kRowSchemaVersion;
  j["kind"] = "row";
  j["id"] = row.id;
  j["commit"] = row.commit;
  json values = json::object();
  for (const auto& [k, v] : row.values) values[k] = std::isfinite(v) ? json(v) : json(nullptr);
  j["values"] = values;
  return j.dump();
}

Row row_from_line(std::string_view line) {
  const auto j = parse_json_line(line, "row");
  try {
    if (j.value("kind", "") != "row" || j.at("schema_version").get<int>() != kRowSchemaVersion)
      throw DataError("row schema mismatch");
    Row r;
    r.id = j.at("id").get<std::string>();
    r.commit = j.at("commit").get<std::string>();
    for (const auto& [k, v] : j.at("values").items()) r.values[k] = v.is_null() ? kNaN : v.get<double>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed row: ") + e.what());
  }
}

std::vector<Row> read_rows(const fs::path& file) {
  std::vector<Row> out;
  for (const auto& l : read_lines(file)) out.push_back(row_from_line(l));
  return out;
}

void write_rows(const fs::path& file, const std::vector<Row>& rows) {
  std::vector<std::string> lines;
  for (const auto& r : rows) lines.push_back(row_line(r));
  write_lines(file, lines);
}

// ---------------------------------------------------------------------------
// Categorize and assemble

std::vector<CommitRecord> categorize(const std::vector<CommitMeta>& commits, const CategorizeOptions& options) {
  std::unique_ptr<refine::RefinementService> service;
  if (options.refine == "stub") {
    service = std::make_unique<refine::StubRefinementService>();
  } else if (!options.refine.empty()) {
    service = std::make_unique<refine::HttpRefinementService>(options.refine, options.timeout);
  }
  std::vector<cc::CommitText> texts;
  for (const auto& c : commits) texts.push_back(c.text);
  const auto results = refine::categorize_all(texts, options.rules, service.get(), options.refine_options);
  std::vector<CommitRecord> out;
  for (std::size_t i = 0; i < commits.size(); ++i) {
    CommitRecord r;
    r.result = results[i];
    r.features = cc::build_feature_vector(results[i], commits[i].text, options.rules.complexity);
    r.deployed_at = commits[i].deployed_at;
    out.push_back(std::move(r));
  }
  return out;
}

AssembleResult assemble(const std::vector<ingest::TestRecord>& tests, const std::vector<CommitRecord>& commits) {
  std::map<std::string, const CommitRecord*> by_hash;
  for (const auto& c : commits) by_hash[text::lower(c.features.hash)] = &c;
  AssembleResult out;
  for (const auto& t : tests) {
    const auto it = by_hash.find(text::lower(t.commit_hash));
    if (it == by_hash.end()) {
      out.warnings.push_back(t.id.str() + ": no categorized commit " + t.commit_hash);
      continue;
    }
    const auto& c = *it->second;
    Row row;
    row.id = t.id.str();
    row.commit = c.features.hash;
    auto& v = row.values;
    auto opt = [](const std::optional<double>& o) { return o ? *o : kNaN; };
    v["target_rate"] = t.traffic.target_rate;
    v["measured_throughput"] = opt(t.traffic.measured_throughput);
    v["packet_loss"] = opt(t.traffic.packet_loss);
    v["jitter"] = opt(t.traffic.jitter);
    v["total_bytes"] = opt(t.traffic.total_bytes);
    v["total_packets"] = opt(t.traffic.total_packets);
    v["duration_s"] = opt(t.traffic.duration_s);
    v["throughput_efficiency"] = opt(t.traffic.throughput_efficiency);
    v["rsrp"] = opt(t.radio.rsrp);
    v["sinr"] = opt(t.radio.sinr);
    v["dl_bler"] = opt(t.radio.dl_bler);
    v["ul_bler"] = opt(t.radio.ul_bler);
    v["harq_retx_round1"] = opt(t.radio.harq_retx_round1);
    v["harq_retx_total"] = opt(t.radio.harq_retx_total);
    v["cqi_mean"] = opt(t.radio.cqi_mean);
    for (const auto& [k, x] : t.radio.extra) v[k] = x;
    const double minutes = t.traffic.duration_s && *t.traffic.duration_s > 0.0 ? *t.traffic.duration_s / 60.0 : kNaN;
    for (const auto& e : ingest::required_events()) {
      const auto ev = t.events.find(e);
      const double count = ev == t.events.end() ? kNaN : static_cast<double>(ev->second);
      v["ev_" + e] = count;
      v["rate_" + e] = count / minutes;
    }
    for (std::size_t i = 0; i < cc::kFeatureCount; ++i) v[cc::feature_names()[i]] = c.features.values[i];
    double dt = kNaN;
    if (const auto dep = ingest::TestId::parse(c.deployed_at))
      dt = static_cast<double>(t.id.epoch_seconds() - dep->epoch_seconds()) / 3600.0;
    v["delta_t_hours"] = dt;
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition

DecomposeOptions default_decompose_options() {
  DecomposeOptions o;
  o.bundles["channel"] = {"rsrp", "sinr", "dl_bler", "ul_bler"};
  o.bundles["load"] = {"target_rate"};
  std::vector<std::string> code;
  for (std::size_t i = 0; i < cc::kNumCategories; ++i) code.push_back(cc::feature_names()[i]);
  o.bundles["code"] = code;
  return o;
}

std::vector<double> column_values(const std::vector<Row>& rows, const std::string& column) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.get(column));
  return out;
}

std::vector<stats::VarianceReport> decompose(const std::vector<Row>& rows, const DecomposeOptions& options,
                                             std::vector<std::string>* skipped) {
  if (options.n_bins < 2) throw ConfigError("decomposition needs at least 2 bins");
  if (options.bundles.size() < 2) throw ConfigError("decomposition needs at least two bundles");
  std::map<std::string, std::vector<int>> labels;
  for (const auto& [name, cols] : options.bundles) {
    if (cols.empty()) throw ConfigError("empty bundle: " + name);
    for (const auto& c : cols) {
      if (labels.count(c)) continue;
      const auto values = column_values(rows, c);
      try {
        labels[c] = stats::categorize_column(values, options.n_bins, c).labels;
      } catch (const DataError& e) {
        // A column without spread carries no information; it becomes a single group.
        std::vector<int> l(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) l[i] = std::isfinite(values[i]) ? 0 : -1;
        labels[c] = std::move(l);
      }
    }
  }
  std::vector<stats::VarianceReport> out;
  for (const auto& target : options.targets) {
    const auto y = column_values(rows, target);
    for (const auto& [name, cols] : options.bundles) {
      stats::Factor p, q;
      std::vector<std::string> conditioning;
      for (const auto& c : cols) p.emplace_back(labels.at(c));
      for (const auto& [other, ocols] : options.bundles) {
        if (other == name) continue;
        conditioning.push_back(other);
        for (const auto& c : ocols) q.emplace_back(labels.at(c));
      }
      try {
        auto rep = stats::c_var(y, p, q);
        rep.target = target;
        rep.factor = name;
        rep.conditioning = conditioning;
        out.push_back(std::move(rep));
      } catch (const DataError& e) {
        if (skipped) skipped->push_back(target + "/" + name + ": " + e.what());
      }
    }
  }
  return out;
}

std::string decomposition_tsv(const std::vector<stats::VarianceReport>& reports) {
  std::string out = "target\tfactor\tconditioning\tc_var\tn\tjoint_groups\tcond_groups\n";
  for (const auto& r : reports)
    out += r.target + "\t" + r.factor + "\t" + join(r.conditioning, ",") + "\t" + fmt(r.score) + "\t" +
           std::to_string(r.n) + "\t" + std::to_string(r.joint_groups) + "\t" + std::to_string(r.cond_groups) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Baseline

baseline::FeatureMatrix environment_matrix(const std::vector<Row>& rows, const std::vector<std::string>& columns,
                                           const std::map<std::string, double>* imputation) {
  std::vector<std::string> ids;
  std::vector<double> raw;
  raw.reserve(rows.size() * columns.size());
  for (const auto& r : rows) {
    ids.push_back(r.id);
    for (const auto& c : columns) raw.push_back(r.get(c));
  }
  return baseline::make_feature_matrix(std::move(ids), columns, std::move(raw), imputation);
}

namespace {

std::vector<Row> with_finite(const std::vector<Row>& rows, const std::string& column) {
  std::vector<Row> out;
  for (const auto& r : rows)
    if (std::isfinite(r.get(column))) out.push_back(r);
  return out;
}

/// Drops environment columns that have no finite value at all.
std::vector<std::string> usable_columns(const std::vector<Row>& rows, const std::vector<std::string>& columns) {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (std::any_of(rows.begin(), rows.end(), [&](const Row& r) { return std::isfinite(r.get(c)); })) out.push_back(c);
  if (out.empty()) throw DataError("no environment column has data");
  return out;
}

}  // namespace

BaselineRun run_baseline(const std::vector<Row>& all, const BaselineOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0))
    throw ConfigError("train fraction must lie in (0, 1)");
  const auto rows = with_finite(all, "throughput_efficiency");
  const std::size_t cut = baseline::chronological_split(rows.size(), options.train_fraction);
  if (cut == 0 || cut == rows.size()) throw DataError("too few rows for a train/test split");
  const std::vector<Row> train(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::vector<Row> test(rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());
  const auto columns = usable_columns(train, options.columns);
  const auto x_train = environment_matrix(train, columns);
  const auto y_train = column_values(train, "throughput_efficiency");
  BaselineRun run;
  run.model = baseline::train_baseline(x_train, y_train, options.forest, options.seed, options.exec);
  const auto x_test = environment_matrix(test, columns, &run.model.imputation);
  const auto y_test = column_values(test, "throughput_efficiency");
  run.holdout = baseline::evaluate(run.model, x_test, y_test);
  std::vector<double> y_mbps, p_mbps;
  for (std::size_t r = 0; r < test.size(); ++r) {
    const double rate = test[r].get("target_rate");
    y_mbps.push_back(y_test[r] * rate);
    p_mbps.push_back(run.model.predict_row(x_test.row(r)) * rate);
  }
  run.holdout_mbps = baseline::regression_metrics(y_mbps, p_mbps);
  run.n_train = train.size();
  run.n_test = test.size();
  return run;
}

std::string baseline_metrics_tsv(const BaselineRun& run) {
  auto line = [](const char* unit, const baseline::RegressionMetrics& m) {
    return std::string("holdout\t") + unit + "\t" + std::to_string(m.n) + "\t" + fmt(m.r2) + "\t" + fmt(m.mae) +
           "\t" + fmt(m.rmse) + "\n";
  };
  return "split\tunit\tn\tr2\tmae\trmse\n" + line("efficiency", run.holdout) + line("mbps", run.holdout_mbps);
}

// ---------------------------------------------------------------------------
// Residual analysis

AnalyzeResult analyze(const std::vector<Row>& all, const AnalyzeOptions& options) {
  options.thresholds.validate();
  if (options.min_degraded < 1) throw ConfigError("min_degraded must be >= 1");
  const auto rows = with_finite(all, "throughput_efficiency");
  AnalyzeResult out;
  out.skipped_rows = all.size() - rows.size();
  if (rows.empty()) throw DataError("no rows with a throughput efficiency");

  std::vector<double> expected;
  if (options.model) {
    const auto x = environment_matrix(rows, options.model->columns, &options.model->imputation);
    for (std::size_t r = 0; r < x.rows(); ++r) expected.push_back(options.model->predict_row(x.row(r)));
  } else {
    const auto x = environment_matrix(rows, usable_columns(rows, options.columns));
    expected = baseline::cross_fit_predictions(x, column_values(rows, "throughput_efficiency"), options.folds,
                                               options.forest, options.seed, options.exec);
  }

  std::vector<residual::LabelInput> inputs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    residual::LabelInput in;
    in.test_id = rows[i].id;
    in.commit = rows[i].commit;
    in.eta_test = rows[i].get("throughput_efficiency");
    in.eta_exp = std::max(expected[i], residual::kEtaEpsilon * 2.0);
    for (std::size_t c = 0; c < cc::kNumCategories; ++c)
      if (rows[i].get(cc::feature_names()[c]) == 1.0) in.categories.set(c);
    in.delta_t_hours = rows[i].get("delta_t_hours");
    inputs.push_back(std::move(in));
  }
  out.labels = residual::label(inputs, options.thresholds);
  out.summary = residual::residual_summary(out.labels, options.thresholds);
  out.layers = residual::layer_impact_table(out.labels);
  out.rollup = residual::commit_rollup(out.labels, options.min_degraded);
  std::vector<residual::DegradationLabel> timed;
  for (const auto& l : out.labels)
    if (std::isfinite(l.delta_t_hours) && l.delta_t_hours >= 0.0) timed.push_back(l);
  auto temporal_params = options.temporal;
  temporal_params.tau_rho = options.thresholds.tau_rho;
  out.temporal = residual::temporal_baseline_flags(timed, temporal_params);
  out.histogram = residual::residual_histogram(out.labels);
  out.any_degraded = std::any_of(out.rollup.begin(), out.rollup.end(),
                                 [](const residual::CommitRollup& r) { return r.verdict_degraded; });
  return out;
}

void write_analysis(const fs::path& dir, const AnalyzeResult& r, const residual::Thresholds& th) {
  std::string labels = "test_id\tcommit\teta_test\teta_exp\trho\tgating\tdegraded\tattributed_layers\n";
  for (const auto& l : r.labels)
    labels += l.test_id + "\t" + l.commit + "\t" + fmt(l.eta_test) + "\t" + fmt(l.eta_exp) + "\t" +
              fmt(std::min(l.rho, residual::kReportRhoCap)) + "\t" + std::string(residual::gating_name(l.gating)) +
              "\t" + (l.degraded ? "1" : "0") + "\t" + join(cc::category_names(l.attributed_layers, true, false), ",") +
              "\n";
  text::write_file((dir / "labels.tsv").string(), labels);

  const auto& s = r.summary;
  std::string summary = "metric\tvalue\n";
  summary += "n\t" + std::to_string(s.n) + "\n";
  summary += "tau_rho\t" + fmt(th.tau_rho) + "\n";
  summary += "tau_exp\t" + fmt(th.tau_exp) + "\n";
  summary += "mean_rho\t" + fmt(s.mean) + "\n";
  summary += "median_rho\t" + fmt(s.median) + "\n";
  summary += "fraction_below_tau\t" + fmt(s.fraction_below) + "\n";
  summary += "degraded_n\t" + std::to_string(s.degraded.n) + "\n";
  summary += "degraded_mean_rho\t" + fmt(s.degraded.mean) + "\n";
  summary += "degraded_sd_rho\t" + fmt(s.degraded.sd) + "\n";
  summary += "normal_n\t" + std::to_string(s.normal.n) + "\n";
  summary += "normal_mean_rho\t" + fmt(s.normal.mean) + "\n";
  summary += "normal_sd_rho\t" + fmt(s.normal.sd) + "\n";
  summary += "welch_t\t" + (s.two_group ? fmt(s.welch.t) : "undefined") + "\n";
  summary += "welch_df\t" + (s.two_group ? fmt(s.welch.df) : "undefined") + "\n";
  summary += "welch_p\t" + (s.two_group ? fmt(s.welch.p) : "undefined") + "\n";
  summary += "cohens_d\t" + (s.two_group ? fmt(s.cohens_d) : "undefined") + "\n";
  summary += "skipped_rows\t" + std::to_string(r.skipped_rows) + "\n";
  text::write_file((dir / "residual_summary.tsv").string(), summary);

  std::string layers = "layer\tdegraded_cases\tmean_rho\tmedian_rho\tstd_rho\n";
  for (const auto& l : r.layers)
    layers += std::string(cc::category_name(l.layer)) + "\t" + std::to_string(l.degraded_cases) + "\t" +
              fmt(l.mean_rho) + "\t" + fmt(l.median_rho) + "\t" + fmt(l.std_rho) + "\n";
  text::write_file((dir / "layer_impact.tsv").string(), layers);

  std::string rollup = "commit\ttests\tdegraded_tests\tmin_rho\tmean_rho\tverdict\n";
  for (const auto& c : r.rollup)
    rollup += c.commit + "\t" + std::to_string(c.tests) + "\t" + std::to_string(c.degraded) + "\t" +
              fmt(std::min(c.min_rho, residual::kReportRhoCap)) + "\t" +
              fmt(std::min(c.mean_rho, residual::kReportRhoCap)) + "\t" +
              (c.verdict_degraded ? "degraded" : "normal") + "\n";
  text::write_file((dir / "commit_rollup.tsv").string(), rollup);

  std::map<std::string, bool> verdicts;
  for (const auto& c : r.rollup) verdicts[c.commit] = c.verdict_degraded;
  std::string temporal = "commit\tfaults\tscore\ttemporal_flag\tresidual_verdict\n";
  for (const auto& t : r.temporal)
    temporal += t.commit + "\t" + std::to_string(t.faults) + "\t" + fmt(t.score) + "\t" + (t.flagged ? "1" : "0") +
                "\t" + (verdicts[t.commit] ? "1" : "0") + "\n";
  text::write_file((dir / "temporal_baseline.tsv").string(), temporal);

  std::string hist = "lo\thi\tcount\n";
  for (const auto& b : r.histogram) hist += fmt(b.lo) + "\t" + fmt(b.hi) + "\t" + std::to_string(b.count) + "\n";
  text::write_file((dir / "residual_hist.tsv").string(), hist);
}

std::map<std::string, bool> read_labels(const fs::path& file) {
  std::map<std::string, bool> out;
  for (const auto& rec : read_tsv(file)) {
    const auto id = rec.find("test_id");
    const auto d = rec.find("degraded");
    if (id == rec.end() || d == rec.end()) throw DataError("labels table lacks test_id/degraded columns");
    out[id->second] = d->second == "1";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Risk

std::vector<std::string> risk_columns(const std::vector<std::string>& environment) {
  std::vector<std::string> cols = environment;
  for (const auto& f : cc::feature_names()) cols.push_back(f);
  return cols;
}

namespace {

risk::LabeledData labeled(const std::vector<Row>& rows, const std::vector<std::string>& columns,
                          const std::map<std::string, bool>& labels, const std::vector<double>& fill) {
  risk::LabeledData d;
  d.columns = columns;
  for (const auto& c : columns) {
    const auto& names = cc::feature_names();
    const auto it = std::find(names.begin(), names.end(), c);
    d.binary.push_back(it != names.end() && cc::binary_slots()[static_cast<std::size_t>(it - names.begin())]);
  }
  for (const auto& r : rows) {
    std::vector<double> x(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double v = r.get(columns[c]);
      x[c] = std::isfinite(v) ? v : fill[c];
    }
    d.push_back(std::move(x), labels.at(r.id) ? 1 : 0);
  }
  return d;
}

}  // namespace

RiskRun run_risk(const std::vector<Row>& all, const std::map<std::string, bool>& labels, const RiskOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0))
    throw ConfigError("train fraction must lie in (0, 1)");
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  std::vector<Row> rows;
  for (const auto& r : all)
    if (labels.count(r.id)) rows.push_back(r);
  const std::size_t cut = static_cast<std::size_t>(std::floor(static_cast<double>(rows.size()) * options.train_fraction));
  if (cut == 0 || cut == rows.size()) throw DataError("too few labelled rows for a train/test split");
  const std::vector<Row> train(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::vector<Row> test(rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());

  const auto columns = risk_columns(usable_columns(train, options.environment));
  std::vector<double> fill(columns.size(), 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::vector<double> finite;
    for (const auto& r : train)
      if (std::isfinite(r.get(columns[c]))) finite.push_back(r.get(columns[c]));
    if (!finite.empty()) fill[c] = stats::median(std::move(finite));
  }

  const auto train_data = labeled(train, columns, labels, fill);
  const auto balanced = risk::oversample_to_balance(train_data, options.k_neighbors, derive_seed(options.seed, 0x5e07e));
  RiskRun run;
  run.model = risk::train_risk(balanced, options.boost, options.seed, options.exec);
  run.model.imputation = fill;
  const auto test_data = labeled(test, columns, labels, fill);
  run.metrics = risk::evaluate_classifier(run.model, test_data, options.threshold);
  std::vector<double> scores;
  for (const auto& x : test_data.rows) scores.push_back(run.model.predict_row(x));
  run.auc = risk::roc_auc(scores, test_data.labels);
  run.n_train = train.size();
  run.n_test = test.size();
  run.n_synthetic = balanced.size() - train_data.size();
  return run;
}

std::string classifier_metrics_tsv(const RiskRun& run) {
  std::string out = "class\tprecision\trecall\tf1\tsupport\n";
  const auto& m = run.metrics;
  out += "degraded\t" + fmt(m.degraded.precision) + "\t" + fmt(m.degraded.recall) + "\t" + fmt(m.degraded.f1) + "\t" +
         std::to_string(m.degraded.support) + "\n";
  out += "normal\t" + fmt(m.normal.precision) + "\t" + fmt(m.normal.recall) + "\t" + fmt(m.normal.f1) + "\t" +
         std::to_string(m.normal.support) + "\n";
  out += "#confusion\ttp=" + std::to_string(m.tp) + "\tfn=" + std::to_string(m.fn) + "\tfp=" + std::to_string(m.fp) +
         "\ttn=" + std::to_string(m.tn) + "\n";
  out += "#auc\t" + fmt(run.auc) + "\n";
  out += "#rows\ttrain=" + std::to_string(run.n_train) + "\ttest=" + std::to_string(run.n_test) +
         "\tsynthetic=" + std::to_string(run.n_synthetic) + "\n";
  return out;
}

std::vector<Score> score(const std::vector<Row>& rows, const risk::RiskModel& model) {
  std::vector<Score> out;
  for (const auto& r : rows) {
    std::map<std::string, double> x;
    for (const auto& c : model.columns) x[c] = r.get(c);
    out.push_back({r.id, r.commit, model.predict(x)});
  }
  return out;
}

std::string scores_tsv(const std::vector<Score>& scores, double threshold) {
  std::string out = "test_id\tcommit\tprobability\thigh_risk\n";
  for (const auto& s : scores)
    out += s.id + "\t" + s.commit + "\t" + fmt(s.probability) + "\t" + (s.probability >= threshold ? "1" : "0") + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Report

std::string build_report(const fs::path& dir) {
  struct Section {
    const char* file;
    const char* title;
  };
  static const Section sections[] = {
      {"decomposition.tsv", "Variance decomposition"},
      {"baseline_metrics.tsv", "Environment baseline"},
      {"residual_summary.tsv", "Residual summary"},
      {"layer_impact.tsv", "Performance impact by protocol layer"},
      {"commit_rollup.tsv", "Commit verdicts"},
      {"temporal_baseline.tsv", "Temporal-correlation baseline"},
      {"risk_metrics.tsv", "Risk classifier"},
  };
  std::string out = "RANalyzer report\n================\n";
  std::size_t found = 0;
  for (const auto& s : sections) {
    const auto path = dir / s.file;
    if (!fs::exists(path)) continue;
    ++found;
    const auto lines = read_lines(path);
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width;
    for (const auto& l : lines) {
      cells.push_back(text::split(l, '\t'));
      for (std::size_t c = 0; c < cells.back().size(); ++c) {
        if (width.size() <= c) width.push_back(0);
        width[c] = std::max(width[c], cells.back()[c].size());
      }
    }
    out += "\n" + std::string(s.title) + " (" + s.file + ")\n";
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        line += row[c];
        if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
      }
      out += "  " + line + "\n";
    }
  }
  if (found == 0) throw DataError("no stage outputs found in " + dir.string());
  return out;
}

}  // namespace ranalyzer::pipeline
