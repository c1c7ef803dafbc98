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

// ranalyzer: command-line front end for the regression-attribution pipeline.
//
// Exit codes: 0 success, 1 data error, 2 configuration or usage error,
// 3 (analyze only) at least one commit verdict is degraded.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "ranalyzer/error.hpp"
#include "ranalyzer/ingest.hpp"
#include "ranalyzer/pipeline.hpp"
#include "ranalyzer/synthgen.hpp"
#include "ranalyzer/text.hpp"

namespace fs = std::filesystem;
namespace rp = ranalyzer::pipeline;
using ranalyzer::ConfigError;
using ranalyzer::DataError;

namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;

/// Rejects an output path that names one of the inputs.
void distinct_output(const fs::path& out, std::initializer_list<fs::path> inputs) {
  const auto o = fs::weakly_canonical(out);
  for (const auto& in : inputs)
    if (!in.empty() && fs::weakly_canonical(in) == o) throw ConfigError("output would overwrite input " + in.string());
}

std::map<std::string, std::string> read_commit_map(const fs::path& file) {
  std::map<std::string, std::string> out;
  for (const auto& line : rp::read_lines(file)) {
    if (line.front() == '#') continue;
    const auto cells = ranalyzer::text::split(line, '\t');
    if (cells.size() != 2) throw DataError("commit map lines must be `test_id<TAB>hash`");
    out[std::string(ranalyzer::text::trim(cells[0]))] = std::string(ranalyzer::text::trim(cells[1]));
  }
  return out;
}

struct Args {
  // shared
  std::uint64_t seed = 0;
  bool serial = false;
  // paths
  std::string dataset, out, rules, commit_pattern{ranalyzer::ingest::kDefaultCommitPattern}, commit_map;
  std::string commits, keyword_rules, refine = "stub";
  int timeout_ms = 5000, max_retries = 2, max_concurrency = 4;
  std::string tests, commit_store, rows, labels, model, metrics, out_dir, scenario, dir;
  // decompose
  int bins = 5;
  // forest
  int trees = 100, depth = 8;
  double train_fraction = 0.8;
  // analyze
  double tau_rho = 0.9, tau_exp = 0.6;
  int min_degraded = 2, folds = 5;
  double temporal_threshold = 1.0;
  // risk
  int estimators = 400, boost_depth = 4, k_neighbors = 5, min_leaf = 5;
  double learning_rate = 0.1, threshold = 0.5;
};

int run_ingest(const Args& a) {
  distinct_output(a.out, {a.dataset});
  ranalyzer::ingest::IngestOptions opt;
  if (!a.rules.empty()) opt.rules = ranalyzer::ingest::load_rules(a.rules);
  opt.commit_pattern = a.commit_pattern;
  if (!a.commit_map.empty()) opt.commit_map = read_commit_map(a.commit_map);
  opt.parallel = !a.serial;
  const auto res = ranalyzer::ingest::ingest_dataset(a.dataset, opt);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w.path << ": " << w.reason << "\n";
  for (const auto& r : res.rejected) std::cerr << "rejected: " << r.test_id << ": " << r.reason << "\n";
  if (res.records.empty()) throw DataError("no test could be ingested from " + a.dataset);
  rp::write_test_store(a.out, res.records);
  std::cout << "ingested " << res.records.size() << " tests (" << res.rejected.size() << " rejected, "
            << res.warnings.size() << " warnings)\n";
  return 0;
}

int run_categorize(const Args& a) {
  distinct_output(a.out, {a.commits});
  rp::CategorizeOptions opt;
  if (!a.keyword_rules.empty()) opt.rules = ranalyzer::commitcat::load_keyword_rules(a.keyword_rules);
  opt.refine = a.refine == "none" ? "" : a.refine;
  opt.refine_options.max_retries = a.max_retries;
  opt.refine_options.max_concurrency = a.max_concurrency;
  opt.timeout = std::chrono::milliseconds(a.timeout_ms);
  const auto records = rp::categorize(rp::read_commit_metadata(a.commits), opt);
  rp::write_commit_store(a.out, records);
  std::size_t refined = 0, degraded = 0;
  for (const auto& r : records) {
    refined += r.result.refined_by_llm;
    degraded += r.result.degraded_mode;
  }
  std::cout << "categorized " << records.size() << " commits (" << refined << " refined";
  if (degraded) std::cout << ", degraded mode: refinement unreachable for " << degraded;
  std::cout << ")\n";
  return 0;
}

int run_assemble(const Args& a) {
  distinct_output(a.out, {a.tests, a.commit_store});
  const auto res = rp::assemble(rp::read_test_store(a.tests), rp::read_commit_store(a.commit_store));
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  if (res.rows.empty()) throw DataError("no test matched a categorized commit");
  rp::write_rows(a.out, res.rows);
  std::cout << "assembled " << res.rows.size() << " rows\n";
  return 0;
}

int run_decompose(const Args& a) {
  distinct_output(a.out, {a.rows});
  auto opt = rp::default_decompose_options();
  opt.n_bins = a.bins;
  std::vector<std::string> skipped;
  const auto reports = rp::decompose(rp::read_rows(a.rows), opt, &skipped);
  for (const auto& s : skipped) std::cerr << "skipped: " << s << "\n";
  if (reports.empty()) throw DataError("no target could be decomposed");
  ranalyzer::text::write_file(a.out, rp::decomposition_tsv(reports));
  return 0;
}

ranalyzer::baseline::ForestParams forest(const Args& a) {
  ranalyzer::baseline::ForestParams p;
  p.n_trees = a.trees;
  p.max_depth = a.depth;
  return p;
}

int run_train_baseline(const Args& a) {
  distinct_output(a.model, {a.rows});
  rp::BaselineOptions opt;
  opt.forest = forest(a);
  opt.seed = a.seed;
  opt.train_fraction = a.train_fraction;
  opt.exec = a.serial ? ranalyzer::baseline::Execution::serial : ranalyzer::baseline::Execution::parallel;
  const auto run = rp::run_baseline(rp::read_rows(a.rows), opt);
  ranalyzer::text::write_file(a.model, run.model.serialize());
  if (!a.metrics.empty()) ranalyzer::text::write_file(a.metrics, rp::baseline_metrics_tsv(run));
  std::cout << "baseline " << run.model.fingerprint() << ": holdout r2=" << ranalyzer::text::format_double(run.holdout.r2)
            << " mae=" << ranalyzer::text::format_double(run.holdout.mae)
            << " rmse=" << ranalyzer::text::format_double(run.holdout.rmse) << "\n";
  return 0;
}

int run_analyze(const Args& a) {
  rp::AnalyzeOptions opt;
  opt.forest = forest(a);
  opt.seed = a.seed;
  opt.folds = a.folds;
  opt.thresholds = {a.tau_rho, a.tau_exp};
  opt.min_degraded = a.min_degraded;
  opt.temporal.threshold = a.temporal_threshold;
  opt.exec = a.serial ? ranalyzer::baseline::Execution::serial : ranalyzer::baseline::Execution::parallel;
  if (!a.model.empty())
    opt.model = ranalyzer::baseline::BaselineModel::parse(ranalyzer::text::read_file(a.model));
  const auto res = rp::analyze(rp::read_rows(a.rows), opt);
  fs::create_directories(a.out_dir);
  rp::write_analysis(a.out_dir, res, opt.thresholds);
  std::size_t flagged = 0;
  for (const auto& r : res.rollup) flagged += r.verdict_degraded;
  std::cout << "labelled " << res.labels.size() << " tests; " << flagged << " of " << res.rollup.size()
            << " commits degraded\n";
  return res.any_degraded ? kExitDegraded : 0;
}

int run_train_risk(const Args& a) {
  distinct_output(a.model, {a.rows, a.labels});
  rp::RiskOptions opt;
  opt.boost.n_estimators = a.estimators;
  opt.boost.max_depth = a.boost_depth;
  opt.boost.learning_rate = a.learning_rate;
  opt.boost.min_samples_leaf = a.min_leaf;
  opt.seed = a.seed;
  opt.train_fraction = a.train_fraction;
  opt.k_neighbors = a.k_neighbors;
  opt.threshold = a.threshold;
  opt.exec = a.serial ? ranalyzer::risk::Execution::serial : ranalyzer::risk::Execution::parallel;
  const auto run = rp::run_risk(rp::read_rows(a.rows), rp::read_labels(a.labels), opt);
  ranalyzer::text::write_file(a.model, run.model.serialize());
  if (!a.metrics.empty()) ranalyzer::text::write_file(a.metrics, rp::classifier_metrics_tsv(run));
  std::cout << "risk model " << run.model.fingerprint() << ": test n=" << run.n_test << ", synthetic "
            << run.n_synthetic << "\n";
  return 0;
}

int run_score(const Args& a) {
  distinct_output(a.out, {a.rows, a.model});
  if (!(a.threshold > 0.0 && a.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  const auto model = ranalyzer::risk::RiskModel::parse(ranalyzer::text::read_file(a.model));
  const auto scores = rp::score(rp::read_rows(a.rows), model);
  ranalyzer::text::write_file(a.out, rp::scores_tsv(scores, a.threshold));
  return 0;
}

int run_synth(const Args& a, bool seed_given) {
  auto spec = a.scenario.empty() ? ranalyzer::synthgen::ScenarioSpec{}
                                 : ranalyzer::synthgen::parse_scenario(ranalyzer::text::read_file(a.scenario));
  if (seed_given) spec.seed = a.seed;
  const auto corpus = ranalyzer::synthgen::generate(spec);
  ranalyzer::synthgen::write_corpus(corpus, a.out_dir);
  ranalyzer::text::write_file((fs::path(a.out_dir) / "scenario.json").string(),
                              ranalyzer::synthgen::scenario_to_json(spec));
  std::cout << "generated " << corpus.tests.size() << " tests for " << corpus.commits.size() << " commits\n";
  return 0;
}

int run_report(const Args& a) {
  const auto report = rp::build_report(a.dir);
  if (a.out.empty()) {
    std::cout << report;
  } else {
    ranalyzer::text::write_file(a.out, report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RANalyzer: attribute RAN performance changes to code changes"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  Args a;

  auto* ingest = app.add_subcommand("ingest", "Parse a test dataset into the test feature store");
  ingest->add_option("--dataset", a.dataset, "Dataset root (yyyymmdd/hhmmss layout)")->required();
  ingest->add_option("--out", a.out, "Output test store (JSON lines)")->required();
  ingest->add_option("--rules", a.rules, "Log parse-rule file");
  ingest->add_option("--commit-pattern", a.commit_pattern, "Regex with one group capturing the commit hash");
  ingest->add_option("--commit-map", a.commit_map, "TSV of test_id and commit hash, consulted before logs");
  ingest->add_flag("--serial", a.serial, "Disable parallel parsing");

  auto* categorize = app.add_subcommand("categorize", "Categorize commits and build commit features");
  categorize->add_option("--commits", a.commits, "Commit metadata (JSON lines)")->required();
  categorize->add_option("--out", a.out, "Output commit store (JSON lines)")->required();
  categorize->add_option("--keyword-rules", a.keyword_rules, "Keyword rule file");
  categorize->add_option("--refine", a.refine, "Refinement service: stub, none, or an http URL");
  categorize->add_option("--timeout-ms", a.timeout_ms, "Refinement request timeout")->check(CLI::PositiveNumber);
  categorize->add_option("--max-retries", a.max_retries, "Extra refinement attempts")->check(CLI::NonNegativeNumber);
  categorize->add_option("--max-concurrency", a.max_concurrency, "Concurrent refinement requests")
      ->check(CLI::PositiveNumber);

  auto* assemble = app.add_subcommand("assemble", "Join tests with commit features by commit hash");
  assemble->add_option("--tests", a.tests, "Test store")->required();
  assemble->add_option("--commit-store", a.commit_store, "Commit store")->required();
  assemble->add_option("--out", a.out, "Output rows (JSON lines)")->required();

  auto* decompose = app.add_subcommand("decompose", "Conditional variance decomposition");
  decompose->add_option("--rows", a.rows, "Analysis rows")->required();
  decompose->add_option("--out", a.out, "Output table")->required();
  decompose->add_option("--bins", a.bins, "Equal-frequency bins per continuous column")->check(CLI::Range(2, 100));

  auto* train_baseline = app.add_subcommand("train-baseline", "Train the environment baseline regressor");
  train_baseline->add_option("--rows", a.rows, "Analysis rows")->required();
  train_baseline->add_option("--model-out", a.model, "Output model file")->required();
  train_baseline->add_option("--metrics-out", a.metrics, "Holdout metrics table");
  train_baseline->add_option("--seed", a.seed, "Random seed")->required();
  train_baseline->add_option("--trees", a.trees, "Number of trees")->check(CLI::PositiveNumber);
  train_baseline->add_option("--depth", a.depth, "Maximum tree depth")->check(CLI::PositiveNumber);
  train_baseline->add_option("--train-fraction", a.train_fraction, "Chronological training share");
  train_baseline->add_flag("--serial", a.serial, "Train trees sequentially");

  auto* analyze = app.add_subcommand("analyze", "Residual labeling, layer table, rollup and temporal baseline");
  analyze->add_option("--rows", a.rows, "Analysis rows")->required();
  analyze->add_option("--out-dir", a.out_dir, "Directory for the analysis tables")->required();
  analyze->add_option("--model", a.model, "Baseline model; cross-fitting is used when absent");
  analyze->add_option("--seed", a.seed, "Random seed")->required();
  analyze->add_option("--tau-rho", a.tau_rho, "Residual threshold");
  analyze->add_option("--tau-exp", a.tau_exp, "Expected-efficiency threshold");
  analyze->add_option("--min-degraded", a.min_degraded, "Degraded tests needed to flag a commit")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--folds", a.folds, "Cross-fitting folds")->check(CLI::Range(2, 50));
  analyze->add_option("--trees", a.trees, "Number of trees")->check(CLI::PositiveNumber);
  analyze->add_option("--depth", a.depth, "Maximum tree depth")->check(CLI::PositiveNumber);
  analyze->add_option("--temporal-threshold", a.temporal_threshold, "Temporal baseline flag threshold");
  analyze->add_flag("--serial", a.serial, "Train trees sequentially");

  auto* train_risk = app.add_subcommand("train-risk", "Train the degradation-risk classifier");
  train_risk->add_option("--rows", a.rows, "Analysis rows")->required();
  train_risk->add_option("--labels", a.labels, "labels.tsv from analyze")->required();
  train_risk->add_option("--model-out", a.model, "Output model file")->required();
  train_risk->add_option("--metrics-out", a.metrics, "Classifier metrics table");
  train_risk->add_option("--seed", a.seed, "Random seed")->required();
  train_risk->add_option("--estimators", a.estimators, "Boosting rounds")->check(CLI::PositiveNumber);
  train_risk->add_option("--depth", a.boost_depth, "Maximum tree depth")->check(CLI::PositiveNumber);
  train_risk->add_option("--learning-rate", a.learning_rate, "Shrinkage");
  train_risk->add_option("--min-leaf", a.min_leaf, "Minimum samples per leaf")->check(CLI::PositiveNumber);
  train_risk->add_option("--k-neighbors", a.k_neighbors, "SMOTE neighbours")->check(CLI::PositiveNumber);
  train_risk->add_option("--threshold", a.threshold, "Decision threshold for metrics");
  train_risk->add_option("--train-fraction", a.train_fraction, "Chronological training share");
  train_risk->add_flag("--serial", a.serial, "Search splits sequentially");

  auto* score = app.add_subcommand("score", "Degradation probability per test");
  score->add_option("--rows", a.rows, "Analysis rows")->required();
  score->add_option("--model", a.model, "Risk model file")->required();
  score->add_option("--out", a.out, "Output table")->required();
  score->add_option("--threshold", a.threshold, "High-risk threshold");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("--scenario", a.scenario, "Scenario file (JSON); defaults when absent");
  synth->add_option("--out-dir", a.out_dir, "Output directory")->required();
  auto* synth_seed = synth->add_option("--seed", a.seed, "Override the scenario seed");

  auto* report = app.add_subcommand("report", "Summarize stage outputs");
  report->add_option("--dir", a.dir, "Directory holding stage outputs")->required();
  report->add_option("--out", a.out, "Output file; stdout when absent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    if (*ingest) return run_ingest(a);
    if (*categorize) return run_categorize(a);
    if (*assemble) return run_assemble(a);
    if (*decompose) return run_decompose(a);
    if (*train_baseline) return run_train_baseline(a);
    if (*analyze) return run_analyze(a);
    if (*train_risk) return run_train_risk(a);
    if (*score) return run_score(a);
    if (*synth) return run_synth(a, synth_seed->count() > 0);
    if (*report) return run_report(a);
  } catch (const ranalyzer::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ranalyzer::ErrorKind::config ? kExitConfig : kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
