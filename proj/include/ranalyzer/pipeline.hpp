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

#pragma once

// Pipeline stages behind the command-line tool: feature-store files, the
// test/commit join, and the decomposition, baseline, residual and risk runs
// with their report tables.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ranalyzer/baseline.hpp"
#include "ranalyzer/commitcat.hpp"
#include "ranalyzer/ingest.hpp"
#include "ranalyzer/refine.hpp"
#include "ranalyzer/residual.hpp"
#include "ranalyzer/risk.hpp"
#include "ranalyzer/stats.hpp"

namespace ranalyzer::pipeline {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Feature store

/// JSON-lines file helpers. Blank lines are skipped on read.
std::vector<std::string> read_lines(const fs::path& file);
void write_lines(const fs::path& file, const std::vector<std::string>& lines);

std::vector<ingest::TestRecord> read_test_store(const fs::path& file);
void write_test_store(const fs::path& file, const std::vector<ingest::TestRecord>& records);

/// One line of the commit metadata file: hash, message, files_changed,
/// lines_added, lines_deleted and an optional deployed_at (`yyyymmdd/hhmmss`).
struct CommitMeta {
  commitcat::CommitText text;
  std::string deployed_at;
};
std::vector<CommitMeta> read_commit_metadata(const fs::path& file);

inline constexpr int kCommitSchemaVersion = 1;

struct CommitRecord {
  commitcat::CommitFeatures features;
  commitcat::CategorizationResult result;
  std::string deployed_at;
  bool operator==(const CommitRecord&) const = default;
};
std::string commit_record_line(const CommitRecord& record);
CommitRecord commit_record_from_line(std::string_view line);
std::vector<CommitRecord> read_commit_store(const fs::path& file);
void write_commit_store(const fs::path& file, const std::vector<CommitRecord>& records);

inline constexpr int kRowSchemaVersion = 1;

/// Flat analysis row: one test joined with its commit's features. Missing
/// values are NaN in memory and null on disk.
struct Row {
  std::string id;
  std::string commit;
  std::map<std::string, double> values;

  double get(const std::string& key) const;
  bool operator==(const Row& other) const;
};
std::string row_line(const Row& row);
Row row_from_line(std::string_view line);
std::vector<Row> read_rows(const fs::path& file);
void write_rows(const fs::path& file, const std::vector<Row>& rows);

// ---------------------------------------------------------------------------
// Stages

struct CategorizeOptions {
  commitcat::RuleSet rules = commitcat::default_keyword_rules();
  /// "" disables refinement, "stub" uses the offline stub, anything else is a URL.
  std::string refine = "stub";
  refine::RefineOptions refine_options;
  std::chrono::milliseconds timeout{5000};
};
std::vector<CommitRecord> categorize(const std::vector<CommitMeta>& commits, const CategorizeOptions& options);

struct AssembleResult {
  std::vector<Row> rows;
  std::vector<std::string> warnings;  // tests without a categorized commit
};
/// Joins by commit hash; rows keep the test order.
AssembleResult assemble(const std::vector<ingest::TestRecord>& tests, const std::vector<CommitRecord>& commits);

struct DecomposeOptions {
  std::vector<std::string> targets{"throughput_efficiency", "packet_loss", "jitter"};
  /// Bundle name -> columns. Every bundle is scored against the rest.
  std::map<std::string, std::vector<std::string>> bundles;
  int n_bins = 5;
};
DecomposeOptions default_decompose_options();
/// One report per (target, bundle); targets or bundles that cannot be scored
/// are listed in `skipped` with the reason.
std::vector<stats::VarianceReport> decompose(const std::vector<Row>& rows, const DecomposeOptions& options,
                                             std::vector<std::string>* skipped = nullptr);
std::string decomposition_tsv(const std::vector<stats::VarianceReport>& reports);

/// Environment matrix over `rows` with median imputation (or the given fill values).
baseline::FeatureMatrix environment_matrix(const std::vector<Row>& rows, const std::vector<std::string>& columns,
                                           const std::map<std::string, double>* imputation = nullptr);
std::vector<double> column_values(const std::vector<Row>& rows, const std::string& column);

struct BaselineOptions {
  std::vector<std::string> columns = baseline::default_environment_columns();
  baseline::ForestParams forest;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  baseline::Execution exec = baseline::Execution::parallel;
};
struct BaselineRun {
  baseline::BaselineModel model;
  baseline::RegressionMetrics holdout;       // efficiency units
  baseline::RegressionMetrics holdout_mbps;  // efficiency x target rate
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};
/// Chronological split; rows without a finite efficiency are skipped.
BaselineRun run_baseline(const std::vector<Row>& rows, const BaselineOptions& options);
std::string baseline_metrics_tsv(const BaselineRun& run);

struct AnalyzeOptions {
  std::vector<std::string> columns = baseline::default_environment_columns();
  baseline::ForestParams forest;
  std::uint64_t seed = 0;
  int folds = 5;
  residual::Thresholds thresholds;
  int min_degraded = 2;
  residual::TemporalParams temporal;
  /// When set, expected efficiency comes from this model instead of cross-fitting.
  std::optional<baseline::BaselineModel> model;
  baseline::Execution exec = baseline::Execution::parallel;
};
struct AnalyzeResult {
  std::vector<residual::DegradationLabel> labels;
  residual::ResidualSummary summary;
  std::vector<residual::LayerImpactRow> layers;
  std::vector<residual::CommitRollup> rollup;
  std::vector<residual::TemporalFlag> temporal;
  std::vector<residual::HistogramBin> histogram;
  std::size_t skipped_rows = 0;  // no finite efficiency
  bool any_degraded = false;
};
AnalyzeResult analyze(const std::vector<Row>& rows, const AnalyzeOptions& options);
/// labels.tsv, residual_summary.tsv, layer_impact.tsv, commit_rollup.tsv,
/// temporal_baseline.tsv, residual_hist.tsv.
void write_analysis(const fs::path& dir, const AnalyzeResult& result, const residual::Thresholds& thresholds);
/// test id -> degraded flag, from labels.tsv.
std::map<std::string, bool> read_labels(const fs::path& file);

/// Environment columns followed by the commit feature slots.
std::vector<std::string> risk_columns(const std::vector<std::string>& environment);

struct RiskOptions {
  std::vector<std::string> environment = baseline::default_environment_columns();
  risk::BoostParams boost;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  int k_neighbors = 5;
  double threshold = 0.5;
  risk::Execution exec = risk::Execution::parallel;
};
struct RiskRun {
  risk::RiskModel model;
  risk::ClassifierMetrics metrics;
  std::optional<double> auc;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_synthetic = 0;
};
/// Rows without a label are skipped. Chronological split; SMOTE on the
/// training part only.
RiskRun run_risk(const std::vector<Row>& rows, const std::map<std::string, bool>& labels, const RiskOptions& options);
std::string classifier_metrics_tsv(const RiskRun& run);

struct Score {
  std::string id;
  std::string commit;
  double probability = 0.0;
};
std::vector<Score> score(const std::vector<Row>& rows, const risk::RiskModel& model);
std::string scores_tsv(const std::vector<Score>& scores, double threshold);

/// Human-readable summary of whatever stage outputs exist in `dir`.
std::string build_report(const fs::path& dir);

}  // namespace ranalyzer::pipeline
