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

// Test artifact ingestion: dataset layout scanning, traffic-generator CSV and
// gNB log parsing, and assembly of per-test records.
//
// Layout: <root>/<yyyymmdd>/<hhmmss>/{*.csv,*.log}. Directory names are naive
// local time; only their ordering matters downstream.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ranalyzer::ingest {

struct TestId {
  int year = 0;
  int month = 0;
  int day = 0;
  int seconds_of_day = 0;

  /// Parses a `yyyymmdd` / `hhmmss` directory pair; nullopt when either is not a valid date/time.
  static std::optional<TestId> parse(std::string_view day_dir, std::string_view time_dir);
  /// Parses the `yyyymmdd/hhmmss` form produced by str().
  static std::optional<TestId> parse(std::string_view joined);

  std::string str() const;
  /// Seconds since 1970-01-01 00:00:00, treating the name as a naive timestamp.
  std::int64_t epoch_seconds() const;

  auto operator<=>(const TestId&) const = default;
};

struct DatasetEntry {
  TestId id;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> csv_files;  // sorted by file name
  std::vector<std::filesystem::path> log_files;  // sorted by file name
};

struct ScanWarning {
  std::string path;
  std::string reason;
};

struct ScanResult {
  std::vector<DatasetEntry> entries;  // chronological
  std::vector<ScanWarning> warnings;
};

/// Throws DataError when `root` is missing or unreadable.
ScanResult scan_dataset(const std::filesystem::path& root);

// ---------------------------------------------------------------------------
// Parse rules

enum class RuleKind { mean, count };

struct ParseRule {
  std::string field;
  std::string pattern;
  std::string unit;
  RuleKind kind = RuleKind::mean;
  std::regex regex;
};

/// Rule file: one rule per line, `field_name, regex, unit, kind` where kind is
/// `mean` or `count`. The regex may itself contain commas; the first comma ends
/// the field name and the last two delimit unit and kind. `#` starts a comment
/// line. Mean rules need exactly one capture group. Throws ConfigError.
std::vector<ParseRule> parse_rules(std::string_view text);
std::vector<ParseRule> load_rules(const std::filesystem::path& file);
std::string_view default_rules_text();
const std::vector<ParseRule>& default_rules();

// ---------------------------------------------------------------------------
// Records

inline constexpr int kTestSchemaVersion = 1;

/// Event names every record carries, either as a count or as a missing field.
inline const std::vector<std::string>& required_events() {
  static const std::vector<std::string> names{"pdu_sessions_active", "msg2_failures", "rrc_setup",
                                              "rrc_release",         "scheduler_warnings",
                                              "error_lines"};
  return names;
}

struct TrafficKpi {
  double target_rate = 0.0;  // Mbps, from the artifact name
  std::optional<double> measured_throughput;  // Mbps, mean over intervals
  std::optional<double> packet_loss;          // fraction of total packets
  std::optional<double> jitter;               // ms, mean over intervals
  std::optional<double> total_bytes;
  std::optional<double> total_packets;
  std::optional<double> duration_s;
  std::optional<double> throughput_efficiency;  // measured / target
};

struct RadioKpm {
  std::optional<double> rsrp;
  std::optional<double> sinr;
  std::optional<double> dl_bler;
  std::optional<double> ul_bler;
  std::optional<double> harq_retx_round1;
  std::optional<double> harq_retx_total;
  std::optional<double> cqi_mean;
  /// Mean-kind rule fields outside the core set.
  std::map<std::string, double> extra;
};

using EventCounts = std::map<std::string, std::int64_t>;

struct LogParse {
  RadioKpm radio;
  EventCounts events;
  std::vector<std::string> missing;  // numeric rule fields with no (valid) match
};

struct TestRecord {
  TestId id;
  std::string commit_hash;
  TrafficKpi traffic;
  RadioKpm radio;
  EventCounts events;
  /// Extra fields declared by rules but absent from the artifacts.
  std::set<std::string> missing_extra;

  /// Every core field without a value, plus required events with no count.
  std::set<std::string> missing_fields() const;

  bool operator==(const TestRecord&) const;
};

/// Parses a traffic-generator CSV export with columns `interval_start,
/// interval_end, bytes, bits_per_second, jitter_ms, lost_packets,
/// total_packets`. Missing columns leave the dependent fields empty.
/// Throws DataError("empty measurement") when there are no data rows.
TrafficKpi parse_iperf_csv(const std::filesystem::path& file, double target_rate);
TrafficKpi parse_iperf_csv_text(std::string_view text, double target_rate);

/// Target rate encoded in a CSV file name, e.g. `iperf3_dl_30Mbps.csv` -> 30.
std::optional<double> target_rate_from_name(const std::filesystem::path& file);

/// Numeric fields are arithmetic means over matches; count fields are match counts.
/// Throws DataError("unreadable log") for binary content and ConfigError for an empty rule set.
LogParse parse_gnb_log(const std::filesystem::path& file, const std::vector<ParseRule>& rules);
LogParse parse_gnb_log_text(std::string_view text, const std::vector<ParseRule>& rules);

/// Default pattern for the revision identifier printed at gNB start-up.
inline constexpr std::string_view kDefaultCommitPattern =
    R"((?:commit hash|Commit hash|git commit)\s*[:=]\s*([0-9a-fA-F]{7,40}))";

std::optional<std::string> find_commit_hash(std::string_view log_text, const std::regex& pattern);

/// Throws DataError when neither artifact kind parses or the commit hash is unusable.
TestRecord build_test_record(const DatasetEntry& entry, const std::vector<ParseRule>& rules,
                             const std::string& commit_hash);

bool is_valid_commit_hash(std::string_view hash);

// ---------------------------------------------------------------------------
// Whole-dataset ingestion

struct IngestOptions {
  std::vector<ParseRule> rules = default_rules();
  std::string commit_pattern{kDefaultCommitPattern};
  /// test id (`yyyymmdd/hhmmss`) -> commit hash; consulted before the log.
  std::map<std::string, std::string> commit_map;
  bool parallel = true;
};

struct Rejected {
  std::string test_id;
  std::string reason;
};

struct IngestResult {
  std::vector<TestRecord> records;  // chronological
  std::vector<ScanWarning> warnings;
  std::vector<Rejected> rejected;
};

/// Parses every test directory. With `parallel` the per-directory work runs
/// under OpenMP; output is identical to the sequential path.
IngestResult ingest_dataset(const std::filesystem::path& root, const IngestOptions& options);

// ---------------------------------------------------------------------------
// Feature-store line format (one JSON object per line, sorted keys)

std::string to_store_line(const TestRecord& record);
/// Throws DataError on schema mismatch or malformed content.
TestRecord test_record_from_store_line(std::string_view line);

}  // namespace ranalyzer::ingest
