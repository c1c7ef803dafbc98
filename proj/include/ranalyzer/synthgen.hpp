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

// Synthetic corpus generator with a known environment law and injected
// code-induced regressions. Output follows the ingest directory layout plus
// commit metadata and two ground-truth tables.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ranalyzer/commitcat.hpp"

namespace ranalyzer::synthgen {

struct Injection {
  std::size_t commit = 0;
  std::vector<std::string> layers;  // overrides the commit's planted layers
  double drop = 0.3;                // efficiency multiplied by (1 - drop)
  int onset_delay = 0;              // tests of the commit before the drop applies
};

/// Degrades every commit touching `layer` on tests whose load is >= min_load.
struct PlantRule {
  std::string layer;
  double min_load = 0.0;
  double drop = 0.3;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t n_commits = 40;
  std::size_t tests_per_commit = 10;
  std::string start_date = "20240101";

  double rsrp_min = -105.0;
  double rsrp_max = -70.0;
  double sinr_max = 30.0;   // SINR spans [0, sinr_max] across the RSRP range
  double sinr_sd = 2.0;
  double sigmoid_a = 0.0;   // 0 selects the defaults below
  double sigmoid_b = 0.0;
  double eff_at_min_sinr = 0.3;
  double eff_at_max_sinr = 0.99;
  double bler_scale = 0.3;  // BLER = bler_scale * exp(-SINR / bler_decay)
  double bler_decay = 8.0;
  std::vector<double> loads{10, 30, 50, 80, 100, 120};
  double link_capacity = 90.0;
  double noise_sd = 0.03;

  std::size_t intervals = 10;  // traffic report rows per test
  std::size_t reports = 10;    // radio stat blocks per log

  std::vector<Injection> injections;
  std::vector<PlantRule> plant_rules;

  /// Logistic parameters in effect (derived from the efficiency anchors when unset).
  std::pair<double, double> logistic() const;
  /// Throws ConfigError for an invalid scenario.
  void validate() const;
};

/// JSON scenario file; absent keys keep their defaults. Throws ConfigError.
ScenarioSpec parse_scenario(std::string_view json_text);
std::string scenario_to_json(const ScenarioSpec& spec);

/// Expected efficiency under the environment law, before noise and injections.
double environment_efficiency(const ScenarioSpec& spec, double sinr, double load);

struct TestTruth {
  std::string test_id;  // yyyymmdd/hhmmss
  std::size_t commit_index = 0;
  std::string commit;
  std::size_t test_index = 0;  // position within the commit
  double delta_t_hours = 0.0;
  double load = 0.0;
  double sinr_true = 0.0;
  double expected_efficiency = 0.0;  // environment law
  double multiplier = 1.0;           // product of applied drops
  double measured_efficiency = 0.0;  // recomputed from the emitted CSV
  bool degraded = false;
  // Means of the values printed in the emitted artifacts.
  std::map<std::string, double> kpm;
  std::map<std::string, std::int64_t> events;
  double total_bytes = 0.0;
  double total_packets = 0.0;
  double lost_packets = 0.0;
};

struct CommitTruth {
  std::size_t index = 0;
  std::string hash;
  std::string message;
  std::string deployed_at;  // yyyymmdd/hhmmss
  commitcat::CategoryMask categories;
  std::int64_t files_changed = 0, lines_added = 0, lines_deleted = 0;
  bool injected = false;  // targeted by an explicit injection or a plant rule
};

struct Corpus {
  /// Relative path -> file content, sorted by path.
  std::map<std::string, std::string> files;
  std::vector<TestTruth> tests;
  std::vector<CommitTruth> commits;
};

/// Pure in `spec`. Throws ConfigError for an invalid scenario (e.g. an
/// injection index out of range).
Corpus generate(const ScenarioSpec& spec);

/// Writes every corpus file below `out_dir`; the dataset lives in `dataset/`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& out_dir);

/// Commit message whose keyword categorization is exactly `planted`.
std::string synthesize_message(const commitcat::CategoryMask& planted, std::uint64_t seed,
                               const commitcat::RuleSet& rules = commitcat::default_keyword_rules());

std::string truth_tests_csv(const std::vector<TestTruth>& tests);
std::string truth_commits_csv(const std::vector<CommitTruth>& commits);

}  // namespace ranalyzer::synthgen
