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

// Commit categorization: weighted keyword evidence per protocol layer and
// functional component, a rule-based confidence label, change-type detection
// and the fixed 34-slot commit feature vector.

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ranalyzer::commitcat {

/// Fixed order: the nine protocol layers followed by the six functional components.
enum class Category : std::uint8_t {
  PHY, MAC, RLC, PDCP, RRC, NAS, NGAP, F1AP, E1AP,
  memory, threading, radio, scheduler, timer, queue,
};

inline constexpr std::size_t kNumLayers = 9;
inline constexpr std::size_t kNumComponents = 6;
inline constexpr std::size_t kNumCategories = kNumLayers + kNumComponents;

using CategoryMask = std::bitset<kNumCategories>;

std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);
constexpr bool is_layer(Category c) { return static_cast<std::size_t>(c) < kNumLayers; }
constexpr Category category_at(std::size_t i) { return static_cast<Category>(i); }
constexpr std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }

std::size_t layer_count(const CategoryMask& m);
std::size_t component_count(const CategoryMask& m);
/// Names of the set members in category order.
std::vector<std::string> category_names(const CategoryMask& m, bool layers = true, bool components = true);

enum class Strength { strong, medium, weak };
constexpr double weight(Strength s) {
  switch (s) {
    case Strength::strong: return 2.0;
    case Strength::medium: return 1.0;
    case Strength::weak: return 0.5;
  }
  return 0.0;
}

enum class ChangeType { bugfix, optimization, feature, refactoring };
inline constexpr std::size_t kNumChangeTypes = 4;
std::string_view change_type_name(ChangeType t);
std::optional<ChangeType> change_type_from_name(std::string_view name);

enum class Confidence { high, medium, low };
std::string_view confidence_name(Confidence c);
std::optional<Confidence> confidence_from_name(std::string_view name);

struct KeywordRule {
  Category category;
  std::string keyword;  // lower-cased on load
  Strength strength;
};

/// Thresholds of the confidence decision table.
struct ConfidenceTable {
  double high_min_strong = 1;
  double high_min_evidence = 2.0;
  double high_max_layers = 2;
  double high_max_components = 2;
  double medium_min_evidence = 1.0;
};

struct ComplexityWeights {
  double churn = 0.4;
  double scope = 0.3;
  double files = 0.3;
  double churn_cap = 1000.0;
  double files_cap = 50.0;
};

struct RuleSet {
  std::vector<KeywordRule> keywords;
  std::array<double, kNumCategories> thresholds;
  std::vector<std::pair<ChangeType, std::string>> type_keywords;
  ConfidenceTable confidence;
  ComplexityWeights complexity;

  RuleSet() { thresholds.fill(1.0); }
};

/// Rule file grammar, one directive per line (`#` comments):
///   kw <category> <strong|medium|weak> <keyword>     keyword may be "quoted"
///   theta <category> <value>
///   type <bugfix|optimization|feature|refactoring> <keyword>
///   confidence <high_min_strong|high_min_evidence|high_max_layers|high_max_components|medium_min_evidence> <value>
///   complexity <churn|scope|files|churn_cap|files_cap> <value>
/// Throws ConfigError.
RuleSet parse_keyword_rules(std::string_view text);
RuleSet load_keyword_rules(const std::string& path);
std::string_view default_keyword_rules_text();
const RuleSet& default_keyword_rules();

struct CommitText {
  std::string hash;
  std::string message;  // title + description + merge-request references
  std::int64_t files_changed = 0;
  std::int64_t lines_added = 0;
  std::int64_t lines_deleted = 0;
};

struct CategorizationResult {
  CategoryMask affected;
  std::array<double, kNumCategories> scores{};
  int layers = 0;             // L
  int components = 0;         // C
  double evidence = 0.0;      // K, sum of all matched weights
  int strong_matches = 0;     // S
  Confidence confidence = Confidence::low;
  bool refined_by_llm = false;
  /// Refinement was wanted but the service was unreachable.
  bool degraded_mode = false;
  ChangeType change_type = ChangeType::refactoring;
  std::string rationale;
  std::vector<std::string> matched_keywords;

  bool operator==(const CategorizationResult&) const = default;
};

/// Weighted evidence for one category; each distinct keyword counts once.
double keyword_score(std::string_view message, const RuleSet& rules, Category category);

Confidence confidence_rule(double layers, double components, double evidence, double strong,
                           const ConfidenceTable& table = {});

ChangeType detect_change_type(std::string_view message, const RuleSet& rules);

/// Keyword stage only; pure in (message, rules).
CategorizationResult categorize_keywords(const CommitText& commit, const RuleSet& rules);

// ---------------------------------------------------------------------------
// Feature vector

inline constexpr std::size_t kFeatureCount = 34;
inline constexpr int kFeatureLayoutVersion = 1;

/// Slot layout: 15 category indicators, 4 change-type one-hot, L, C,
/// files_changed, lines_added, lines_deleted, total_churn, complexity_score,
/// 3 confidence one-hot, refined_by_llm, K, S, message_length, merge_ref_count.
const std::array<std::string, kFeatureCount>& feature_names();
/// True for 0/1-valued slots (indicators, one-hots, refined flag).
const std::array<bool, kFeatureCount>& binary_slots();

struct CommitFeatures {
  std::string hash;
  std::array<double, kFeatureCount> values{};
  bool operator==(const CommitFeatures&) const = default;
};

/// Structured view of a feature vector.
struct FeatureView {
  CategoryMask affected;
  ChangeType change_type = ChangeType::refactoring;
  double layers = 0, components = 0;
  double files_changed = 0, lines_added = 0, lines_deleted = 0, total_churn = 0;
  double complexity = 0;
  Confidence confidence = Confidence::low;
  bool refined_by_llm = false;
  double evidence = 0, strong_matches = 0;
  double message_length = 0, merge_refs = 0;
};

double complexity_score(double churn, double layers, double components, double files,
                        const ComplexityWeights& w = {});
std::int64_t merge_ref_count(std::string_view message);

CommitFeatures build_feature_vector(const CategorizationResult& result, const CommitText& commit,
                                    const ComplexityWeights& weights = {});
/// Throws DataError when one-hot groups or binary slots are malformed.
FeatureView decode(const CommitFeatures& features);
CommitFeatures encode(const std::string& hash, const FeatureView& view);

}  // namespace ranalyzer::commitcat
