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

#include "ranalyzer/commitcat.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "ranalyzer/error.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::commitcat {

namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames{
    "PHY", "MAC", "RLC", "PDCP", "RRC", "NAS", "NGAP", "F1AP", "E1AP",
    "memory", "threading", "radio", "scheduler", "timer", "queue"};
constexpr std::array<std::string_view, kNumChangeTypes> kChangeTypeNames{"bugfix", "optimization", "feature",
                                                                         "refactoring"};
constexpr std::array<std::string_view, 3> kConfidenceNames{"high", "medium", "low"};

}  // namespace

std::string_view category_name(Category c) { return kCategoryNames[index_of(c)]; }

std::optional<Category> category_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumCategories; ++i)
    if (text::lower(kCategoryNames[i]) == text::lower(name)) return category_at(i);
  return std::nullopt;
}

std::size_t layer_count(const CategoryMask& m) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < kNumLayers; ++i) n += m[i];
  return n;
}

std::size_t component_count(const CategoryMask& m) { return m.count() - layer_count(m); }

std::vector<std::string> category_names(const CategoryMask& m, bool layers, bool components) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    if (!m[i]) continue;
    if (i < kNumLayers ? layers : components) out.emplace_back(kCategoryNames[i]);
  }
  return out;
}

std::string_view change_type_name(ChangeType t) { return kChangeTypeNames[static_cast<std::size_t>(t)]; }

std::optional<ChangeType> change_type_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumChangeTypes; ++i)
    if (kChangeTypeNames[i] == text::lower(name)) return static_cast<ChangeType>(i);
  return std::nullopt;
}

std::string_view confidence_name(Confidence c) { return kConfidenceNames[static_cast<std::size_t>(c)]; }

std::optional<Confidence> confidence_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kConfidenceNames.size(); ++i)
    if (kConfidenceNames[i] == name) return static_cast<Confidence>(i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule file

std::string_view default_keyword_rules_text() {
  // Layer keywords are chosen so that a keyword of one category is never a
  // substring of a keyword of another (e.g. no bare "ARQ" next to "HARQ").
  return R"(# Default keyword rules, layout version 1.
# kw <category> <strong|medium|weak> <keyword>

kw PHY strong NR_PHY
kw PHY strong LDPC
kw PHY strong PUSCH
kw PHY strong PDSCH
kw PHY strong PRACH
kw PHY strong Aerial
kw PHY medium L1
kw PHY medium OFDM
kw PHY medium precoding
kw PHY medium beamforming
kw PHY medium channel estimation
kw PHY medium nFAPI
kw PHY weak "NR_"
kw PHY weak "NR "
kw PHY weak tx
kw PHY weak rx

kw MAC strong NR_MAC
kw MAC strong MSG3
kw MAC strong MSG2
kw MAC strong HARQ
kw MAC strong LogicalChannelConfig
kw MAC medium MAC
kw MAC medium DCI
kw MAC medium BSR
kw MAC medium random access
kw MAC medium scheduling request
kw MAC weak scheduler

kw RLC strong RLC
kw RLC medium segmentation
kw RLC medium reassembly
kw RLC medium status PDU
kw RLC weak retransmission buffer

kw PDCP strong PDCP
kw PDCP strong SDAP
kw PDCP medium ciphering
kw PDCP medium integrity protection
kw PDCP medium ROHC
kw PDCP weak reordering

kw RRC strong RRC
kw RRC medium SIB1
kw RRC medium measurement report
kw RRC medium cellGroupConfig
kw RRC medium handover
kw RRC weak ASN.1

kw NAS strong NAS
kw NAS strong 5GMM
kw NAS strong 5GSM
kw NAS medium registration
kw NAS medium authentication
kw NAS medium SUCI
kw NAS medium GUTI

kw NGAP strong NGAP
kw NGAP strong NG setup
kw NGAP medium AMF
kw NGAP medium N2 interface

kw F1AP strong F1AP
kw F1AP strong F1 setup
kw F1AP medium CU-DU
kw F1AP medium F1-U
kw F1AP medium F1 interface

kw E1AP strong E1AP
kw E1AP strong E1 setup
kw E1AP medium CU-UP
kw E1AP medium CU-CP
kw E1AP medium bearer context

kw memory strong memory leak
kw memory medium memory
kw memory medium malloc
kw memory medium memcpy
kw memory medium pointer
kw memory weak buffer
kw memory weak allocation

kw threading strong mutex
kw threading strong pthread
kw threading strong race condition
kw threading medium thread
kw threading medium deadlock
kw threading medium atomic

kw radio strong USRP
kw radio medium radio
kw radio medium antenna
kw radio medium fronthaul

kw scheduler medium scheduler
kw scheduler medium scheduling
kw scheduler medium round robin
kw scheduler medium proportional fair
kw scheduler weak preprocessor

kw timer strong T310
kw timer strong T300
kw timer medium timer
kw timer medium timeout
kw timer weak clock

kw queue strong FIFO
kw queue medium queue
kw queue medium ring buffer
kw queue weak backlog

# The memory component is the one reached by a single weak match ("buffer").
theta memory 0.5

type bugfix fix
type bugfix bug
type bugfix crash
type bugfix regression
type bugfix wrong
type optimization optimi
type optimization speed
type optimization faster
type optimization performance
type optimization latency
type feature add
type feature support
type feature implement
type feature introduce
type feature enable
type refactoring rework
type refactoring cleanup
type refactoring clean up
type refactoring refactor
type refactoring rename
type refactoring remove

confidence high_min_strong 1
confidence high_min_evidence 2
confidence high_max_layers 2
confidence high_max_components 2
confidence medium_min_evidence 1

complexity churn 0.4
complexity scope 0.3
complexity files 0.3
complexity churn_cap 1000
complexity files_cap 50
)";
}

namespace {

/// Splits `rest` into the first word and the remainder; quoted remainders keep inner spaces.
std::pair<std::string, std::string> head_tail(std::string_view rest) {
  rest = text::trim(rest);
  const auto sp = rest.find_first_of(" \t");
  if (sp == std::string_view::npos) return {std::string(rest), {}};
  return {std::string(rest.substr(0, sp)), std::string(text::trim(rest.substr(sp + 1)))};
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double number(const std::string& s, const std::string& where) {
  const auto v = text::parse_double(s);
  if (!v || !std::isfinite(*v)) throw ConfigError(where + "expected a number, got '" + s + "'");
  return *v;
}

}  // namespace

RuleSet parse_keyword_rules(std::string_view content) {
  RuleSet rules;
  int line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "keyword rule line " + std::to_string(line_no) + ": ";
    auto [directive, rest] = head_tail(line);
    if (directive == "kw") {
      auto [cat, rest2] = head_tail(rest);
      auto [strength, keyword] = head_tail(rest2);
      const auto c = category_from_name(cat);
      if (!c) throw ConfigError(where + "unknown category " + cat);
      Strength s;
      if (strength == "strong") {
        s = Strength::strong;
      } else if (strength == "medium") {
        s = Strength::medium;
      } else if (strength == "weak") {
        s = Strength::weak;
      } else {
        throw ConfigError(where + "strength must be strong, medium or weak");
      }
      keyword = unquote(keyword);
      if (keyword.empty()) throw ConfigError(where + "empty keyword");
      rules.keywords.push_back({*c, text::lower(keyword), s});
    } else if (directive == "theta") {
      auto [cat, value] = head_tail(rest);
      const auto c = category_from_name(cat);
      if (!c) throw ConfigError(where + "unknown category " + cat);
      const double v = number(value, where);
      if (!(v > 0.0)) throw ConfigError(where + "theta must be positive");
      rules.thresholds[index_of(*c)] = v;
    } else if (directive == "type") {
      auto [type, keyword] = head_tail(rest);
      const auto t = change_type_from_name(type);
      if (!t) throw ConfigError(where + "unknown change type " + type);
      keyword = unquote(keyword);
      if (keyword.empty()) throw ConfigError(where + "empty keyword");
      rules.type_keywords.emplace_back(*t, text::lower(keyword));
    } else if (directive == "confidence") {
      auto [key, value] = head_tail(rest);
      const double v = number(value, where);
      if (v < 0.0) throw ConfigError(where + "confidence thresholds must be non-negative");
      auto& t = rules.confidence;
      if (key == "high_min_strong") t.high_min_strong = v;
      else if (key == "high_min_evidence") t.high_min_evidence = v;
      else if (key == "high_max_layers") t.high_max_layers = v;
      else if (key == "high_max_components") t.high_max_components = v;
      else if (key == "medium_min_evidence") t.medium_min_evidence = v;
      else throw ConfigError(where + "unknown confidence key " + key);
    } else if (directive == "complexity") {
      auto [key, value] = head_tail(rest);
      const double v = number(value, where);
      auto& w = rules.complexity;
      if (key == "churn") w.churn = v;
      else if (key == "scope") w.scope = v;
      else if (key == "files") w.files = v;
      else if (key == "churn_cap" && v > 0) w.churn_cap = v;
      else if (key == "files_cap" && v > 0) w.files_cap = v;
      else throw ConfigError(where + "bad complexity entry " + key);
    } else {
      throw ConfigError(where + "unknown directive " + directive);
    }
  }
  if (rules.keywords.empty()) throw ConfigError("keyword rule set has no keywords");
  return rules;
}

RuleSet load_keyword_rules(const std::string& path) {
  std::string content;
  try {
    content = text::read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_keyword_rules(content);
}

const RuleSet& default_keyword_rules() {
  static const RuleSet rules = parse_keyword_rules(default_keyword_rules_text());
  return rules;
}

// ---------------------------------------------------------------------------
// Keyword stage

namespace {

/// Distinct matched (category, keyword) rules; duplicates in the rule list count once.
std::vector<const KeywordRule*> matched_rules(const std::string& lowered, const RuleSet& rules,
                                              std::optional<Category> only = std::nullopt) {
  std::vector<const KeywordRule*> out;
  std::set<std::pair<Category, std::string_view>> seen;
  for (const auto& r : rules.keywords) {
    if (only && r.category != *only) continue;
    if (lowered.find(r.keyword) == std::string::npos) continue;
    if (seen.emplace(r.category, r.keyword).second) out.push_back(&r);
  }
  return out;
}

}  // namespace

double keyword_score(std::string_view message, const RuleSet& rules, Category category) {
  double score = 0.0;
  for (const auto* r : matched_rules(text::lower(message), rules, category)) score += weight(r->strength);
  return score;
}

Confidence confidence_rule(double layers, double components, double evidence, double strong,
                           const ConfidenceTable& t) {
  if (strong >= t.high_min_strong && evidence >= t.high_min_evidence && layers <= t.high_max_layers &&
      components <= t.high_max_components)
    return Confidence::high;
  if (evidence >= t.medium_min_evidence) return Confidence::medium;
  return Confidence::low;
}

ChangeType detect_change_type(std::string_view message, const RuleSet& rules) {
  const std::string lowered = text::lower(message);
  std::array<int, kNumChangeTypes> counts{};
  std::set<std::pair<ChangeType, std::string_view>> seen;
  for (const auto& [type, kw] : rules.type_keywords) {
    if (lowered.find(kw) != std::string::npos && seen.emplace(type, kw).second)
      ++counts[static_cast<std::size_t>(type)];
  }
  // Enum order doubles as tie-break priority: bugfix > optimization > feature > refactoring.
  std::size_t best = static_cast<std::size_t>(ChangeType::refactoring);
  int best_count = 0;
  for (std::size_t i = 0; i < kNumChangeTypes; ++i) {
    if (counts[i] > best_count) {
      best = i;
      best_count = counts[i];
    }
  }
  return static_cast<ChangeType>(best);
}

CategorizationResult categorize_keywords(const CommitText& commit, const RuleSet& rules) {
  CategorizationResult r;
  const std::string lowered = text::lower(commit.message);
  for (const auto* m : matched_rules(lowered, rules)) {
    const double w = weight(m->strength);
    r.scores[index_of(m->category)] += w;
    r.evidence += w;
    if (m->strength == Strength::strong) ++r.strong_matches;
    r.matched_keywords.push_back(std::string(category_name(m->category)) + ":" + m->keyword);
  }
  for (std::size_t i = 0; i < kNumCategories; ++i)
    if (r.scores[i] > 0.0 && r.scores[i] >= rules.thresholds[i]) r.affected.set(i);
  r.layers = static_cast<int>(layer_count(r.affected));
  r.components = static_cast<int>(component_count(r.affected));
  r.confidence = confidence_rule(r.layers, r.components, r.evidence, r.strong_matches, rules.confidence);
  r.change_type = detect_change_type(commit.message, rules);
  return r;
}

// ---------------------------------------------------------------------------
// Feature vector

namespace {

constexpr std::size_t kTypeSlot = kNumCategories;              // 15..18
constexpr std::size_t kLayersSlot = kTypeSlot + kNumChangeTypes;  // 19
constexpr std::size_t kComponentsSlot = 20;
constexpr std::size_t kFilesSlot = 21;
constexpr std::size_t kAddedSlot = 22;
constexpr std::size_t kDeletedSlot = 23;
constexpr std::size_t kChurnSlot = 24;
constexpr std::size_t kComplexitySlot = 25;
constexpr std::size_t kConfidenceSlot = 26;  // 26..28
constexpr std::size_t kRefinedSlot = 29;
constexpr std::size_t kEvidenceSlot = 30;
constexpr std::size_t kStrongSlot = 31;
constexpr std::size_t kLengthSlot = 32;
constexpr std::size_t kMergeRefSlot = 33;
static_assert(kMergeRefSlot + 1 == kFeatureCount);

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
  static const auto names = [] {
    std::array<std::string, kFeatureCount> n;
    for (std::size_t i = 0; i < kNumCategories; ++i) n[i] = "cat_" + std::string(kCategoryNames[i]);
    for (std::size_t i = 0; i < kNumChangeTypes; ++i) n[kTypeSlot + i] = "type_" + std::string(kChangeTypeNames[i]);
    n[kLayersSlot] = "n_layers";
    n[kComponentsSlot] = "n_components";
    n[kFilesSlot] = "files_changed";
    n[kAddedSlot] = "lines_added";
    n[kDeletedSlot] = "lines_deleted";
    n[kChurnSlot] = "total_churn";
    n[kComplexitySlot] = "complexity_score";
    for (std::size_t i = 0; i < 3; ++i) n[kConfidenceSlot + i] = "conf_" + std::string(kConfidenceNames[i]);
    n[kRefinedSlot] = "refined_by_llm";
    n[kEvidenceSlot] = "keyword_evidence";
    n[kStrongSlot] = "strong_matches";
    n[kLengthSlot] = "message_length";
    n[kMergeRefSlot] = "merge_ref_count";
    return n;
  }();
  return names;
}

const std::array<bool, kFeatureCount>& binary_slots() {
  static const auto mask = [] {
    std::array<bool, kFeatureCount> m{};
    for (std::size_t i = 0; i < kLayersSlot; ++i) m[i] = true;
    for (std::size_t i = 0; i < 3; ++i) m[kConfidenceSlot + i] = true;
    m[kRefinedSlot] = true;
    return m;
  }();
  return mask;
}

double complexity_score(double churn, double layers, double components, double files,
                        const ComplexityWeights& w) {
  return w.churn * std::min(1.0, churn / w.churn_cap) +
         w.scope * (layers + components) / static_cast<double>(kNumCategories) +
         w.files * std::min(1.0, files / w.files_cap);
}

std::int64_t merge_ref_count(std::string_view message) {
  static const std::regex re(R"(![0-9]+)");
  const std::string s(message);
  return std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator());
}

CommitFeatures encode(const std::string& hash, const FeatureView& v) {
  CommitFeatures f;
  f.hash = hash;
  auto& x = f.values;
  for (std::size_t i = 0; i < kNumCategories; ++i) x[i] = v.affected[i] ? 1.0 : 0.0;
  x[kTypeSlot + static_cast<std::size_t>(v.change_type)] = 1.0;
  x[kLayersSlot] = v.layers;
  x[kComponentsSlot] = v.components;
  x[kFilesSlot] = v.files_changed;
  x[kAddedSlot] = v.lines_added;
  x[kDeletedSlot] = v.lines_deleted;
  x[kChurnSlot] = v.total_churn;
  x[kComplexitySlot] = v.complexity;
  x[kConfidenceSlot + static_cast<std::size_t>(v.confidence)] = 1.0;
  x[kRefinedSlot] = v.refined_by_llm ? 1.0 : 0.0;
  x[kEvidenceSlot] = v.evidence;
  x[kStrongSlot] = v.strong_matches;
  x[kLengthSlot] = v.message_length;
  x[kMergeRefSlot] = v.merge_refs;
  return f;
}

FeatureView decode(const CommitFeatures& f) {
  const auto& x = f.values;
  const auto& bin = binary_slots();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(x[i])) throw DataError("non-finite commit feature " + feature_names()[i]);
    if (bin[i] && x[i] != 0.0 && x[i] != 1.0) throw DataError("non-binary value in slot " + feature_names()[i]);
  }
  auto one_hot = [&](std::size_t first, std::size_t n, const char* group) {
    std::size_t hot = n;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += x[first + i];
      if (x[first + i] == 1.0) hot = i;
    }
    if (sum != 1.0) throw DataError(std::string("one-hot group does not sum to 1: ") + group);
    return hot;
  };
  FeatureView v;
  for (std::size_t i = 0; i < kNumCategories; ++i) v.affected[i] = x[i] == 1.0;
  v.change_type = static_cast<ChangeType>(one_hot(kTypeSlot, kNumChangeTypes, "change type"));
  v.layers = x[kLayersSlot];
  v.components = x[kComponentsSlot];
  v.files_changed = x[kFilesSlot];
  v.lines_added = x[kAddedSlot];
  v.lines_deleted = x[kDeletedSlot];
  v.total_churn = x[kChurnSlot];
  v.complexity = x[kComplexitySlot];
  v.confidence = static_cast<Confidence>(one_hot(kConfidenceSlot, 3, "confidence"));
  v.refined_by_llm = x[kRefinedSlot] == 1.0;
  v.evidence = x[kEvidenceSlot];
  v.strong_matches = x[kStrongSlot];
  v.message_length = x[kLengthSlot];
  v.merge_refs = x[kMergeRefSlot];
  return v;
}

CommitFeatures build_feature_vector(const CategorizationResult& r, const CommitText& c,
                                    const ComplexityWeights& w) {
  FeatureView v;
  v.affected = r.affected;
  v.change_type = r.change_type;
  v.layers = static_cast<double>(layer_count(r.affected));
  v.components = static_cast<double>(component_count(r.affected));
  v.files_changed = static_cast<double>(c.files_changed);
  v.lines_added = static_cast<double>(c.lines_added);
  v.lines_deleted = static_cast<double>(c.lines_deleted);
  v.total_churn = v.lines_added + v.lines_deleted;
  v.complexity = complexity_score(v.total_churn, v.layers, v.components, v.files_changed, w);
  v.confidence = r.confidence;
  v.refined_by_llm = r.refined_by_llm;
  v.evidence = r.evidence;
  v.strong_matches = r.strong_matches;
  v.message_length = static_cast<double>(c.message.size());
  v.merge_refs = static_cast<double>(merge_ref_count(c.message));
  return encode(c.hash, v);
}

}  // namespace ranalyzer::commitcat
