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

// Degradation-risk classifier: SMOTE minority oversampling, a histogram-based
// gradient-boosted tree classifier with logistic loss and balanced class
// weights, and imbalance-aware metrics.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranalyzer/tree.hpp"

namespace ranalyzer::risk {

enum class Execution { serial, parallel };
enum class Provenance { observed, synthetic };

/// Labelled rows; label 1 = degraded (minority).
struct LabeledData {
  std::vector<std::string> columns;
  std::vector<bool> binary;  // per column: 0/1-valued slot
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<Provenance> provenance;

  std::size_t size() const { return rows.size(); }
  std::size_t positives() const;
  void push_back(std::vector<double> row, int label, Provenance p = Provenance::observed);
};

// ---------------------------------------------------------------------------
// SMOTE

struct SyntheticRow {
  std::vector<double> values;
  std::size_t source = 0;    // index into the minority rows
  std::size_t neighbor = 0;  // index into the minority rows
  double u = 0.0;
};

/// x + u * (neighbor - x); binary slots rounded to nearest, ties to 0.
std::vector<double> interpolate(std::span<const double> x, std::span<const double> neighbor, double u,
                                const std::vector<bool>& binary);

/// Grows the minority set to `target_count` rows (no-op when already there).
/// Neighbours are the k nearest other minority rows by Euclidean distance on
/// features standardized over the minority set. Sources cycle through the
/// minority rows; neighbour choice and u are drawn from `seed`.
/// Throws DataError("insufficient minority samples") when minority <= k.
std::vector<SyntheticRow> smote_oversample(const std::vector<std::vector<double>>& minority,
                                           const std::vector<bool>& binary, int k_neighbors,
                                           std::size_t target_count, std::uint64_t seed);

/// Appends synthetic positives (flagged Provenance::synthetic) until the
/// classes are balanced 1:1.
LabeledData oversample_to_balance(const LabeledData& train, int k_neighbors, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Boosting

struct BoostParams {
  int n_estimators = 400;
  int max_depth = 4;
  double learning_rate = 0.1;
  int min_samples_leaf = 5;
  double min_child_hessian = 1e-3;
  int max_bins = 255;
  bool balanced_class_weight = true;
};

inline constexpr int kRiskSchemaVersion = 1;

struct RiskModel {
  BoostParams params;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  /// Fill values for non-finite inputs, one per column (training medians).
  std::vector<double> imputation;
  std::array<double, 2> class_weights{1.0, 1.0};
  double base_margin = 0.0;
  std::vector<Tree> trees;  // leaf values already scaled by the learning rate

  double margin(std::span<const double> x) const;
  /// Degradation probability in [0, 1]; x in model column order.
  double predict_row(std::span<const double> x) const;
  /// Named-column prediction; non-finite values take the imputation entry.
  /// Throws DataError for a missing column.
  double predict(const std::map<std::string, double>& row) const;

  std::string serialize() const;
  static RiskModel parse(std::string_view text);
  std::string fingerprint() const;
};

/// Throws DataError when only one class is present. Imputation defaults to
/// per-column medians of `data`.
RiskModel train_risk(const LabeledData& data, const BoostParams& params, std::uint64_t seed,
                     Execution exec = Execution::parallel);

// ---------------------------------------------------------------------------
// Metrics

struct ClassMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::size_t support = 0;
};

struct ClassifierMetrics {
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;  // positive = degraded
  ClassMetrics degraded;
  ClassMetrics normal;
  std::size_t total() const { return tp + fn + fp + tn; }
};

ClassifierMetrics metrics_from_confusion(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn);

/// Throws DataError when the test set carries synthetic rows or is empty.
ClassifierMetrics evaluate_classifier(const RiskModel& model, const LabeledData& test, double threshold = 0.5);

/// Rank-based ROC AUC; nullopt when a class is missing.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace ranalyzer::risk
