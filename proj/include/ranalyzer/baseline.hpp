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

// Environment baseline: a random-forest regressor from channel/load features
// to expected throughput efficiency, with metrics and cross-fitted predictions.

#include <concepts>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranalyzer/tree.hpp"

namespace ranalyzer::baseline {

enum class Execution { serial, parallel };

/// Dense row-major matrix with median imputation already applied.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  std::vector<double> values;
  std::map<std::string, double> imputation;  // column -> median used

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return columns.size(); }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  /// The listed rows, in order, keeping the imputation table.
  FeatureMatrix subset(std::span<const std::size_t> rows) const;
};

/// Builds a matrix from raw values (NaN = missing). Medians come from
/// `imputation` when given, otherwise from the data itself. Throws DataError
/// for a column with no finite value and ConfigError when a code-change
/// feature or the target is listed as a column.
FeatureMatrix make_feature_matrix(std::vector<std::string> row_ids, std::vector<std::string> columns,
                                  std::vector<double> raw, const std::map<std::string, double>* imputation = nullptr);

/// Default environment columns: radio KPMs, target rate and event rates.
const std::vector<std::string>& default_environment_columns();

struct ForestParams {
  int n_trees = 100;
  int max_depth = 8;
  /// Fraction of features tried per split; 0 selects sqrt(p)/p.
  double feature_fraction = 0.0;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  bool bootstrap = true;

  int features_per_split(std::size_t n_features) const;
};

inline constexpr int kModelSchemaVersion = 1;

struct BaselineModel {
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::map<std::string, double> imputation;
  std::size_t train_rows = 0;
  std::vector<Tree> trees;

  /// Mean over trees, clamped to >= 0. `x` is in model column order.
  double predict_row(std::span<const double> x) const;
  /// Named-column prediction; absent or non-finite values are imputed.
  /// Throws DataError for a missing column with no imputation entry.
  double predict(const std::map<std::string, double>& row) const;

  std::string serialize() const;
  static BaselineModel parse(std::string_view text);
  /// Hex FNV-1a of serialize().
  std::string fingerprint() const;
};

/// Throws DataError for fewer than 50 rows, a non-finite or constant target.
BaselineModel train_baseline(const FeatureMatrix& x, std::span<const double> y, const ForestParams& params,
                             std::uint64_t seed, Execution exec = Execution::parallel);

/// Grows one CART regression tree on the given (possibly repeated) row indices.
Tree grow_regression_tree(const FeatureMatrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                          const ForestParams& params, std::uint64_t seed);

struct RegressionMetrics {
  double r2 = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
};

template <class M>
concept RowPredictor = requires(const M& m, std::span<const double> x) {
  { m.predict_row(x) } -> std::convertible_to<double>;
};

/// Throws DataError for empty input.
RegressionMetrics regression_metrics(std::span<const double> y, std::span<const double> y_hat);

template <RowPredictor M>
RegressionMetrics evaluate(const M& model, const FeatureMatrix& x, std::span<const double> y) {
  std::vector<double> pred(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) pred[r] = model.predict_row(x.row(r));
  return regression_metrics(y, pred);
}

/// Chronological-block k-fold: each row's value comes from a model trained on
/// the other folds. Throws ConfigError for k < 2, DataError for a fold under 10 rows.
std::vector<double> cross_fit_predictions(const FeatureMatrix& x, std::span<const double> y, int k_folds,
                                          const ForestParams& params, std::uint64_t seed,
                                          Execution exec = Execution::parallel);

/// Chronological split point for the headline metrics (first `fraction` of rows train).
std::size_t chronological_split(std::size_t rows, double train_fraction = 0.8);

}  // namespace ranalyzer::baseline
