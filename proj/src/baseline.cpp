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

#include "ranalyzer/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ranalyzer/commitcat.hpp"
#include "ranalyzer/error.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/stats.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::baseline {

const std::vector<std::string>& default_environment_columns() {
  static const std::vector<std::string> cols{"rsrp",     "sinr",        "dl_bler",          "ul_bler",
                                             "harq_retx_round1", "harq_retx_total", "cqi_mean", "target_rate",
                                             "rate_msg2_failures", "rate_pdu_sessions_active"};
  return cols;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> rows_in) const {
  FeatureMatrix m;
  m.columns = columns;
  m.imputation = imputation;
  m.row_ids.reserve(rows_in.size());
  m.values.reserve(rows_in.size() * cols());
  for (std::size_t r : rows_in) {
    m.row_ids.push_back(row_ids[r]);
    const auto src = row(r);
    m.values.insert(m.values.end(), src.begin(), src.end());
  }
  return m;
}

FeatureMatrix make_feature_matrix(std::vector<std::string> row_ids, std::vector<std::string> columns,
                                  std::vector<double> raw, const std::map<std::string, double>* imputation) {
  const std::size_t n = row_ids.size(), p = columns.size();
  if (raw.size() != n * p) throw DataError("feature matrix size mismatch");
  const auto& code = commitcat::feature_names();
  for (const auto& c : columns) {
    if (c == "throughput_efficiency" || c == "measured_throughput" ||
        std::find(code.begin(), code.end(), c) != code.end())
      throw ConfigError("column not allowed in the environment model: " + c);
  }
  FeatureMatrix m;
  m.row_ids = std::move(row_ids);
  m.columns = std::move(columns);
  m.values = std::move(raw);
  for (std::size_t c = 0; c < p; ++c) {
    double fill;
    if (imputation) {
      const auto it = imputation->find(m.columns[c]);
      if (it == imputation->end()) throw DataError("no imputation value for column " + m.columns[c]);
      fill = it->second;
    } else {
      std::vector<double> finite;
      for (std::size_t r = 0; r < n; ++r)
        if (std::isfinite(m.values[r * p + c])) finite.push_back(m.values[r * p + c]);
      if (finite.empty()) throw DataError("column has no finite values: " + m.columns[c]);
      fill = stats::median(std::move(finite));
    }
    m.imputation[m.columns[c]] = fill;
    for (std::size_t r = 0; r < n; ++r)
      if (!std::isfinite(m.values[r * p + c])) m.values[r * p + c] = fill;
  }
  return m;
}

int ForestParams::features_per_split(std::size_t n_features) const {
  const double p = static_cast<double>(n_features);
  const double frac = feature_fraction > 0.0 ? feature_fraction : std::sqrt(p) / p;
  return std::clamp(static_cast<int>(std::lround(frac * p)), 1, static_cast<int>(n_features));
}

// ---------------------------------------------------------------------------
// Tree growth

namespace {

struct Grower {
  const FeatureMatrix& x;
  std::span<const double> y;
  const ForestParams& params;
  Rng rng;
  Tree tree;
  std::vector<std::size_t> features;

  int build(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0.0;
    for (auto r : rows) sum += y[r];
    const double n = static_cast<double>(rows.size());
    tree.nodes[static_cast<std::size_t>(id)].value = sum / n;

    if (depth >= params.max_depth || static_cast<int>(rows.size()) < params.min_samples_split) return id;

    // Feature subsample: partial Fisher-Yates over the full feature list.
    const int mtry = params.features_per_split(features.size());
    for (int k = 0; k < mtry; ++k) {
      const auto j = static_cast<std::size_t>(k) + rng.below(features.size() - static_cast<std::size_t>(k));
      std::swap(features[static_cast<std::size_t>(k)], features[j]);
    }

    const double parent = sum * sum / n;
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(rows);
    for (int k = 0; k < mtry; ++k) {
      const std::size_t f = features[static_cast<std::size_t>(k)];
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x.at(a, f), vb = x.at(b, f);
        return va < vb || (va == vb && a < b);
      });
      double left = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left += y[order[i]];
        const double lo = x.at(order[i], f), hi = x.at(order[i + 1], f);
        if (lo == hi) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
        const double right = sum - left;
        const double gain = left * left / nl + right * right / nr - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = split_point(lo, hi);
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> lrows, rrows;
    for (auto r : rows) (x.at(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? lrows : rrows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(lrows, depth + 1);
    const int r = build(rrows, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

Tree grow_regression_tree(const FeatureMatrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                          const ForestParams& params, std::uint64_t seed) {
  Grower g{x, y, params, Rng(seed), {}, {}};
  g.features.resize(x.cols());
  std::iota(g.features.begin(), g.features.end(), std::size_t{0});
  g.build(rows, 0);
  return std::move(g.tree);
}

BaselineModel train_baseline(const FeatureMatrix& x, std::span<const double> y, const ForestParams& params,
                             std::uint64_t seed, Execution exec) {
  if (x.rows() != y.size()) throw DataError("target length differs from feature rows");
  if (x.rows() < 50) throw DataError("baseline training needs at least 50 rows");
  if (x.cols() == 0) throw ConfigError("baseline needs at least one feature column");
  if (params.n_trees < 1 || params.max_depth < 0) throw ConfigError("invalid forest hyperparameters");
  for (double v : y)
    if (!std::isfinite(v)) throw DataError("non-finite target value");
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) throw DataError("degenerate target");

  BaselineModel model;
  model.params = params;
  model.seed = seed;
  model.columns = x.columns;
  model.imputation = x.imputation;
  model.train_rows = x.rows();
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  const std::size_t n = x.rows();
  auto one = [&](std::ptrdiff_t t) {
    const std::uint64_t tree_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      Rng rng(derive_seed(tree_seed, 0xb007));
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees[static_cast<std::size_t>(t)] = grow_regression_tree(x, y, std::move(rows), params, tree_seed);
  };
  const auto trees = static_cast<std::ptrdiff_t>(params.n_trees);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < trees; ++t) one(t);
  } else {
    for (std::ptrdiff_t t = 0; t < trees; ++t) one(t);
  }
  return model;
}

double BaselineModel::predict_row(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return std::max(0.0, s / static_cast<double>(trees.size()));
}

double BaselineModel::predict(const std::map<std::string, double>& row) const {
  std::vector<double> x(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto it = row.find(columns[c]);
    if (it != row.end() && std::isfinite(it->second)) {
      x[c] = it->second;
      continue;
    }
    const auto imp = imputation.find(columns[c]);
    if (imp == imputation.end()) throw DataError("missing column with no imputation entry: " + columns[c]);
    x[c] = imp->second;
  }
  return predict_row(x);
}

// ---------------------------------------------------------------------------
// Persistence

std::string BaselineModel::serialize() const {
  std::string out;
  out += "ranalyzer-forest " + std::to_string(kModelSchemaVersion) + "\n";
  out += "n_trees " + std::to_string(params.n_trees) + "\n";
  out += "max_depth " + std::to_string(params.max_depth) + "\n";
  out += "feature_fraction " + text::format_double(params.feature_fraction) + "\n";
  out += "min_samples_split " + std::to_string(params.min_samples_split) + "\n";
  out += "min_samples_leaf " + std::to_string(params.min_samples_leaf) + "\n";
  out += "bootstrap " + std::to_string(params.bootstrap ? 1 : 0) + "\n";
  out += "seed " + std::to_string(seed) + "\n";
  out += "train_rows " + std::to_string(train_rows) + "\n";
  out += "columns " + std::to_string(columns.size()) + "\n";
  for (const auto& c : columns) out += "column " + c + " " + text::format_double(imputation.at(c)) + "\n";
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out += "tree " + std::to_string(t) + " " + std::to_string(trees[t].nodes.size()) + "\n";
    trees[t].write(out);
  }
  return out;
}

namespace {

/// Header line reader shared by the `key value` sections of model files.
std::string expect(const std::vector<std::string>& lines, std::size_t& pos, std::string_view key) {
  if (pos >= lines.size()) throw DataError("model file truncated before " + std::string(key));
  const auto parts = text::split(text::trim(lines[pos]), ' ');
  if (parts.size() < 2 || parts[0] != key) throw DataError("model file: expected " + std::string(key));
  ++pos;
  return parts[1];
}

double expect_number(const std::vector<std::string>& lines, std::size_t& pos, std::string_view key) {
  const auto v = text::parse_double(expect(lines, pos, key));
  if (!v) throw DataError("model file: bad number for " + std::string(key));
  return *v;
}

}  // namespace

BaselineModel BaselineModel::parse(std::string_view content) {
  const auto lines = text::split(content, '\n');
  std::size_t pos = 0;
  if (static_cast<int>(expect_number(lines, pos, "ranalyzer-forest")) != kModelSchemaVersion)
    throw DataError("unsupported forest model version");
  BaselineModel m;
  m.params.n_trees = static_cast<int>(expect_number(lines, pos, "n_trees"));
  m.params.max_depth = static_cast<int>(expect_number(lines, pos, "max_depth"));
  m.params.feature_fraction = expect_number(lines, pos, "feature_fraction");
  m.params.min_samples_split = static_cast<int>(expect_number(lines, pos, "min_samples_split"));
  m.params.min_samples_leaf = static_cast<int>(expect_number(lines, pos, "min_samples_leaf"));
  m.params.bootstrap = expect_number(lines, pos, "bootstrap") != 0.0;
  m.seed = std::stoull(expect(lines, pos, "seed"));
  m.train_rows = static_cast<std::size_t>(expect_number(lines, pos, "train_rows"));
  const auto ncols = static_cast<std::size_t>(expect_number(lines, pos, "columns"));
  for (std::size_t c = 0; c < ncols; ++c, ++pos) {
    if (pos >= lines.size()) throw DataError("model file truncated in columns");
    const auto parts = text::split(text::trim(lines[pos]), ' ');
    const auto v = parts.size() == 3 ? text::parse_double(parts[2]) : std::nullopt;
    if (parts.size() != 3 || parts[0] != "column" || !v) throw DataError("bad column line: " + lines[pos]);
    m.columns.push_back(parts[1]);
    m.imputation[parts[1]] = *v;
  }
  for (int t = 0; t < m.params.n_trees; ++t) {
    if (pos >= lines.size()) throw DataError("model file truncated before tree");
    const auto parts = text::split(text::trim(lines[pos]), ' ');
    if (parts.size() != 3 || parts[0] != "tree") throw DataError("expected tree header: " + lines[pos]);
    ++pos;
    m.trees.push_back(Tree::read(lines, pos, std::stoul(parts[2]), ncols));
  }
  return m;
}

std::string BaselineModel::fingerprint() const { return text::hex64(text::fnv1a(serialize())); }

// ---------------------------------------------------------------------------
// Metrics and cross-fitting

RegressionMetrics regression_metrics(std::span<const double> y, std::span<const double> y_hat) {
  if (y.empty()) throw DataError("empty test set");
  if (y.size() != y_hat.size()) throw DataError("prediction length differs from target");
  const double n = static_cast<double>(y.size());
  const double m = stats::mean(y);
  double ss_res = 0.0, ss_tot = 0.0, abs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - y_hat[i];
    ss_res += e * e;
    ss_tot += (y[i] - m) * (y[i] - m);
    abs += std::fabs(e);
  }
  RegressionMetrics r;
  r.n = y.size();
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::nan("");
  r.mae = abs / n;
  r.rmse = std::sqrt(ss_res / n);
  return r;
}

std::size_t chronological_split(std::size_t rows, double train_fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(rows) * train_fraction));
}

std::vector<double> cross_fit_predictions(const FeatureMatrix& x, std::span<const double> y, int k_folds,
                                          const ForestParams& params, std::uint64_t seed, Execution exec) {
  if (k_folds < 2) throw ConfigError("cross-fitting needs at least 2 folds");
  const std::size_t n = x.rows();
  const auto k = static_cast<std::size_t>(k_folds);
  std::vector<double> out(n, 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
    if (hi - lo < 10) throw DataError("cross-fit fold with fewer than 10 rows");
  }
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
    std::vector<std::size_t> train, test;
    for (std::size_t r = 0; r < n; ++r) (r >= lo && r < hi ? test : train).push_back(r);
    const FeatureMatrix xtr = x.subset(train);
    std::vector<double> ytr;
    for (auto r : train) ytr.push_back(y[r]);
    const BaselineModel m = train_baseline(xtr, ytr, params, derive_seed(seed, 1000 + f), exec);
    for (auto r : test) out[r] = m.predict_row(x.row(r));
  }
  return out;
}

}  // namespace ranalyzer::baseline
