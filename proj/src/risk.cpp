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

#include "ranalyzer/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ranalyzer/error.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::risk {

std::size_t LabeledData::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void LabeledData::push_back(std::vector<double> row, int label, Provenance p) {
  if (row.size() != columns.size()) throw DataError("row width differs from column count");
  rows.push_back(std::move(row));
  labels.push_back(label);
  provenance.push_back(p);
}

// ---------------------------------------------------------------------------
// SMOTE

std::vector<double> interpolate(std::span<const double> x, std::span<const double> neighbor, double u,
                                const std::vector<bool>& binary) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    double v = x[j] + u * (neighbor[j] - x[j]);
    if (j < binary.size() && binary[j]) v = v > 0.5 ? 1.0 : 0.0;
    out[j] = v;
  }
  return out;
}

std::vector<SyntheticRow> smote_oversample(const std::vector<std::vector<double>>& minority,
                                           const std::vector<bool>& binary, int k_neighbors,
                                           std::size_t target_count, std::uint64_t seed) {
  if (k_neighbors < 1) throw ConfigError("SMOTE needs k_neighbors >= 1");
  const std::size_t m = minority.size();
  const auto k = static_cast<std::size_t>(k_neighbors);
  if (m <= k) throw DataError("insufficient minority samples");
  if (target_count <= m) return {};
  const std::size_t p = minority[0].size();
  for (const auto& r : minority)
    if (r.size() != p) throw DataError("ragged minority rows");

  std::vector<double> mu(p, 0.0), sd(p, 0.0);
  for (const auto& r : minority)
    for (std::size_t j = 0; j < p; ++j) mu[j] += r[j];
  for (auto& v : mu) v /= static_cast<double>(m);
  for (const auto& r : minority)
    for (std::size_t j = 0; j < p; ++j) sd[j] += (r[j] - mu[j]) * (r[j] - mu[j]);
  for (auto& v : sd) v = std::sqrt(v / static_cast<double>(m));

  // k nearest neighbours of every minority row; ties broken by index.
  std::vector<std::vector<std::size_t>> nn(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(m - 1);
    for (std::size_t o = 0; o < m; ++o) {
      if (o == i) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        if (sd[j] <= 0.0) continue;
        const double z = (minority[i][j] - minority[o][j]) / sd[j];
        s += z * z;
      }
      d.emplace_back(s, o);
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    for (std::size_t t = 0; t < k; ++t) nn[i].push_back(d[t].second);
  }

  Rng rng(seed);
  std::vector<SyntheticRow> out;
  out.reserve(target_count - m);
  for (std::size_t s = 0; s < target_count - m; ++s) {
    SyntheticRow row;
    row.source = s % m;
    row.neighbor = nn[row.source][rng.below(k)];
    row.u = rng.uniform();
    row.values = interpolate(minority[row.source], minority[row.neighbor], row.u, binary);
    out.push_back(std::move(row));
  }
  return out;
}

LabeledData oversample_to_balance(const LabeledData& train, int k_neighbors, std::uint64_t seed) {
  std::vector<std::vector<double>> minority;
  for (std::size_t i = 0; i < train.size(); ++i)
    if (train.labels[i] == 1) minority.push_back(train.rows[i]);
  const std::size_t majority = train.size() - minority.size();
  LabeledData out = train;
  if (minority.size() >= majority) return out;
  for (auto& s : smote_oversample(minority, train.binary, k_neighbors, majority, seed))
    out.push_back(std::move(s.values), 1, Provenance::synthetic);
  return out;
}

// ---------------------------------------------------------------------------
// Histogram binning

namespace {

/// Bin cuts per feature: x goes to the first bin b with x <= cuts[b]; the
/// last bin is unbounded.
std::vector<double> feature_cuts(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> cuts;
  if (values.size() <= 1) return cuts;
  const auto bins = static_cast<std::size_t>(std::max(2, max_bins));
  if (values.size() <= bins) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i) cuts.push_back(split_point(values[i], values[i + 1]));
    return cuts;
  }
  for (std::size_t b = 1; b < bins; ++b) {
    const std::size_t hi = b * values.size() / bins;
    const double c = split_point(values[hi - 1], values[hi]);
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  return cuts;
}

struct Binned {
  std::size_t n = 0, p = 0;
  std::vector<std::vector<double>> cuts;
  std::vector<std::uint16_t> bins;  // column-major: bins[f * n + i]

  std::uint16_t at(std::size_t i, std::size_t f) const { return bins[f * n + i]; }
  std::size_t n_bins(std::size_t f) const { return cuts[f].size() + 1; }
};

Binned bin_data(const LabeledData& d, int max_bins) {
  Binned b;
  b.n = d.size();
  b.p = d.columns.size();
  b.cuts.resize(b.p);
  b.bins.resize(b.n * b.p);
  std::vector<double> col(b.n);
  for (std::size_t f = 0; f < b.p; ++f) {
    for (std::size_t i = 0; i < b.n; ++i) col[i] = d.rows[i][f];
    b.cuts[f] = feature_cuts(col, max_bins);
    const auto& c = b.cuts[f];
    for (std::size_t i = 0; i < b.n; ++i)
      b.bins[f * b.n + i] = static_cast<std::uint16_t>(std::lower_bound(c.begin(), c.end(), col[i]) - c.begin());
  }
  return b;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;
};

struct BoostGrower {
  const Binned& data;
  const BoostParams& params;
  std::span<const double> grad;
  std::span<const double> hess;
  Execution exec;
  Tree tree;

  SplitCandidate best_on_feature(std::size_t f, const std::vector<std::size_t>& rows, double g_tot,
                                 double h_tot) const {
    const std::size_t nb = data.n_bins(f);
    SplitCandidate best;
    if (nb < 2) return best;
    std::vector<double> g(nb, 0.0), h(nb, 0.0);
    std::vector<std::size_t> c(nb, 0);
    for (auto r : rows) {
      const auto b = data.at(r, f);
      g[b] += grad[r];
      h[b] += hess[r];
      ++c[b];
    }
    const double parent = g_tot * g_tot / h_tot;
    double gl = 0.0, hl = 0.0;
    std::size_t cl = 0;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params.min_samples_leaf));
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      gl += g[b];
      hl += h[b];
      cl += c[b];
      if (c[b] == 0) continue;
      const std::size_t cr = rows.size() - cl;
      if (cl < min_leaf || cr < min_leaf) continue;
      const double gr = g_tot - gl, hr = h_tot - hl;
      if (hl < params.min_child_hessian || hr < params.min_child_hessian) continue;
      const double gain = gl * gl / hl + gr * gr / hr - parent;
      if (gain > best.gain) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.bin = static_cast<int>(b);
      }
    }
    return best;
  }

  int build(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double g_tot = 0.0, h_tot = 0.0;
    for (auto r : rows) {
      g_tot += grad[r];
      h_tot += hess[r];
    }
    tree.nodes[static_cast<std::size_t>(id)].value = -g_tot / std::max(h_tot, 1e-12) * params.learning_rate;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params.min_samples_leaf));
    if (depth >= params.max_depth || rows.size() < 2 * min_leaf || h_tot <= 0.0) return id;

    std::vector<SplitCandidate> per_feature(data.p);
    const auto p = static_cast<std::ptrdiff_t>(data.p);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t f = 0; f < p; ++f)
        per_feature[static_cast<std::size_t>(f)] = best_on_feature(static_cast<std::size_t>(f), rows, g_tot, h_tot);
    } else {
      for (std::ptrdiff_t f = 0; f < p; ++f)
        per_feature[static_cast<std::size_t>(f)] = best_on_feature(static_cast<std::size_t>(f), rows, g_tot, h_tot);
    }
    SplitCandidate best;
    best.gain = 1e-12;
    for (const auto& c : per_feature)
      if (c.feature >= 0 && c.gain > best.gain) best = c;
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    std::vector<std::size_t> lrows, rrows;
    for (auto r : rows) (data.at(r, f) <= best.bin ? lrows : rrows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(lrows, depth + 1);
    const int r = build(rrows, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = data.cuts[f][static_cast<std::size_t>(best.bin)];
    node.left = l;
    node.right = r;
    return id;
  }
};

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

RiskModel train_risk(const LabeledData& data, const BoostParams& params, std::uint64_t seed, Execution exec) {
  if (params.n_estimators < 1 || params.max_depth < 1 || params.learning_rate <= 0.0 || params.min_samples_leaf < 1 ||
      params.max_bins < 2 || params.max_bins > 65535)
    throw ConfigError("invalid boosting hyperparameters");
  if (data.rows.size() != data.labels.size()) throw DataError("label count differs from row count");
  if (data.columns.empty()) throw ConfigError("risk model needs at least one feature column");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != 0 && data.labels[i] != 1) throw DataError("labels must be 0 or 1");
    if (data.rows[i].size() != data.columns.size()) throw DataError("row width differs from column count");
    for (double v : data.rows[i])
      if (!std::isfinite(v)) throw DataError("non-finite feature value in risk training data");
  }
  const std::size_t n = data.size();
  const std::size_t n_pos = data.positives();
  if (n_pos == 0 || n_pos == n) throw DataError("risk training needs both classes");

  RiskModel model;
  model.params = params;
  model.seed = seed;
  model.columns = data.columns;
  model.imputation.resize(data.columns.size());
  for (std::size_t f = 0; f < data.columns.size(); ++f) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = data.rows[i][f];
    std::sort(col.begin(), col.end());
    model.imputation[f] = n % 2 ? col[n / 2] : (col[n / 2 - 1] + col[n / 2]) / 2.0;
  }
  if (params.balanced_class_weight) {
    model.class_weights[0] = static_cast<double>(n) / (2.0 * static_cast<double>(n - n_pos));
    model.class_weights[1] = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
  }
  const double w_pos = model.class_weights[1] * static_cast<double>(n_pos);
  const double w_neg = model.class_weights[0] * static_cast<double>(n - n_pos);
  model.base_margin = std::log(w_pos / w_neg);

  const Binned binned = bin_data(data, params.max_bins);
  std::vector<double> margin(n, model.base_margin), grad(n), hess(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  for (int round = 0; round < params.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = model.class_weights[static_cast<std::size_t>(data.labels[i])];
      const double prob = sigmoid(margin[i]);
      grad[i] = w * (prob - data.labels[i]);
      hess[i] = w * prob * (1.0 - prob);
    }
    BoostGrower g{binned, params, grad, hess, exec, {}};
    std::vector<std::size_t> rows = all;
    g.build(rows, 0);
    for (std::size_t i = 0; i < n; ++i) margin[i] += g.tree.predict(data.rows[i]);
    model.trees.push_back(std::move(g.tree));
  }
  return model;
}

double RiskModel::margin(std::span<const double> x) const {
  double z = base_margin;
  for (const auto& t : trees) z += t.predict(x);
  return z;
}

double RiskModel::predict_row(std::span<const double> x) const {
  if (x.size() != columns.size()) throw DataError("row width differs from model columns");
  return std::clamp(sigmoid(margin(x)), 0.0, 1.0);
}

double RiskModel::predict(const std::map<std::string, double>& row) const {
  std::vector<double> x(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto it = row.find(columns[c]);
    if (it == row.end()) throw DataError("row lacks model column: " + columns[c]);
    x[c] = std::isfinite(it->second) ? it->second : imputation.at(c);
  }
  return predict_row(x);
}

// ---------------------------------------------------------------------------
// Model file

std::string RiskModel::serialize() const {
  std::string out;
  out += "ranalyzer-boost " + std::to_string(kRiskSchemaVersion) + "\n";
  out += "n_estimators " + std::to_string(params.n_estimators) + "\n";
  out += "max_depth " + std::to_string(params.max_depth) + "\n";
  out += "learning_rate " + text::format_double(params.learning_rate) + "\n";
  out += "min_samples_leaf " + std::to_string(params.min_samples_leaf) + "\n";
  out += "min_child_hessian " + text::format_double(params.min_child_hessian) + "\n";
  out += "max_bins " + std::to_string(params.max_bins) + "\n";
  out += "balanced_class_weight " + std::to_string(params.balanced_class_weight ? 1 : 0) + "\n";
  out += "seed " + std::to_string(seed) + "\n";
  out += "class_weight_0 " + text::format_double(class_weights[0]) + "\n";
  out += "class_weight_1 " + text::format_double(class_weights[1]) + "\n";
  out += "base_margin " + text::format_double(base_margin) + "\n";
  out += "columns " + std::to_string(columns.size()) + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    out += "column " + columns[c] + " " + text::format_double(imputation[c]) + "\n";
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out += "tree " + std::to_string(t) + " " + std::to_string(trees[t].nodes.size()) + "\n";
    trees[t].write(out);
  }
  return out;
}

namespace {

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

RiskModel RiskModel::parse(std::string_view content) {
  const auto lines = text::split(content, '\n');
  std::size_t pos = 0;
  if (static_cast<int>(expect_number(lines, pos, "ranalyzer-boost")) != kRiskSchemaVersion)
    throw DataError("unsupported boosting model version");
  RiskModel m;
  m.params.n_estimators = static_cast<int>(expect_number(lines, pos, "n_estimators"));
  m.params.max_depth = static_cast<int>(expect_number(lines, pos, "max_depth"));
  m.params.learning_rate = expect_number(lines, pos, "learning_rate");
  m.params.min_samples_leaf = static_cast<int>(expect_number(lines, pos, "min_samples_leaf"));
  m.params.min_child_hessian = expect_number(lines, pos, "min_child_hessian");
  m.params.max_bins = static_cast<int>(expect_number(lines, pos, "max_bins"));
  m.params.balanced_class_weight = expect_number(lines, pos, "balanced_class_weight") != 0.0;
  m.seed = std::stoull(expect(lines, pos, "seed"));
  m.class_weights[0] = expect_number(lines, pos, "class_weight_0");
  m.class_weights[1] = expect_number(lines, pos, "class_weight_1");
  m.base_margin = expect_number(lines, pos, "base_margin");
  const auto ncols = static_cast<std::size_t>(expect_number(lines, pos, "columns"));
  for (std::size_t c = 0; c < ncols; ++c, ++pos) {
    if (pos >= lines.size()) throw DataError("model file truncated in columns");
    const auto parts = text::split(text::trim(lines[pos]), ' ');
    const auto v = parts.size() == 3 ? text::parse_double(parts[2]) : std::nullopt;
    if (parts.size() != 3 || parts[0] != "column" || !v) throw DataError("bad column line: " + lines[pos]);
    m.columns.push_back(parts[1]);
    m.imputation.push_back(*v);
  }
  for (int t = 0; t < m.params.n_estimators; ++t) {
    if (pos >= lines.size()) throw DataError("model file truncated before tree");
    const auto parts = text::split(text::trim(lines[pos]), ' ');
    if (parts.size() != 3 || parts[0] != "tree") throw DataError("expected tree header: " + lines[pos]);
    ++pos;
    m.trees.push_back(Tree::read(lines, pos, std::stoul(parts[2]), ncols));
  }
  return m;
}

std::string RiskModel::fingerprint() const { return text::hex64(text::fnv1a(serialize())); }

// ---------------------------------------------------------------------------
// Metrics

namespace {

ClassMetrics class_metrics(std::size_t tp, std::size_t fn, std::size_t fp) {
  ClassMetrics m;
  m.support = tp + fn;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision && m.recall) {
    const double s = *m.precision + *m.recall;
    m.f1 = s > 0.0 ? 2.0 * *m.precision * *m.recall / s : 0.0;
  }
  return m;
}

}  // namespace

ClassifierMetrics metrics_from_confusion(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn) {
  ClassifierMetrics m;
  m.tp = tp;
  m.fn = fn;
  m.fp = fp;
  m.tn = tn;
  m.degraded = class_metrics(tp, fn, fp);
  m.normal = class_metrics(tn, fp, fn);
  return m;
}

ClassifierMetrics evaluate_classifier(const RiskModel& model, const LabeledData& test, double threshold) {
  if (test.size() == 0) throw DataError("empty test set");
  if (std::any_of(test.provenance.begin(), test.provenance.end(),
                  [](Provenance p) { return p == Provenance::synthetic; }))
    throw DataError("synthetic rows are barred from evaluation");
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool predicted = model.predict_row(test.rows[i]) >= threshold;
    if (test.labels[i] == 1)
      (predicted ? tp : fn)++;
    else
      (predicted ? fp : tn)++;
  }
  return metrics_from_confusion(tp, fn, fp, tn);
}

std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("score count differs from label count");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over ties.
  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = r;
    i = j + 1;
  }
  double pos = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) {
      pos += 1.0;
      sum += rank[i];
    }
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0) return std::nullopt;
  return (sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

}  // namespace ranalyzer::risk
