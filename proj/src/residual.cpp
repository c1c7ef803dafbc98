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

#include "ranalyzer/residual.hpp"

#include <algorithm>
#include <map>
#include <numbers>

#include "ranalyzer/error.hpp"

namespace ranalyzer::residual {

void Thresholds::validate() const {
  if (!(tau_rho > 0.0 && tau_rho <= 1.0)) throw ConfigError("tau_rho must lie in (0, 1]");
  if (!(tau_exp > 0.0 && tau_exp <= 1.0)) throw ConfigError("tau_exp must lie in (0, 1]");
}

std::string_view gating_name(Gating g) {
  switch (g) {
    case Gating::normal: return "normal";
    case Gating::environmental_limit: return "environmental_limit";
    case Gating::degraded: return "degraded";
  }
  return "?";
}

double residual(double eta_test, double eta_exp) {
  if (!(eta_exp > kEtaEpsilon)) throw DataError("undefined residual, expected efficiency ~0");
  return eta_test / eta_exp;
}

DegradationLabel label_one(const LabelInput& in, const Thresholds& th) {
  DegradationLabel l;
  l.test_id = in.test_id;
  l.commit = in.commit;
  l.eta_test = in.eta_test;
  l.eta_exp = in.eta_exp;
  l.rho = residual(in.eta_test, in.eta_exp);
  l.categories = in.categories;
  l.delta_t_hours = in.delta_t_hours;
  const bool under = l.rho < th.tau_rho;
  const bool favorable = l.eta_exp >= th.tau_exp;
  l.degraded = under && favorable;
  l.gating = l.degraded ? Gating::degraded : (under ? Gating::environmental_limit : Gating::normal);
  if (l.degraded)
    for (std::size_t i = 0; i < commitcat::kNumLayers; ++i) l.attributed_layers[i] = in.categories[i];
  return l;
}

std::vector<DegradationLabel> label(std::span<const LabelInput> rows, const Thresholds& th) {
  th.validate();
  std::vector<DegradationLabel> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(label_one(r, th));
  return out;
}

namespace {

GroupStats group_stats(const std::vector<double>& v) {
  GroupStats g;
  g.n = v.size();
  if (!v.empty()) g.mean = stats::mean(v);
  if (v.size() >= 2) g.sd = stats::sample_sd(v);
  return g;
}

}  // namespace

ResidualSummary residual_summary(std::span<const DegradationLabel> labels, const Thresholds& th) {
  if (labels.empty()) throw DataError("no labels to summarize");
  ResidualSummary s;
  std::vector<double> all, bad, good;
  std::size_t below = 0;
  for (const auto& l : labels) {
    all.push_back(l.rho);
    (l.degraded ? bad : good).push_back(l.rho);
    below += l.rho < th.tau_rho;
  }
  s.n = all.size();
  s.mean = stats::mean(all);
  s.median = stats::median(all);
  s.fraction_below = static_cast<double>(below) / static_cast<double>(all.size());
  s.degraded = group_stats(bad);
  s.normal = group_stats(good);
  if (bad.size() >= 2 && good.size() >= 2) {
    try {
      s.welch = stats::welch_t(bad, good);
      s.cohens_d = stats::cohens_d(bad, good);
      s.two_group = true;
    } catch (const DataError&) {
      s.two_group = false;
    }
  }
  return s;
}

std::vector<LayerImpactRow> layer_impact_table(std::span<const DegradationLabel> labels) {
  std::vector<LayerImpactRow> out;
  for (std::size_t i = 0; i < commitcat::kNumLayers; ++i) {
    std::vector<double> rhos;
    for (const auto& l : labels)
      if (l.degraded && l.attributed_layers[i]) rhos.push_back(l.rho);
    if (rhos.empty()) continue;
    LayerImpactRow row;
    row.layer = commitcat::category_at(i);
    row.degraded_cases = rhos.size();
    row.mean_rho = stats::mean(rhos);
    row.median_rho = stats::median(rhos);
    row.std_rho = rhos.size() >= 2 ? stats::sample_sd(rhos) : 0.0;
    out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LayerImpactRow& a, const LayerImpactRow& b) { return a.mean_rho < b.mean_rho; });
  return out;
}

std::vector<CommitRollup> commit_rollup(std::span<const DegradationLabel> labels, int min_degraded) {
  std::vector<CommitRollup> out;
  std::map<std::string, std::size_t> index;
  std::vector<double> sums;
  for (const auto& l : labels) {
    auto [it, fresh] = index.emplace(l.commit, out.size());
    if (fresh) {
      out.push_back({l.commit, 0, 0, l.rho, 0.0, false});
      sums.push_back(0.0);
    }
    auto& r = out[it->second];
    ++r.tests;
    r.degraded += l.degraded;
    r.min_rho = std::min(r.min_rho, l.rho);
    sums[it->second] += l.rho;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_rho = sums[i] / static_cast<double>(out[i].tests);
    out[i].verdict_degraded = static_cast<int>(out[i].degraded) >= min_degraded;
  }
  return out;
}

std::vector<double> TemporalParams::effective_lambdas() const {
  if (!lambdas.empty()) {
    if (lambdas.size() != windows_hours.size()) throw ConfigError("one decay rate per window required");
    return lambdas;
  }
  std::vector<double> out;
  for (double w : windows_hours) out.push_back(std::numbers::ln2 / (w / 2.0));
  return out;
}

std::vector<TemporalFlag> temporal_baseline_flags(std::span<const DegradationLabel> labels,
                                                  const TemporalParams& params) {
  const auto lambdas = params.effective_lambdas();
  for (double w : params.windows_hours)
    if (!(w > 0.0)) throw ConfigError("temporal windows must be positive");
  std::vector<TemporalFlag> out;
  std::map<std::string, std::size_t> index;
  for (const auto& l : labels) {
    if (!(l.delta_t_hours >= 0.0)) throw DataError("negative or unknown time since deployment for " + l.test_id);
    auto [it, fresh] = index.emplace(l.commit, out.size());
    if (fresh) out.push_back({l.commit, 0, 0.0, false});
    auto& f = out[it->second];
    if (!(l.rho < params.tau_rho)) continue;
    ++f.faults;
    for (std::size_t w = 0; w < params.windows_hours.size(); ++w)
      if (l.delta_t_hours <= params.windows_hours[w]) f.score += std::exp(-lambdas[w] * l.delta_t_hours);
  }
  for (auto& f : out) f.flagged = f.score >= params.threshold;
  return out;
}

std::vector<HistogramBin> residual_histogram(std::span<const DegradationLabel> labels, double lo, double hi,
                                             double width) {
  if (!(hi > lo) || !(width > 0.0)) throw ConfigError("bad histogram range");
  const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + static_cast<double>(b) * width;
    out[b].hi = std::min(hi, lo + static_cast<double>(b + 1) * width);
  }
  for (const auto& l : labels) {
    const double v = std::min(l.rho, kReportRhoCap);
    auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

}  // namespace ranalyzer::residual
