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

// Residual analysis: rho = eta_test / eta_exp, two-threshold degradation
// gating, layer attribution, residual statistics, per-commit rollup and the
// temporal-correlation comparison detector.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranalyzer/commitcat.hpp"
#include "ranalyzer/stats.hpp"

namespace ranalyzer::residual {

inline constexpr double kEtaEpsilon = 1e-6;
/// Display cap for rho in reports; labeling always uses the raw value.
inline constexpr double kReportRhoCap = 10.0;

struct Thresholds {
  double tau_rho = 0.9;
  double tau_exp = 0.60;
  /// Throws ConfigError unless both lie in (0, 1].
  void validate() const;
};

enum class Gating { normal, environmental_limit, degraded };
std::string_view gating_name(Gating g);

/// Throws DataError("undefined residual, expected efficiency ~0") when eta_exp <= 1e-6.
double residual(double eta_test, double eta_exp);

struct LabelInput {
  std::string test_id;
  std::string commit;
  double eta_test = 0.0;
  double eta_exp = 0.0;
  commitcat::CategoryMask categories;
  /// Hours since the commit was deployed; NaN when unknown.
  double delta_t_hours = std::numeric_limits<double>::quiet_NaN();
};

struct DegradationLabel {
  std::string test_id;
  std::string commit;
  double rho = 0.0;
  double eta_exp = 0.0;
  double eta_test = 0.0;
  bool degraded = false;
  Gating gating = Gating::normal;
  commitcat::CategoryMask attributed_layers;  // layers only; empty unless degraded
  commitcat::CategoryMask categories;         // everything the commit touches
  double delta_t_hours = std::numeric_limits<double>::quiet_NaN();
};

DegradationLabel label_one(const LabelInput& in, const Thresholds& th);
std::vector<DegradationLabel> label(std::span<const LabelInput> rows, const Thresholds& th);

struct GroupStats {
  std::size_t n = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
};

struct ResidualSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double fraction_below = 0.0;  // rho < tau_rho, all labels
  GroupStats degraded;
  GroupStats normal;            // every non-degraded label
  bool two_group = false;       // false when either group has < 2 labels or zero variance
  stats::TTest welch;
  double cohens_d = std::numeric_limits<double>::quiet_NaN();
};

/// Throws DataError for an empty label list.
ResidualSummary residual_summary(std::span<const DegradationLabel> labels, const Thresholds& th);

struct LayerImpactRow {
  commitcat::Category layer;
  std::size_t degraded_cases = 0;
  double mean_rho = 0.0;
  double median_rho = 0.0;
  double std_rho = 0.0;  // sample SD; 0 for a single case
};

/// One row per layer with at least one degraded test, ascending by mean rho.
std::vector<LayerImpactRow> layer_impact_table(std::span<const DegradationLabel> labels);

struct CommitRollup {
  std::string commit;
  std::size_t tests = 0;
  std::size_t degraded = 0;
  double min_rho = 0.0;
  double mean_rho = 0.0;
  bool verdict_degraded = false;
};

/// Groups by commit in order of first appearance; degraded iff >= min_degraded tests are.
std::vector<CommitRollup> commit_rollup(std::span<const DegradationLabel> labels, int min_degraded = 2);

struct TemporalParams {
  std::vector<double> windows_hours{1.0, 24.0, 168.0};
  /// Decay per hour for each window; empty selects ln 2 / (window / 2).
  std::vector<double> lambdas;
  double threshold = 1.0;
  double tau_rho = 0.9;

  std::vector<double> effective_lambdas() const;
};

struct TemporalFlag {
  std::string commit;
  std::size_t faults = 0;
  double score = 0.0;
  bool flagged = false;
};

/// score(commit) = sum over windows w, over faulty tests with dt <= w, of
/// exp(-lambda_w * dt); a test is faulty when rho < tau_rho, with no gating on
/// expected efficiency. Throws DataError for a negative or unknown dt.
std::vector<TemporalFlag> temporal_baseline_flags(std::span<const DegradationLabel> labels,
                                                  const TemporalParams& params);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// Fixed-width bins over [lo, hi); values outside land in the edge bins after the report cap.
std::vector<HistogramBin> residual_histogram(std::span<const DegradationLabel> labels, double lo = 0.0,
                                             double hi = 1.5, double width = 0.025);

}  // namespace ranalyzer::residual
