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

// Statistics kit: equal-frequency discretization, conditional variance
// decomposition, Welch's t-test and Cohen's d.

#include <span>
#include <string>
#include <vector>

namespace ranalyzer::stats {

/// Ordinal bin labels for one column. Non-finite inputs get label -1.
struct DiscretizedColumn {
  std::string source;
  /// Inner cut points, strictly increasing; bin i is [cuts[i-1], cuts[i]).
  std::vector<double> cuts;
  std::vector<int> labels;

  std::size_t bin_count() const { return cuts.size() + 1; }
};

/// Equal-frequency bins. Cut points that would duplicate an earlier cut or
/// the column minimum are dropped, reducing the bin count. Throws DataError
/// ("zero variance, cannot bin") when fewer than two distinct finite values exist.
DiscretizedColumn discretize(std::span<const double> values, int n_bins, std::string source = {});

/// Treats a column with at most `n_bins` distinct values as already
/// categorical (labels = rank of the value), otherwise discretizes it.
DiscretizedColumn categorize_column(std::span<const double> values, int n_bins, std::string source = {});

/// Several categorical columns combined into one factor.
using Factor = std::vector<std::span<const int>>;

struct VarianceReport {
  std::string target;
  std::string factor;
  std::vector<std::string> conditioning;
  double score = 0.0;
  std::size_t n = 0;             // rows used (all labels >= 0, target finite)
  std::size_t joint_groups = 0;  // cells of (P, Q)
  std::size_t cond_groups = 0;   // cells of Q
  std::vector<std::size_t> group_sizes;  // sizes of the (P, Q) cells, in key order
};

/// Population variance.
double variance(std::span<const double> values);
double mean(std::span<const double> values);

/// [Var(E[Y|P,Q]) - Var(E[Y|Q])] / Var(Y) with population variances and
/// size-weighted group means. Rows with a negative label or non-finite Y are
/// dropped. Throws DataError when Var(Y) == 0 or fewer than two rows remain.
VarianceReport c_var(std::span<const double> y, const Factor& p, const Factor& q);

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Unequal-variance t-test, Welch-Satterthwaite df, two-sided p.
TTest welch_t(std::span<const double> a, std::span<const double> b);

/// (mean(a) - mean(b)) / pooled SD with n-1 weighting.
double cohens_d(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// P(T > t) for Student's t with `df` degrees of freedom.
double t_survival(double t, double df);

double median(std::vector<double> values);
/// Sample standard deviation (n-1).
double sample_sd(std::span<const double> values);

}  // namespace ranalyzer::stats
