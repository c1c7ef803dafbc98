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

#include "ranalyzer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ranalyzer/error.hpp"

namespace ranalyzer::stats {

double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(variance(v) * static_cast<double>(v.size()) / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// Discretization

DiscretizedColumn discretize(std::span<const double> values, int n_bins, std::string source) {
  if (n_bins < 2) throw ConfigError("bin count must be at least 2");
  std::vector<double> sorted;
  for (double v : values)
    if (std::isfinite(v)) sorted.push_back(v);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty() || sorted.front() == sorted.back()) throw DataError("zero variance, cannot bin");

  DiscretizedColumn col;
  col.source = std::move(source);
  const std::size_t n = sorted.size();
  for (int i = 1; i < n_bins; ++i) {
    const double cut = sorted[static_cast<std::size_t>(i) * n / static_cast<std::size_t>(n_bins)];
    if (cut <= sorted.front()) continue;
    if (!col.cuts.empty() && cut <= col.cuts.back()) continue;
    col.cuts.push_back(cut);
  }
  if (col.cuts.empty()) col.cuts.push_back(sorted.back());  // two distinct values collapsed together

  col.labels.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) {
      col.labels.push_back(-1);
      continue;
    }
    col.labels.push_back(static_cast<int>(std::upper_bound(col.cuts.begin(), col.cuts.end(), v) - col.cuts.begin()));
  }
  return col;
}

DiscretizedColumn categorize_column(std::span<const double> values, int n_bins, std::string source) {
  std::set<double> distinct;
  for (double v : values)
    if (std::isfinite(v)) distinct.insert(v);
  if (distinct.size() > static_cast<std::size_t>(n_bins)) return discretize(values, n_bins, std::move(source));
  DiscretizedColumn col;
  col.source = std::move(source);
  std::vector<double> levels(distinct.begin(), distinct.end());
  for (std::size_t i = 1; i < levels.size(); ++i) col.cuts.push_back(levels[i]);
  for (double v : values) {
    if (!std::isfinite(v)) {
      col.labels.push_back(-1);
      continue;
    }
    col.labels.push_back(static_cast<int>(std::lower_bound(levels.begin(), levels.end(), v) - levels.begin()));
  }
  return col;
}

// ---------------------------------------------------------------------------
// Variance decomposition

namespace {

using Key = std::vector<int>;

/// Variance of the group-mean column E[Y | key] over the kept rows; also returns the group sizes.
double explained_variance(std::span<const double> y, const std::vector<Key>& keys, std::vector<std::size_t>* sizes) {
  std::map<Key, std::pair<double, std::size_t>> groups;
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto& g = groups[keys[i]];
    g.first += y[i];
    ++g.second;
  }
  const double grand = mean(y);
  // Population variance of the fitted column equals the size-weighted spread of group means.
  double s = 0.0;
  for (const auto& [key, g] : groups) {
    const double m = g.first / static_cast<double>(g.second);
    s += static_cast<double>(g.second) * (m - grand) * (m - grand);
    if (sizes) sizes->push_back(g.second);
  }
  return s / static_cast<double>(y.size());
}

}  // namespace

VarianceReport c_var(std::span<const double> y, const Factor& p, const Factor& q) {
  for (const auto& f : p)
    if (f.size() != y.size()) throw DataError("factor column length differs from target");
  for (const auto& f : q)
    if (f.size() != y.size()) throw DataError("conditioning column length differs from target");

  std::vector<double> ys;
  std::vector<Key> joint, cond;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) continue;
    Key kq, kj;
    bool ok = true;
    for (const auto& f : q) {
      ok = ok && f[i] >= 0;
      kq.push_back(f[i]);
    }
    kj = kq;
    for (const auto& f : p) {
      ok = ok && f[i] >= 0;
      kj.push_back(f[i]);
    }
    if (!ok) continue;
    ys.push_back(y[i]);
    joint.push_back(std::move(kj));
    cond.push_back(std::move(kq));
  }
  if (ys.size() < 2) throw DataError("variance decomposition needs at least two complete rows");
  const double total = variance(ys);
  if (!(total > 0.0)) throw DataError("target has zero variance");

  VarianceReport r;
  r.n = ys.size();
  const double vj = explained_variance(ys, joint, &r.group_sizes);
  std::vector<std::size_t> cond_sizes;
  const double vq = explained_variance(ys, cond, &cond_sizes);
  r.joint_groups = r.group_sizes.size();
  r.cond_groups = cond_sizes.size();
  r.score = (vj - vq) / total;
  // Nested partitions make the score lie in [0, 1]; absorb summation-order rounding only.
  if (r.score < 0.0 && r.score > -1e-12) r.score = 0.0;
  if (r.score > 1.0 && r.score < 1.0 + 1e-12) r.score = 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// Incomplete beta (continued fraction, modified Lentz)

namespace {

double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

namespace {

/// ln B(a, b) without the cancellation lgamma suffers when one argument is huge.
double log_beta(double a, double b) {
  const double big = std::max(a, b), small = std::min(a, b);
  if (big < 1e4) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  // Stirling difference for lgamma(big + small) - lgamma(big).
  const double r = small / big;
  const double z = big + small;
  const double diff = (big - 0.5) * std::log1p(r) + small * std::log(z) - small +
                      (1.0 / (12.0 * z) - 1.0 / (12.0 * big)) - (1.0 / (360.0 * z * z * z) - 1.0 / (360.0 * big * big * big));
  return std::lgamma(small) - diff;
}

/// I_x(a, b) given both x and y = 1 - x, so neither loses digits near 1.
double reg_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = x > 0.5 ? std::log1p(-y) : std::log(x);
  const double log_y = y > 0.5 ? std::log1p(-x) : std::log(y);
  const double front = std::exp(a * log_x + b * log_y - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, y) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) { return reg_beta(a, b, x, 1.0 - x); }

double t_survival(double t, double df) {
  const double t2 = t * t;
  const double tail = 0.5 * reg_beta(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2));
  return t >= 0.0 ? tail : 1.0 - tail;
}

// ---------------------------------------------------------------------------
// Two-sample tests

namespace {

struct Moments {
  double n, mean, var;  // sample variance
};

Moments moments(std::span<const double> v) {
  if (v.size() < 2) throw DataError("two-sample statistic needs at least two values per group");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  const double var = s / (n - 1.0);
  if (!(var > 0.0) || !std::isfinite(var)) throw DataError("degenerate variance");
  return {n, m, var};
}

}  // namespace

TTest welch_t(std::span<const double> a, std::span<const double> b) {
  const Moments ma = moments(a), mb = moments(b);
  const double sa = ma.var / ma.n, sb = mb.var / mb.n;
  TTest r;
  r.t = (ma.mean - mb.mean) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (ma.n - 1.0) + sb * sb / (mb.n - 1.0));
  r.p = std::min(1.0, 2.0 * t_survival(std::fabs(r.t), r.df));
  return r;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  const Moments ma = moments(a), mb = moments(b);
  const double pooled = std::sqrt(((ma.n - 1.0) * ma.var + (mb.n - 1.0) * mb.var) / (ma.n + mb.n - 2.0));
  return (ma.mean - mb.mean) / pooled;
}

}  // namespace ranalyzer::stats
