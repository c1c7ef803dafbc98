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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "ranalyzer/error.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/stats.hpp"
#include "ranalyzer/text.hpp"

using namespace ranalyzer;
using namespace ranalyzer::stats;

namespace {

// Naive O(n^2) group-mean oracle.
double oracle_cvar(const std::vector<double>& y, const std::vector<int>& p, const std::vector<int>& q) {
  const std::size_t n = y.size();
  auto fitted = [&](bool use_p) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      int c = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (q[j] != q[i]) continue;
        if (use_p && p[j] != p[i]) continue;
        s += y[j];
        ++c;
      }
      f[i] = s / c;
    }
    return f;
  };
  auto pvar = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
  };
  return (pvar(fitted(true)) - pvar(fitted(false))) / pvar(y);
}

struct WelchRef {
  std::vector<double> a, b;
  double t, df, p, d;
};

std::vector<WelchRef> load_welch_reference() {
  std::ifstream in(std::string(RANALYZER_TEST_DATA) + "/welch_reference.tsv");
  std::vector<WelchRef> out;
  std::string line;
  std::getline(in, line);
  auto nums = [](const std::string& s) {
    std::vector<double> v;
    for (const auto& f : text::split(s, ',')) v.push_back(*text::parse_double(f));
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    out.push_back({nums(f[7]), nums(f[8]), *text::parse_double(f[3]), *text::parse_double(f[4]),
                   *text::parse_double(f[5]), *text::parse_double(f[6])});
  }
  return out;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("quartiles of 1..100") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const auto c = discretize(v, 4);
    REQUIRE(c.bin_count() == 4);
    std::vector<int> counts(4);
    for (int l : c.labels) ++counts[static_cast<std::size_t>(l)];
    CHECK(counts == std::vector<int>{25, 25, 25, 25});
  }

  TEST_CASE("duplicate cuts collapse") {
    const std::vector<double> v{1, 1, 1, 2};
    const auto c = discretize(v, 4);
    CHECK(c.bin_count() == 2);
    CHECK(c.labels == std::vector<int>{0, 0, 0, 1});
    CHECK_THROWS_WITH_AS(discretize(std::vector<double>{3, 3, 3}, 4), "zero variance, cannot bin", DataError);
  }

  TEST_CASE("equal-frequency bins against a sort-based recount") {
    Rng rng(5);
    std::vector<double> v(997);
    for (auto& x : v) x = rng.uniform(-110.0, -70.0);
    const auto c = discretize(v, 5);
    REQUIRE(c.bin_count() == 5);
    for (std::size_t i = 1; i < c.cuts.size(); ++i) CHECK(c.cuts[i - 1] < c.cuts[i]);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> counts(5);
    for (int l : c.labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t b = 0; b < 5; ++b) {
      const std::size_t lo = b * v.size() / 5, hi = (b + 1) * v.size() / 5;
      CHECK(std::abs(static_cast<long>(counts[b]) - static_cast<long>(hi - lo)) <= 1);
    }
  }

  TEST_CASE("non-finite values get label -1") {
    const std::vector<double> v{1, NAN, 2, 3, 4};
    const auto c = discretize(v, 2);
    CHECK(c.labels[1] == -1);
    const auto k = categorize_column(std::vector<double>{0, 1, 0, NAN}, 5);
    CHECK(k.labels == std::vector<int>{0, 1, 0, -1});
  }

  TEST_CASE("hand table gives 32/35") {
    const std::vector<double> y{1, 2, 3, 4, 5, 6};
    const std::vector<int> p{0, 0, 1, 1, 2, 2};
    const auto r = c_var(y, {p}, {});
    CHECK(r.score == doctest::Approx(32.0 / 35.0).epsilon(1e-14));
    CHECK(r.joint_groups == 3);
    CHECK(r.n == 6);
  }

  TEST_CASE("determined and independent factors") {
    const std::vector<double> y{0, 1, 2, 0, 1, 2};
    const std::vector<int> p{0, 1, 2, 0, 1, 2};
    CHECK(c_var(y, {p}, {}).score == doctest::Approx(1.0).epsilon(1e-14));
    const std::vector<int> constant(6, 0);
    CHECK(c_var(y, {constant}, {}).score == doctest::Approx(0.0));
    CHECK_THROWS_AS(c_var(std::vector<double>(6, 1.0), {p}, {}), DataError);
  }

  TEST_CASE("matches the nested-loop oracle on random small tables") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.below(11);
      std::vector<double> y(n);
      std::vector<int> p(n), q(n);
      const auto kp = static_cast<int>(1 + rng.below(3)), kq = static_cast<int>(1 + rng.below(3));
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.normal(0.0, 1.0);
        p[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(kp)));
        q[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(kq)));
      }
      const auto r = c_var(y, {p}, {q});
      CHECK(std::fabs(r.score - oracle_cvar(y, p, q)) <= 1e-12);
      CHECK(r.score >= -1e-15);
      CHECK(r.score <= 1.0 + 1e-15);
    }
  }

  TEST_CASE("affine and permutation invariance") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 30;
      std::vector<double> y(n), y2(n);
      std::vector<int> p(n), q(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = static_cast<int>(rng.below(4));
        q[i] = static_cast<int>(rng.below(3));
        y[i] = p[i] + q[i] + rng.normal(0.0, 0.5);
        y2[i] = -3.5 * y[i] + 12.0;
      }
      const double base = c_var(y, {p}, {q}).score;
      CHECK(std::fabs(c_var(y2, {p}, {q}).score - base) <= 1e-9);

      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      std::vector<double> yp(n);
      std::vector<int> pp(n), qp(n);
      for (std::size_t i = 0; i < n; ++i) {
        yp[i] = y[perm[i]];
        pp[i] = p[perm[i]];
        qp[i] = q[perm[i]];
      }
      CHECK(c_var(yp, {pp}, {qp}).score == doctest::Approx(base).epsilon(1e-12));
    }
  }

  TEST_CASE("welch examples") {
    Rng rng(3);
    std::vector<double> a(100), b(100);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.normal(0.0, 1.0);
      b[i] = a[i] + 10.0;
    }
    const auto same = welch_t(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p == doctest::Approx(1.0));
    CHECK(welch_t(a, b).p < 1e-10);
    CHECK(welch_t(a, b).t == doctest::Approx(-welch_t(b, a).t).epsilon(1e-15));
    CHECK_THROWS_AS(welch_t(std::vector<double>{1.0}, a), DataError);
    CHECK_THROWS_AS(welch_t(std::vector<double>{2, 2, 2}, std::vector<double>{1, 1, 1}), DataError);
  }

  TEST_CASE("cohen's d examples") {
    const std::vector<double> a{-1, 1, -1, 1}, b{0, 2, 0, 2};
    CHECK(cohens_d(a, a) == 0.0);
    // Sample SD of {-1, 1, -1, 1} is sqrt(4/3).
    CHECK(cohens_d(b, a) == doctest::Approx(1.0 / std::sqrt(4.0 / 3.0)).epsilon(1e-14));
    const std::vector<double> c{1, 2, 3, 4, 5}, d{2, 4, 6};
    // Hand computation: means 3 and 4, s1^2 = 2.5, s2^2 = 4, pooled = sqrt((4*2.5 + 2*4)/6) = sqrt(3).
    CHECK(cohens_d(c, d) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  }

  TEST_CASE("t survival tabulated values") {
    CHECK(t_survival(0.0, 5.0) == doctest::Approx(0.5));
    CHECK(t_survival(2.015048372669157, 5.0) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(t_survival(1.959963984540054, 1e9) == doctest::Approx(0.025).epsilon(1e-8));
    CHECK(t_survival(12.706204736174698, 1.0) == doctest::Approx(0.025).epsilon(1e-10));
    CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
  }

  TEST_CASE("matches the scipy reference on 50 pairs") {
    const auto refs = load_welch_reference();
    REQUIRE(refs.size() == 50);
    for (const auto& r : refs) {
      const auto w = welch_t(r.a, r.b);
      CHECK(std::fabs(w.t - r.t) <= 1e-8);
      CHECK(std::fabs(w.df - r.df) <= 1e-8 * std::max(1.0, r.df));
      CHECK(std::fabs(w.p - r.p) <= 1e-6);
      CHECK(std::fabs(cohens_d(r.a, r.b) - r.d) <= 1e-8);
    }
  }

  TEST_CASE("median and sample sd") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK(sample_sd(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  }
}
