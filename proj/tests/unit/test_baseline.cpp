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
#include <numeric>

#include "ranalyzer/baseline.hpp"
#include "ranalyzer/error.hpp"
#include "ranalyzer/rng.hpp"

using namespace ranalyzer;
using namespace ranalyzer::baseline;

namespace {

FeatureMatrix matrix(std::size_t rows, std::size_t cols, const std::vector<double>& raw) {
  std::vector<std::string> ids, names;
  for (std::size_t r = 0; r < rows; ++r) ids.push_back("r" + std::to_string(r));
  for (std::size_t c = 0; c < cols; ++c) names.push_back("x" + std::to_string(c));
  return make_feature_matrix(ids, names, raw);
}

struct Fixture {
  FeatureMatrix x;
  std::vector<double> y;
};

Fixture linear(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> raw, y;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    raw.push_back(a);
    raw.push_back(b);
    y.push_back(3.0 * a);
  }
  return {matrix(n, 2, raw), y};
}

ForestParams small_forest() {
  ForestParams p;
  p.n_trees = 20;
  return p;
}

}  // namespace

TEST_SUITE("baseline") {
  TEST_CASE("learns a noiseless linear function") {
    const auto f = linear(200, 1);
    const auto m = train_baseline(f.x, f.y, ForestParams{}, 7);
    CHECK(m.trees.size() == 100);
    for (const auto& t : m.trees) CHECK(t.depth() <= 8);
    CHECK(evaluate(m, f.x, f.y).r2 >= 0.99);
  }

  TEST_CASE("pure noise does not generalize") {
    Rng rng(2);
    std::vector<double> raw, y;
    const std::size_t n = 400;
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 4; ++c) raw.push_back(rng.uniform());
      y.push_back(rng.normal(0.5, 0.1));
    }
    const auto x = matrix(n, 4, raw);
    const auto split = chronological_split(n);
    std::vector<std::size_t> tr(split), te(n - split);
    std::iota(tr.begin(), tr.end(), 0);
    std::iota(te.begin(), te.end(), split);
    const auto m = train_baseline(x.subset(tr), std::span<const double>(y).first(split), ForestParams{}, 3);
    CHECK(evaluate(m, x.subset(te), std::span<const double>(y).subspan(split)).r2 <= 0.1);
  }

  TEST_CASE("constant target") {
    const auto f = linear(60, 4);
    std::vector<double> y(60, 0.8);
    CHECK_THROWS_WITH_AS(train_baseline(f.x, y, ForestParams{}, 1), "degenerate target", DataError);
    // Trees grown directly on a constant target are single leaves predicting it.
    std::vector<std::size_t> rows(60);
    std::iota(rows.begin(), rows.end(), 0);
    BaselineModel m;
    m.columns = f.x.columns;
    for (int t = 0; t < 5; ++t) m.trees.push_back(grow_regression_tree(f.x, y, rows, ForestParams{}, derive_seed(9, t)));
    for (const auto& t : m.trees) CHECK(t.leaf_count() == 1);
    for (std::size_t r = 0; r < f.x.rows(); ++r) CHECK(m.predict_row(f.x.row(r)) == doctest::Approx(0.8).epsilon(1e-15));
  }

  TEST_CASE("hand-traced single split") {
    const auto x = matrix(4, 1, {1, 2, 3, 4});
    const std::vector<double> y{0, 0, 1, 1};
    ForestParams p;
    p.max_depth = 1;
    p.feature_fraction = 1.0;
    p.bootstrap = false;
    const auto t = grow_regression_tree(x, y, {0, 1, 2, 3}, p, 1);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 2.5);
    CHECK(t.nodes[static_cast<std::size_t>(t.nodes[0].left)].value == 0.0);
    CHECK(t.nodes[static_cast<std::size_t>(t.nodes[0].right)].value == 1.0);
    const std::vector<double> lo{2.4}, hi{2.6};
    CHECK(t.predict(lo) == 0.0);
    CHECK(t.predict(hi) == 1.0);
  }

  TEST_CASE("serialization round trip") {
    const auto f = linear(120, 5);
    const auto m = train_baseline(f.x, f.y, small_forest(), 11);
    const auto text = m.serialize();
    const auto back = BaselineModel::parse(text);
    CHECK(back.serialize() == text);
    CHECK(back.fingerprint() == m.fingerprint());
    for (std::size_t r = 0; r < f.x.rows(); ++r)
      CHECK(std::fabs(back.predict_row(f.x.row(r)) - m.predict_row(f.x.row(r))) <= 1e-12);
    CHECK_THROWS_AS(BaselineModel::parse("ranalyzer-forest 99\n"), DataError);
    CHECK_THROWS_AS(BaselineModel::parse(text.substr(0, text.size() / 2)), DataError);
  }

  TEST_CASE("named prediction and imputation") {
    const std::vector<double> raw{1, NAN, 3, 4, 5, 6};
    const auto x = make_feature_matrix({"a", "b", "c"}, {"p", "q"}, raw);
    CHECK(x.at(0, 1) == 5.0);  // median of {4, 6}
    CHECK(x.imputation.at("q") == 5.0);
    CHECK_THROWS_AS(make_feature_matrix({"a"}, {"p"}, {NAN}), DataError);
    CHECK_THROWS_AS(make_feature_matrix({"a"}, {"throughput_efficiency"}, {1.0}), ConfigError);
    CHECK_THROWS_AS(make_feature_matrix({"a"}, {"cat_MAC"}, {1.0}), ConfigError);

    const auto f = linear(80, 6);
    const auto m = train_baseline(f.x, f.y, small_forest(), 2);
    const double direct = m.predict_row(f.x.row(0));
    CHECK(m.predict({{"x0", f.x.at(0, 0)}, {"x1", f.x.at(0, 1)}}) == direct);
    CHECK(m.predict({{"x0", f.x.at(0, 0)}, {"x1", NAN}}) == m.predict({{"x0", f.x.at(0, 0)}, {"x1", m.imputation.at("x1")}}));
    BaselineModel bare = m;
    bare.imputation.clear();
    CHECK_THROWS_AS(bare.predict({{"x0", 0.1}}), DataError);
  }

  TEST_CASE("metric definitions") {
    const std::vector<double> y{1, 2, 3, 4};
    const auto perfect = regression_metrics(y, y);
    CHECK(perfect.r2 == 1.0);
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.rmse == 0.0);
    const std::vector<double> flat(4, 2.5);
    CHECK(regression_metrics(y, flat).r2 == doctest::Approx(0.0));
    CHECK_THROWS_AS(regression_metrics({}, {}), DataError);
  }

  TEST_CASE("metrics match a brute-force recomputation") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 5 + rng.below(50);
      std::vector<double> y(n), h(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.normal(0.7, 0.2);
        h[i] = y[i] + rng.normal(0.0, 0.1);
      }
      double ybar = 0.0;
      for (double v : y) ybar += v;
      ybar /= static_cast<double>(n);
      double sse = 0.0, sst = 0.0, sae = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sse += (y[i] - h[i]) * (y[i] - h[i]);
        sst += (y[i] - ybar) * (y[i] - ybar);
        sae += std::fabs(y[i] - h[i]);
      }
      const auto m = regression_metrics(y, h);
      CHECK(std::fabs(m.r2 - (1.0 - sse / sst)) <= 1e-12);
      CHECK(std::fabs(m.mae - sae / static_cast<double>(n)) <= 1e-12);
      CHECK(std::fabs(m.rmse * m.rmse - sse / static_cast<double>(n)) <= 1e-12);
      CHECK(m.rmse >= m.mae);
    }
  }

  TEST_CASE("two-fold cross-fit bookkeeping") {
    const auto f = linear(100, 9);
    const auto pred = cross_fit_predictions(f.x, f.y, 2, small_forest(), 4, Execution::serial);
    REQUIRE(pred.size() == 100);
    std::vector<std::size_t> first(50), second(50);
    std::iota(first.begin(), first.end(), 0);
    std::iota(second.begin(), second.end(), 50);
    const auto on_second = train_baseline(f.x.subset(second), std::span<const double>(f.y).subspan(50), small_forest(),
                                          derive_seed(4, 1000), Execution::serial);
    const auto on_first = train_baseline(f.x.subset(first), std::span<const double>(f.y).first(50), small_forest(),
                                         derive_seed(4, 1001), Execution::serial);
    for (std::size_t r = 0; r < 50; ++r) CHECK(pred[r] == on_second.predict_row(f.x.row(r)));
    for (std::size_t r = 50; r < 100; ++r) CHECK(pred[r] == on_first.predict_row(f.x.row(r)));
    CHECK(cross_fit_predictions(f.x, f.y, 2, small_forest(), 4) == pred);
    CHECK_THROWS_AS(cross_fit_predictions(f.x, f.y, 1, small_forest(), 4), ConfigError);
    CHECK_THROWS_AS(cross_fit_predictions(f.x, f.y, 11, small_forest(), 4), DataError);
  }

  TEST_CASE("cross-fit does not absorb an injected drop") {
    auto f = linear(200, 10);
    std::vector<std::size_t> hit;
    for (std::size_t r = 100; r < 200; r += 2) {
      f.y[r] *= 0.6;
      hit.push_back(r);
    }
    const auto cross = cross_fit_predictions(f.x, f.y, 2, ForestParams{}, 5);
    const auto full = train_baseline(f.x, f.y, ForestParams{}, 5);
    double gap_cross = 0.0, gap_full = 0.0;
    for (auto r : hit) {
      const double clean = 3.0 * f.x.at(r, 0);
      gap_cross += std::fabs(cross[r] - clean);
      gap_full += std::fabs(full.predict_row(f.x.row(r)) - clean);
    }
    CHECK(gap_cross < gap_full);
    // Fold 1 rows are predicted by the fold 2 model only; the clean fold 1 gets no
    // information from its own rows and no feedback from fold 2 residuals.
    std::vector<std::size_t> second(100);
    std::iota(second.begin(), second.end(), 100);
    const auto on_second = train_baseline(f.x.subset(second), std::span<const double>(f.y).subspan(100),
                                          ForestParams{}, derive_seed(5, 1000));
    for (std::size_t r = 0; r < 100; ++r) CHECK(cross[r] == on_second.predict_row(f.x.row(r)));
  }

  TEST_CASE("predictions stay inside the training range") {
    Rng rng(13);
    std::vector<double> raw, y;
    for (int i = 0; i < 150; ++i) {
      raw.push_back(rng.uniform());
      raw.push_back(rng.uniform());
      y.push_back(rng.uniform(0.2, 0.9));
    }
    const auto x = matrix(150, 2, raw);
    const auto m = train_baseline(x, y, small_forest(), 6);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    for (int i = 0; i < 500; ++i) {
      const std::vector<double> q{rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0)};
      const double p = m.predict_row(q);
      CHECK(p >= *lo);
      CHECK(p <= *hi);
    }
  }

  TEST_CASE("determinism and serial/parallel equivalence") {
    const auto f = linear(150, 12);
    const auto a = train_baseline(f.x, f.y, ForestParams{}, 99, Execution::parallel);
    const auto b = train_baseline(f.x, f.y, ForestParams{}, 99, Execution::serial);
    const auto c = train_baseline(f.x, f.y, ForestParams{}, 99, Execution::parallel);
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint() == c.fingerprint());
    CHECK(train_baseline(f.x, f.y, ForestParams{}, 100).fingerprint() != a.fingerprint());
  }

  TEST_CASE("duplicated training data still trains") {
    const auto f = linear(60, 14);
    std::vector<std::size_t> twice(120);
    for (std::size_t i = 0; i < 120; ++i) twice[i] = i % 60;
    std::vector<double> y2(120);
    for (std::size_t i = 0; i < 120; ++i) y2[i] = f.y[i % 60];
    const auto m = train_baseline(f.x.subset(twice), y2, small_forest(), 3);
    CHECK(evaluate(m, f.x, f.y).r2 > 0.9);
  }

  TEST_CASE("training preconditions") {
    const auto f = linear(49, 15);
    CHECK_THROWS_AS(train_baseline(f.x, f.y, ForestParams{}, 1), DataError);
    auto g = linear(60, 16);
    g.y[3] = NAN;
    CHECK_THROWS_AS(train_baseline(g.x, g.y, ForestParams{}, 1), DataError);
    CHECK(ForestParams{}.features_per_split(16) == 4);
    CHECK(ForestParams{}.features_per_split(1) == 1);
    CHECK(chronological_split(100) == 80);
  }
}
