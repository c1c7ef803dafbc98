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

// Serial reference vs OpenMP kernels: forest training, boosted-tree training
// and dataset ingest. Run with --benchmark_filter to pick one pair.

#include <benchmark/benchmark.h>
#include <unistd.h>

#include <filesystem>

#include "ranalyzer/baseline.hpp"
#include "ranalyzer/ingest.hpp"
#include "ranalyzer/risk.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/synthgen.hpp"

using namespace ranalyzer;
namespace fs = std::filesystem;

namespace {

struct Regression {
  baseline::FeatureMatrix x;
  std::vector<double> y;
};

const Regression& regression() {
  static const Regression r = [] {
    Rng rng(1);
    const std::size_t n = 4000, p = 12;
    std::vector<std::string> ids, cols;
    std::vector<double> raw;
    std::vector<double> y;
    for (std::size_t c = 0; c < p; ++c) cols.push_back("x" + std::to_string(c));
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(std::to_string(i));
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        const double v = rng.uniform();
        raw.push_back(v);
        s += (c % 3 == 0 ? 1.0 : 0.1) * v;
      }
      y.push_back(s + rng.normal(0.0, 0.05));
    }
    return Regression{baseline::make_feature_matrix(ids, cols, raw), y};
  }();
  return r;
}

const risk::LabeledData& classification() {
  static const risk::LabeledData d = [] {
    Rng rng(2);
    risk::LabeledData out;
    for (int c = 0; c < 40; ++c) {
      out.columns.push_back("f" + std::to_string(c));
      out.binary.push_back(c >= 30);
    }
    for (int i = 0; i < 5000; ++i) {
      std::vector<double> row(40);
      for (int c = 0; c < 40; ++c) row[static_cast<std::size_t>(c)] = c >= 30 ? static_cast<double>(rng.below(2)) : rng.normal(0.0, 1.0);
      const int y = row[0] + row[30] + rng.normal(0.0, 0.5) > 1.5 ? 1 : 0;
      out.push_back(std::move(row), y);
    }
    return out;
  }();
  return d;
}

const fs::path& corpus() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / ("ranalyzer-bench-" + std::to_string(::getpid()));
    synthgen::ScenarioSpec spec;
    spec.n_commits = 40;
    synthgen::write_corpus(synthgen::generate(spec), d);
    return d;
  }();
  return dir;
}

void BM_Forest(benchmark::State& state, baseline::Execution exec) {
  const auto& r = regression();
  baseline::ForestParams p;
  p.n_trees = 32;
  for (auto _ : state) benchmark::DoNotOptimize(baseline::train_baseline(r.x, r.y, p, 7, exec));
}

void BM_Boost(benchmark::State& state, risk::Execution exec) {
  const auto& d = classification();
  risk::BoostParams p;
  p.n_estimators = 50;
  for (auto _ : state) benchmark::DoNotOptimize(risk::train_risk(d, p, 7, exec));
}

void BM_Ingest(benchmark::State& state, bool parallel) {
  ingest::IngestOptions opt;
  opt.parallel = parallel;
  const auto root = corpus() / "dataset";
  for (auto _ : state) benchmark::DoNotOptimize(ingest::ingest_dataset(root, opt));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Forest, serial, baseline::Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Forest, parallel, baseline::Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Boost, serial, risk::Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Boost, parallel, risk::Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Ingest, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Ingest, parallel, true)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  std::error_code ec;
  fs::remove_all(fs::temp_directory_path() / ("ranalyzer-bench-" + std::to_string(::getpid())), ec);
  return 0;
}
