// Copyright 2026 The AGT Authors
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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "agt/datasets.hpp"
#include "agt/interval.hpp"
#include "agt/trainer.hpp"

namespace {

using namespace agt;

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(r, c);
  for (double& v : t.values()) v = u(rng);
  return t;
}

IntervalTensor random_interval(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Tensor lo = random_tensor(r, c, rng);
  Tensor hi = lo;
  std::uniform_real_distribution<double> w(0.0, 0.1);
  for (double& v : hi.values()) v += w(rng);
  return IntervalTensor(std::move(lo), std::move(hi));
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const Tensor a = random_tensor(n, n, rng), b = random_tensor(n, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256)->Arg(512);

void BM_IntervalMatmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const IntervalTensor a = random_interval(n, n, rng), b = random_interval(n, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(imatmul(a, b));
}
BENCHMARK(BM_IntervalMatmul)->Arg(64)->Arg(256)->Arg(512);

void BM_IntervalMatmulPointWeights(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const IntervalTensor a = IntervalTensor::point(random_tensor(n, n, rng));
  const IntervalTensor b = random_interval(n, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(imatmul(a, b));
}
BENCHMARK(BM_IntervalMatmulPointWeights)->Arg(64)->Arg(256)->Arg(512);

struct TrainingSetup {
  DatasetSplit data;
  std::vector<std::size_t> widths;
  TrainConfig cfg;
};

TrainingSetup blobs_setup(std::size_t hidden) {
  DatasetSpec spec;
  spec.n_samples = 300;
  spec.seed = 7;
  TrainingSetup s{make_blobs(spec), {2, hidden, 2}, {}};
  s.cfg.epochs = 1;
  s.cfg.batch_size = 120;
  return s;
}

void BM_NominalEpoch(benchmark::State& state) {
  const TrainingSetup s = blobs_setup(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train_nominal(s.data.train.examples, s.widths, s.cfg));
}
BENCHMARK(BM_NominalEpoch)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_AbstractEpoch(benchmark::State& state) {
  const TrainingSetup s = blobs_setup(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(s.data.train.examples, s.widths, s.cfg, PerturbationModel::privacy(5)));
  }
}
BENCHMARK(BM_AbstractEpoch)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_SelectSums(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> rows(b, std::vector<double>(4096));
  for (auto& r : rows) {
    for (double& v : r) v = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(semax(rows, b - 5));
}
BENCHMARK(BM_SelectSums)->Arg(120)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
