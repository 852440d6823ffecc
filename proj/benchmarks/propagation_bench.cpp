/* Copyright 2026 The retab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "retab/affinity.hpp"
#include "retab/boundary.hpp"
#include "retab/pipeline.hpp"
#include "retab/propagation.hpp"

namespace retab {
namespace {

// Working-grid size of a 448-pixel crop at output stride 8.
constexpr int kSide = 56;

FeatureMap RandomFeatures(int side, int depth, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(side) * side * depth);
  for (auto& x : v) x = u(rng);
  return FeatureMap(side, side, depth, std::move(v));
}

ResponseStack RandomResponses(int side, int channels, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(side) * side * channels);
  for (auto& x : v) x = u(rng);
  return ResponseStack(side, side, channels, std::move(v));
}

RegionMask RandomMask(int side, double p, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(p);
  BinaryMap m(side, side, 0);
  for (auto& v : m.values()) v = coin(rng) ? 1 : 0;
  return RegionMask(std::move(m));
}

PairAffinityTable Table(double gamma) {
  auto pairs = std::make_shared<const NeighborPairs>(BuildNeighbors(kSide, kSide, gamma));
  return AffinityFromFeatures(RandomFeatures(kSide, 16, 1), std::move(pairs));
}

void BM_BuildNeighbors(benchmark::State& state) {
  const double gamma = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(BuildNeighbors(kSide, kSide, gamma));
}
BENCHMARK(BM_BuildNeighbors)->Arg(3)->Arg(5);

void BM_AffinityFromFeatures(benchmark::State& state) {
  auto pairs = std::make_shared<const NeighborPairs>(BuildNeighbors(kSide, kSide, 5.0));
  const FeatureMap f = RandomFeatures(kSide, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(AffinityFromFeatures(f, pairs));
}
BENCHMARK(BM_AffinityFromFeatures)->Arg(16)->Arg(448);

void BM_ToTransition(benchmark::State& state) {
  const auto table = Table(5.0);
  const auto a = BuildFullMatrix(table);
  for (auto _ : state) benchmark::DoNotOptimize(ToTransition(a, 8.0));
}
BENCHMARK(BM_ToTransition);

void BM_RandomWalk(benchmark::State& state) {
  const auto t = ToTransition(BuildFullMatrix(Table(5.0)), 8.0);
  const ResponseStack m = RandomResponses(kSide, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(RandomWalk(t, m, 16));
}
BENCHMARK(BM_RandomWalk)->Arg(1)->Arg(4);

void BM_Propagate(benchmark::State& state) {
  const auto table = Table(5.0);
  const RegionMask mask = RandomMask(kSide, 0.15, 4);
  const ResponseStack m = RandomResponses(kSide, 2, 5);
  const auto strategy = static_cast<Strategy>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Propagate(strategy, table, mask, m));
  state.SetLabel(std::string(StrategyName(strategy)));
}
BENCHMARK(BM_Propagate)
    ->Arg(static_cast<int>(Strategy::kOneStage))
    ->Arg(static_cast<int>(Strategy::kNbdBd))
    ->Arg(static_cast<int>(Strategy::kBtp));

void BM_ProcessSample(benchmark::State& state) {
  SampleInputs in;
  in.cam = RandomResponses(kSide, 2, 6);
  in.categories = {3, 12};
  in.features = RandomFeatures(kSide, 16, 7);
  in.boundary = BoundaryProbMap(kSide, kSide, 0.2);
  in.output_size = std::pair{448, 448};
  const PipelineConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(ProcessSample(config, in));
}
BENCHMARK(BM_ProcessSample)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace retab

BENCHMARK_MAIN();
