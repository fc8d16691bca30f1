// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include <benchmark/benchmark.h>

#include "qcompat/compat.hpp"
#include "qcompat/dilation.hpp"
#include "qcompat/povmtools.hpp"

using namespace qcompat;

namespace {

CMatrix fixture_hermitian(int n) {
  Rng rng(12);
  return random_hermitian(n, rng);
}

void BM_HermEig(benchmark::State& state) {
  const CMatrix a = fixture_hermitian(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(herm_eig(a));
}
BENCHMARK(BM_HermEig)->Arg(8)->Arg(16)->Arg(32);

void BM_PsdProject(benchmark::State& state) {
  const CMatrix a = fixture_hermitian(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(psd_project(a));
}
BENCHMARK(BM_PsdProject)->Arg(8)->Arg(27);

void BM_MinimalStinespring(benchmark::State& state) {
  const Channel ch = random_channel(FdAlgebra{{2, 1}}, FdAlgebra::full(3), 5);
  for (auto _ : state) benchmark::DoNotOptimize(minimal_stinespring(ch));
}
BENCHMARK(BM_MinimalStinespring);

void BM_CommutantConjugate(benchmark::State& state) {
  const Channel ch = random_channel(FdAlgebra::full(3), FdAlgebra::full(3), 7);
  for (auto _ : state) benchmark::DoNotOptimize(commutant_conjugate(ch));
}
BENCHMARK(BM_CommutantConjugate);

void BM_ChannelLeq(benchmark::State& state) {
  const Channel id = Channel::identity(FdAlgebra::full(2));
  Channel dep = id;
  dep.choi_block(0, 0) =
      0.5 * dep.choi_block(0, 0) + 0.25 * CMatrix::Identity(4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(channel_leq(dep, id));
}
BENCHMARK(BM_ChannelLeq);

void BM_JointlyMeasurable(benchmark::State& state) {
  const Povm mx = noisy_observable({1, 0, 0}, 0.5);
  const Povm mz = noisy_observable({0, 0, 1}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(jointly_measurable(mx, mz));
}
BENCHMARK(BM_JointlyMeasurable);

void BM_CompatibleChannels(benchmark::State& state) {
  const Channel lam = random_channel(FdAlgebra::full(2), FdAlgebra::full(2), 9);
  const Channel conj = commutant_conjugate(lam);
  for (auto _ : state) benchmark::DoNotOptimize(compatible_channels(lam, conj));
}
BENCHMARK(BM_CompatibleChannels);

}  // namespace

BENCHMARK_MAIN();
