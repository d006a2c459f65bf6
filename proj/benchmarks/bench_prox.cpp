#include <benchmark/benchmark.h>

#include <random>

#include "lpwg/prox.hpp"

namespace {

using namespace lpwg;

Eigen::VectorXd sample(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

void BM_ProxK1(benchmark::State& state) {
  const Eigen::VectorXd v = sample(2 * state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(prox::prox_phi_k1(v, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxK1)->Arg(1024);

void BM_ProxWeightedL1(benchmark::State& state) {
  const Eigen::VectorXd v = sample(3 * state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(prox::prox_phi_weighted_l1(v, 1.0, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxWeightedL1)->Arg(1024);

void BM_ProxOracle(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Eigen::VectorXd v = sample((k + 1) * 64, 3);
  for (auto _ : state) benchmark::DoNotOptimize(prox::prox_phi_oracle_blocks(v, 1.0, k));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ProxOracle)->DenseRange(1, 3);

}  // namespace
