#include <benchmark/benchmark.h>

#include <memory>

#include "lpwg/analysis.hpp"
#include "lpwg/stabilizer.hpp"
#include "lpwg/weak_assembly.hpp"

namespace {

using namespace lpwg;

void BM_AssembleA(benchmark::State& state) {
  const auto mesh = std::make_shared<const Mesh>(build_uniform(static_cast<int>(state.range(0))));
  const FeSpace space(mesh, SpaceConfig{});
  const CoefficientField coeffs = builtin_case("var").coefficients();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_A(space, coeffs));
  state.SetComplexityN(mesh->num_elements());
}
BENCHMARK(BM_AssembleA)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AssembleB(benchmark::State& state) {
  const auto mesh = std::make_shared<const Mesh>(build_uniform(static_cast<int>(state.range(0))));
  const FeSpace space(mesh, SpaceConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_B(space, 1));
  state.SetComplexityN(mesh->num_elements());
}
BENCHMARK(BM_AssembleB)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SolveP2(benchmark::State& state) {
  const Discretization d = Discretization::build(builtin_case("const"), static_cast<int>(state.range(0)), SpaceConfig{});
  const StabilizerP2 s2 = assemble_stabilizer_p2(*d.space);
  for (auto _ : state) benchmark::DoNotOptimize(solve_p2(s2, d.constraint, d.boundary_values));
}
BENCHMARK(BM_SolveP2)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond);

}  // namespace
