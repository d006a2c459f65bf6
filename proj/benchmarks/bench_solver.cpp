#include <benchmark/benchmark.h>

#include "lpwg/analysis.hpp"
#include "lpwg/solver.hpp"

namespace {

using namespace lpwg;

struct Setup {
  Discretization d;
  BMatrix bm;
  P1System sys;

  explicit Setup(int n)
      : d(Discretization::build(builtin_case("const"), n, SpaceConfig{})),
        bm(assemble_B(*d.space, 1)),
        sys(P1System::from(d.constraint, bm, d.boundary_values, d.space->k())) {}
};

void BM_FactorS(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(SMatrix(s.sys.A, s.sys.B, 1.0, 1.0));
}
BENCHMARK(BM_FactorS)->RangeMultiplier(2)->Range(4, 16)->Unit(benchmark::kMillisecond);

void BM_FixedPointStep(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  const SMatrix S(s.sys.A, s.sys.B, 1.0, 1.0);
  SaddleState v = SaddleState::zero(s.sys.B.rows(), s.sys.A.cols(), s.sys.A.rows());
  for (auto _ : state) {
    const Eigen::VectorXd bn = make_bn(v, s.sys, 1.0, 1.0, prox::Method::WeightedL1);
    v = fixed_point_step(v, S, bn);
  }
}
BENCHMARK(BM_FixedPointStep)->RangeMultiplier(2)->Range(4, 16)->Unit(benchmark::kMicrosecond);

}  // namespace
