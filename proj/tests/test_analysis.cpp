#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "lpwg/analysis.hpp"
#include "test_support.hpp"

namespace lpwg {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(BuiltinCase, Examples) {
  const ProblemCase c = builtin_case("const");
  EXPECT_NEAR(c.f(Vec2(0.5, 0.5)), -7.0 * kPi * kPi, 1e-12);
  const ProblemCase d = builtin_case("disc");
  EXPECT_EQ(d.a(Vec2(0.25, 0.75))(0, 1), -1.0);
  EXPECT_EQ(d.a(Vec2(0.75, 0.75))(1, 0), 1.0);
  const ProblemCase v = builtin_case("var");
  const Eigen::Matrix2d a = v.a(Vec2(0.5, 0.5));
  EXPECT_NEAR(a(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(a(0, 1), 0.125, 1e-15);
  EXPECT_GT(a.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), 0.0);
  EXPECT_THROW(builtin_case("poisson"), std::invalid_argument);
  EXPECT_EQ(builtin_case_names().size(), 3u);
  for (const auto& name : builtin_case_names()) EXPECT_NO_THROW(builtin_case(name).coefficients().check_ellipticity());
}

// f against a centered finite-difference Hessian of u
TEST(BuiltinCase, SourceMatchesFiniteDifferences) {
  const double h = 1e-4;
  for (const auto& name : builtin_case_names()) {
    const ProblemCase pc = builtin_case(name);
    for (const Vec2 x : {Vec2(0.3, 0.2), Vec2(0.7, 0.4), Vec2(0.2, 0.9)}) {
      const auto u = [&](double dx, double dy) { return pc.u(Vec2(x.x() + dx, x.y() + dy)); };
      const double uxx = (u(h, 0) - 2.0 * u(0, 0) + u(-h, 0)) / (h * h);
      const double uyy = (u(0, h) - 2.0 * u(0, 0) + u(0, -h)) / (h * h);
      const double uxy = (u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4.0 * h * h);
      const Eigen::Matrix2d a = pc.a(x);
      EXPECT_NEAR(pc.f(x), a(0, 0) * uxx + 2.0 * a(0, 1) * uxy + a(1, 1) * uyy, 1e-5 * (1.0 + std::abs(pc.f(x))))
          << name;
      const Vec2 g((u(h, 0) - u(-h, 0)) / (2 * h), (u(0, h) - u(0, -h)) / (2 * h));
      EXPECT_LT((pc.grad_u(x) - g).norm(), 1e-7) << name;
    }
    for (double t : {0.0, 0.3, 1.0}) {
      EXPECT_NEAR(pc.u(Vec2(t, 0.0)), 0.0, 1e-15);
      EXPECT_NEAR(pc.u(Vec2(1.0, t)), 0.0, 1e-15);
    }
  }
}

TEST(BuiltinCase, DiscontinuousNeedsEvenN) {
  EXPECT_THROW(builtin_case("disc").check_n(5), std::invalid_argument);
  EXPECT_NO_THROW(builtin_case("disc").check_n(4));
  EXPECT_NO_THROW(builtin_case("const").check_n(5));
  EXPECT_THROW(run_study(builtin_case("disc"), 2, SpaceConfig{}, {3}, SolverConfig{}), std::invalid_argument);
}

TEST(Errors, ZeroForExactEmbedding) {
  const ProblemCase pc = quadratic_case();
  const Discretization d = Discretization::build(pc, 2, SpaceConfig{});
  const WeakFunction qu = project_Qh(*d.space, pc.u, pc.grad_u);
  for (double p : {1.0, 2.0, kInfinity}) {
    EXPECT_LT(error_lp(*d.space, qu, pc, p), 1e-12);
    EXPECT_LT(error_w1p(*d.space, qu, pc, p), 1e-11);
  }
  for (double p : {1.0, 2.0}) EXPECT_LT(error_w2ph(*d.space, qu, pc, p), 1e-11);
}

TEST(Errors, ZeroApproximation) {
  const ProblemCase pc = builtin_case("const");
  const Discretization d = Discretization::build(pc, 4, SpaceConfig{});
  WeakFunction zero = d.space->zero_function();
  EXPECT_NEAR(error_lp(*d.space, zero, pc, 2.0), 0.5, 1e-10);
  EXPECT_NEAR(error_lp(*d.space, zero, pc, kInfinity), 1.0, 1e-2);
  // |grad u|_{0,2}^2 = pi^2 / 2
  EXPECT_NEAR(error_w1p(*d.space, zero, pc, 2.0), kPi / std::sqrt(2.0), 1e-10);
  // |u|_{0,1} = (2/pi)^2
  EXPECT_NEAR(error_lp(*d.space, zero, pc, 1.0), 4.0 / (kPi * kPi), 1e-9);
}

TEST(Errors, DiscreteW2IsHomogeneousForP1) {
  const ProblemCase pc = builtin_case("var");
  const Discretization d = Discretization::build(pc, 2, SpaceConfig{});
  std::mt19937_64 rng(2);
  WeakFunction v = testing::random_weak_function(*d.space, rng, false);
  const double n1 = discrete_w2p_norm(*d.space, v, pc.a, 1.0);
  WeakFunction v2 = v;
  v2.free *= 2.0;
  EXPECT_NEAR(discrete_w2p_norm(*d.space, v2, pc.a, 1.0), 2.0 * n1, 1e-12 * n1);
  EXPECT_NEAR(discrete_w2p_norm(*d.space, v2, pc.a, 2.0), 2.0 * discrete_w2p_norm(*d.space, v, pc.a, 2.0), 1e-12 * n1);

  // u_h = Q_h u - v gives e_h = v
  const WeakFunction qu = project_Qh(*d.space, pc.u, pc.grad_u);
  WeakFunction uh = qu;
  uh.free -= v.free;
  EXPECT_NEAR(error_w2ph(*d.space, uh, pc, 1.0), n1, 1e-12 * n1);
}

TEST(Rates, Examples) {
  EXPECT_NEAR(rates({1e-2, 2.5e-3})[0], 2.0, 1e-14);
  EXPECT_NEAR(rates({8e-3, 1e-3})[0], 3.0, 1e-14);
  EXPECT_NEAR(rates({1.12e-02, 1.09e-03})[0], 3.36, 5e-3);
  EXPECT_TRUE(rates({1.0}).empty());
  EXPECT_THROW(rates({1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(rates({-1.0, 0.5}), std::invalid_argument);
}

TEST(RunStudy, ErrorsDecreaseForSmoothCases) {
  for (const char* name : {"const", "var"}) {
    const ConvergenceTable t = run_study(builtin_case(name), 2, SpaceConfig{}, {2, 4, 8}, SolverConfig{});
    ASSERT_EQ(t.reports.size(), 3u);
    EXPECT_TRUE(t.converged());
    for (std::size_t i = 0; i + 1 < t.reports.size(); ++i) {
      EXPECT_GT(t.reports[i].e_L, t.reports[i + 1].e_L) << name;
      EXPECT_GT(t.reports[i].e_W1, t.reports[i + 1].e_W1) << name;
      EXPECT_GT(t.reports[i].e_W2, t.reports[i + 1].e_W2) << name;
      EXPECT_NEAR(t.reports[i].h, 2.0 * t.reports[i + 1].h, 1e-15);
    }
    EXPECT_EQ(t.rates_L().size(), 2u);
  }
}

TEST(RunStudy, StopsAfterUnconvergedLevel) {
  SolverConfig cfg;
  cfg.max_iters = 3;
  int calls = 0;
  const ConvergenceTable t =
      run_study(builtin_case("const"), 1, SpaceConfig{}, {2, 4}, cfg, [&](const ErrorReport&) { ++calls; });
  ASSERT_EQ(t.reports.size(), 1u);
  EXPECT_EQ(calls, 1);
  EXPECT_FALSE(t.converged());
  EXPECT_EQ(t.reports[0].iterations, 3);
}

}  // namespace
}  // namespace lpwg
