#include <gtest/gtest.h>

#include <memory>
#include <random>
#include <stdexcept>

#include "lpwg/fe_space.hpp"
#include "test_support.hpp"

namespace lpwg {
namespace {

std::shared_ptr<const Mesh> uniform(int n) { return std::make_shared<const Mesh>(build_uniform(n)); }

// a global P_2 polynomial and its derivatives
double q2(const Vec2& x) { return 1.0 - 2.0 * x.x() + 0.5 * x.y() + 3.0 * x.x() * x.x() - x.x() * x.y() + 2.0 * x.y() * x.y(); }
Vec2 q2_grad(const Vec2& x) { return Vec2(-2.0 + 6.0 * x.x() - x.y(), 0.5 - x.x() + 4.0 * x.y()); }

TEST(SpaceConfig, Validate) {
  EXPECT_NO_THROW((SpaceConfig{2, 1}.validate()));
  EXPECT_NO_THROW((SpaceConfig{2, 0}.validate()));
  EXPECT_NO_THROW((SpaceConfig{3, 2}.validate()));
  EXPECT_THROW((SpaceConfig{1, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((SpaceConfig{2, 2}.validate()), std::invalid_argument);
  EXPECT_THROW((SpaceConfig{3, 0}.validate()), std::invalid_argument);
  EXPECT_EQ(SpaceConfig::with_default_l(3).l, 2);
}

TEST(Layout, CountsOnSingleSquare) {
  const auto mesh = uniform(1);
  const DofLayout L = make_layout(*mesh, SpaceConfig{2, 1});
  EXPECT_EQ(L.v0_size, 6);
  EXPECT_EQ(L.vb_size, 3);
  EXPECT_EQ(L.vg_size, 2);
  EXPECT_EQ(L.w_size, 3);
  EXPECT_EQ(L.N1, 12);
  EXPECT_EQ(L.N2, 3);
  EXPECT_EQ(2 * L.N3, 20);
  EXPECT_EQ(L.N, 35);
  EXPECT_EQ(L.M, 6);
  EXPECT_EQ(L.num_boundary, 4 * 3);
}

TEST(Layout, OffsetsPartitionTheUnknowns) {
  const auto mesh = uniform(3);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  const DofLayout& L = space.layout();
  std::vector<int> hits(static_cast<std::size_t>(L.N), 0);
  std::vector<int> bhits(static_cast<std::size_t>(L.num_boundary), 0);
  for (int t = 0; t < mesh->num_elements(); ++t)
    for (int i = 0; i < L.v0_size; ++i) ++hits[static_cast<std::size_t>(L.v0_offset(t) + i)];
  for (int e = 0; e < mesh->num_edges(); ++e) {
    const DofRef r = L.vb_offset(e);
    EXPECT_EQ(r.boundary, mesh->edge(e).boundary);
    for (int i = 0; i < L.vb_size; ++i) ++(r.boundary ? bhits : hits)[static_cast<std::size_t>(r.index + i)];
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < L.vg_size; ++i) ++hits[static_cast<std::size_t>(L.vg_offset(e, c) + i)];
  }
  for (int h : hits) EXPECT_EQ(h, 1);
  for (int h : bhits) EXPECT_EQ(h, 1);
}

TEST(FeSpace, EvalZeroAndConstants) {
  const auto mesh = uniform(2);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  const WeakFunction zero = space.zero_function();
  EXPECT_EQ(zero.free.size(), space.layout().N);
  EXPECT_EQ(zero.boundary.size(), space.layout().num_boundary);
  for (const Element& el : mesh->elements()) EXPECT_EQ(eval_v0(space, zero, el.id, el.centroid), 0.0);

  const WeakFunction one = project_Qh(space, [](const Vec2&) { return 1.0; }, [](const Vec2&) { return Vec2(0, 0); });
  for (const Element& el : mesh->elements()) {
    EXPECT_NEAR(eval_v0(space, one, el.id, el.centroid), 1.0, 1e-13);
    EXPECT_NEAR(eval_v0_gradient(space, one, el.id, el.centroid).norm(), 0.0, 1e-12);
  }
  for (int e = 0; e < mesh->num_edges(); ++e) {
    EXPECT_NEAR(testing::edge_coefficients(space, one, e, 1).norm(), 0.0, 1e-13);
    EXPECT_NEAR(testing::edge_coefficients(space, one, e, 2).norm(), 0.0, 1e-13);
  }
}

TEST(FeSpace, HessianOfXSquared) {
  const auto mesh = uniform(2);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  const WeakFunction v =
      project_Qh(space, [](const Vec2& x) { return x.x() * x.x(); }, [](const Vec2& x) { return Vec2(2.0 * x.x(), 0); });
  for (const Element& el : mesh->elements()) {
    for (const Vec2& x : {el.centroid, mesh->vertex(el.vertices[0]).p}) {
      const Eigen::Matrix2d H = eval_v0_hessian(space, v, el.id, x);
      EXPECT_NEAR(H(0, 0), 2.0, 1e-10);
      EXPECT_NEAR(H(0, 1), 0.0, 1e-10);
      EXPECT_NEAR(H(1, 1), 0.0, 1e-10);
    }
  }
}

TEST(FeSpace, ProjectionReproducesGlobalPolynomials) {
  const auto mesh = uniform(3);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  const WeakFunction v = project_Qh(space, q2, q2_grad);
  for (const Element& el : mesh->elements()) {
    for (const QuadPoint& q : space.element_quadrature(el.id)) {
      EXPECT_NEAR(eval_v0(space, v, el.id, q.x), q2(q.x), 1e-12);
      EXPECT_NEAR((eval_v0_gradient(space, v, el.id, q.x) - q2_grad(q.x)).norm(), 0.0, 1e-11);
    }
  }
  // edge unknowns are the traces in the edge parameter
  for (int e = 0; e < mesh->num_edges(); ++e) {
    const EdgeMap map = mesh->edge_param(e);
    const Eigen::VectorXd vb = testing::edge_coefficients(space, v, e, 0);
    const Eigen::VectorXd g1 = testing::edge_coefficients(space, v, e, 1);
    const Eigen::VectorXd g2 = testing::edge_coefficients(space, v, e, 2);
    for (double t : {0.0, 0.3, 0.77, 1.0}) {
      EXPECT_NEAR(testing::poly_eval(vb, t), q2(map(t)), 1e-12);
      EXPECT_NEAR(testing::poly_eval(g1, t), q2_grad(map(t)).x(), 1e-12);
      EXPECT_NEAR(testing::poly_eval(g2, t), q2_grad(map(t)).y(), 1e-12);
    }
  }
}

TEST(FeSpace, ProjectionIsL2Orthogonal) {
  // (u - Q0 u, phi)_T = 0 for every basis function, u outside P_k
  const auto mesh = uniform(2);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  const auto u = [](const Vec2& x) { return std::sin(3.0 * x.x()) * std::exp(x.y()); };
  const auto gu = [](const Vec2& x) {
    return Vec2(3.0 * std::cos(3.0 * x.x()) * std::exp(x.y()), std::sin(3.0 * x.x()) * std::exp(x.y()));
  };
  const WeakFunction v = project_Qh(space, u, gu);
  for (const Element& el : mesh->elements()) {
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(space.layout().v0_size);
    for (const QuadPoint& q : space.element_quadrature(el.id)) {
      moments += q.w * (u(q.x) - eval_v0(space, v, el.id, q.x)) * space.basis_values(el.id, q.x, space.k());
    }
    EXPECT_LT(moments.lpNorm<Eigen::Infinity>(), 1e-13);
  }
}

TEST(FeSpace, ProjectWhReproducesPl) {
  const auto mesh = uniform(2);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  const auto g = [](const Vec2& x) { return 2.0 - x.x() + 4.0 * x.y(); };
  const Eigen::VectorXd c = project_Wh(space, g);
  ASSERT_EQ(c.size(), space.layout().M);
  for (const Element& el : mesh->elements()) {
    const Eigen::VectorXd block = c.segment(space.layout().w_offset(el.id), space.layout().w_size);
    for (const QuadPoint& q : space.element_quadrature(el.id)) {
      EXPECT_NEAR(block.dot(space.basis_values(el.id, q.x, space.l())), g(q.x), 1e-12);
    }
  }
  EXPECT_EQ(project_Wh(space, [](const Vec2&) { return 0.0; }).norm(), 0.0);
}

TEST(FeSpace, GatherMatchesLocalDofs) {
  const auto mesh = uniform(2);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  std::mt19937_64 rng(7);
  const WeakFunction v = testing::random_weak_function(space, rng);
  for (const Element& el : mesh->elements()) {
    const auto dofs = space.local_dofs(el.id);
    const Eigen::VectorXd local = space.gather(v, el.id);
    ASSERT_EQ(static_cast<int>(dofs.size()), space.layout().local_size());
    for (std::size_t i = 0; i < dofs.size(); ++i) EXPECT_EQ(local(static_cast<Eigen::Index>(i)), v.coeff(dofs[i]));
  }
}

TEST(FeSpace, EdgeTraceMatchesPointEvaluation) {
  const auto mesh = uniform(2);
  const FeSpace space(mesh, SpaceConfig{2, 1});
  std::mt19937_64 rng(11);
  const WeakFunction v = testing::random_weak_function(space, rng);
  for (const Element& el : mesh->elements()) {
    const Eigen::VectorXd v0 = v.free.segment(space.layout().v0_offset(el.id), space.layout().v0_size);
    for (int le = 0; le < 3; ++le) {
      const EdgeMap map = mesh->edge_param(el.edges[static_cast<std::size_t>(le)]);
      const Eigen::VectorXd tr = space.edge_trace(el.id, le) * v0;
      const Eigen::VectorXd gx = space.edge_gradient_trace(el.id, le, 0) * v0;
      const Eigen::VectorXd gy = space.edge_gradient_trace(el.id, le, 1) * v0;
      for (double t : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(testing::poly_eval(tr, t), eval_v0(space, v, el.id, map(t)), 1e-12);
        const Vec2 g = eval_v0_gradient(space, v, el.id, map(t));
        EXPECT_NEAR(testing::poly_eval(gx, t), g.x(), 1e-11);
        EXPECT_NEAR(testing::poly_eval(gy, t), g.y(), 1e-11);
      }
    }
  }
}

}  // namespace
}  // namespace lpwg
