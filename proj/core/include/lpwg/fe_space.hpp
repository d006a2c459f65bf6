#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "lpwg/mesh.hpp"
#include "lpwg/quadrature.hpp"

namespace lpwg {

/// Polynomial degrees: k for v0 and v_b (v_g uses k-1), l for the multiplier space.
struct SpaceConfig {
  int k = 2;
  int l = 1;

  static SpaceConfig with_default_l(int k) { return SpaceConfig{k, k - 1}; }
  /// Throws std::invalid_argument unless k >= 2 and l in {k-2, k-1}.
  void validate() const;
};

/// Reference to one coefficient of a weak function: either a free unknown or a
/// prescribed boundary value of v_b.
struct DofRef {
  int index = 0;
  bool boundary = false;
};

/// Global block layout (v0, v_b, v_g1, v_g2) of the unknown vector. Boundary
/// v_b coefficients are not unknowns; they live in a separate vector.
struct DofLayout {
  int k = 2;
  int l = 1;
  int num_elements = 0;
  int num_edges = 0;

  int v0_size = 0;   // (k+1)(k+2)/2
  int vb_size = 0;   // k+1
  int vg_size = 0;   // k, per component
  int w_size = 0;    // (l+1)(l+2)/2

  int N1 = 0;
  int N2 = 0;
  int N3 = 0;  // per gradient component
  int N = 0;   // N1 + N2 + 2 N3
  int M = 0;
  int num_boundary = 0;  // boundary v_b coefficients

  std::vector<int> interior_index;  // per edge, -1 on the boundary
  std::vector<int> boundary_index;  // per edge, -1 in the interior

  int v0_offset(int element) const { return element * v0_size; }
  int w_offset(int element) const { return element * w_size; }
  /// Offset of v_b on an edge; a DofRef into the boundary vector on boundary edges.
  DofRef vb_offset(int edge) const;
  int vg_offset(int edge, int component) const { return N1 + N2 + component * N3 + edge * vg_size; }

  /// Local layout of an element: [v0][vb_0 vg1_0 vg2_0][vb_1 ...][vb_2 ...].
  int local_size() const { return v0_size + 3 * (vb_size + 2 * vg_size); }
  int local_edge_offset(int local_edge) const { return v0_size + local_edge * (vb_size + 2 * vg_size); }
};

DofLayout make_layout(const Mesh& mesh, const SpaceConfig& cfg);

/// Coefficients of a weak function in V_h: free unknowns plus boundary v_b values.
struct WeakFunction {
  Eigen::VectorXd free;
  Eigen::VectorXd boundary;

  double coeff(const DofRef& r) const { return r.boundary ? boundary(r.index) : free(r.index); }
};

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Quadrature point mapped to an element.
struct QuadPoint {
  Vec2 x;
  double w;
};

/// Weak Galerkin space on a mesh: DOF layout, scaled-monomial element bases,
/// monomial edge bases in the edge parameter t, and quadrature.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, SpaceConfig cfg);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const SpaceConfig& config() const { return cfg_; }
  const DofLayout& layout() const { return layout_; }
  int k() const { return cfg_.k; }
  int l() const { return cfg_.l; }

  const TriangleRule& triangle_rule() const { return tri_rule_; }
  const IntervalRule& edge_rule() const { return edge_rule_; }

  /// Quadrature points of the element rule in physical coordinates.
  std::vector<QuadPoint> element_quadrature(int element) const;
  std::vector<QuadPoint> element_quadrature(int element, const TriangleRule& rule) const;

  /// Exponents (a, b) of the scaled monomials, ordered by total degree.
  const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

  /// Scaled monomials ((x-xc)/h)^a ((y-yc)/h)^b of degree <= degree at x.
  Eigen::VectorXd basis_values(int element, const Vec2& x, int degree) const;
  /// Gradients as a (size x 2) matrix.
  Eigen::MatrixX2d basis_gradients(int element, const Vec2& x, int degree) const;
  /// Second derivatives, columns (xx, xy, yy).
  Eigen::MatrixX3d basis_hessians(int element, const Vec2& x, int degree) const;

  /// Mass matrix of the P_degree element basis.
  Eigen::MatrixXd element_mass(int element, int degree) const;

  /// t-monomial coefficients of the element basis restricted to a local edge,
  /// parametrized along the global edge orientation: (k+1) x v0_size.
  Eigen::MatrixXd edge_trace(int element, int local_edge) const;
  /// t-monomial coefficients of d/dx_j of the element basis on a local edge:
  /// k x v0_size (degree <= k-1).
  Eigen::MatrixXd edge_gradient_trace(int element, int local_edge, int component) const;

  /// Global references of the local DOFs of an element, in local order.
  std::vector<DofRef> local_dofs(int element) const;
  /// Gathers the local coefficient vector of an element.
  Eigen::VectorXd gather(const WeakFunction& v, int element) const;

  WeakFunction zero_function() const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceConfig cfg_;
  DofLayout layout_;
  TriangleRule tri_rule_;
  IntervalRule edge_rule_;
  std::vector<std::array<int, 2>> exponents_;
};

double eval_v0(const FeSpace& space, const WeakFunction& v, int element, const Vec2& x);
Vec2 eval_v0_gradient(const FeSpace& space, const WeakFunction& v, int element, const Vec2& x);
Eigen::Matrix2d eval_v0_hessian(const FeSpace& space, const WeakFunction& v, int element, const Vec2& x);

/// Componentwise L2 projection Q_h u = {Q0 u, Qb u, Qg grad u}. Boundary v_b
/// coefficients receive Qb u on boundary edges.
WeakFunction project_Qh(const FeSpace& space, const ScalarField& u, const VectorField& grad_u);

/// Elementwise L2 projection onto P_l; returns M coefficients.
Eigen::VectorXd project_Wh(const FeSpace& space, const ScalarField& g);

/// Boundary v_b coefficients Qb g on the boundary edges.
Eigen::VectorXd project_boundary(const FeSpace& space, const ScalarField& g);

}  // namespace lpwg
