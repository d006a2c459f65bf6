#include "lpwg/weak_assembly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lpwg {

std::array<double, 2> CoefficientField::check_ellipticity(int samples_per_axis) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int j = 0; j < samples_per_axis; ++j) {
    for (int i = 0; i < samples_per_axis; ++i) {
      // offset grid avoids sampling exactly on x = 1/2 or y = 1/2
      const Vec2 x((i + 0.37) / samples_per_axis, (j + 0.61) / samples_per_axis);
      const Eigen::Matrix2d A = a(x);
      if (std::abs(A(0, 1) - A(1, 0)) > 1e-14 * (1.0 + A.norm())) {
        throw std::invalid_argument("CoefficientField: a(x) is not symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
      const auto ev = es.eigenvalues();
      if (ev(0) <= 0.0) throw std::invalid_argument("CoefficientField: a(x) is not positive definite");
      lo = std::min(lo, ev(0));
      hi = std::max(hi, ev(1));
    }
  }
  return {lo, hi};
}

namespace {

int hess_col(int i, int j) { return i == j ? (i == 0 ? 0 : 2) : 1; }

Eigen::MatrixXd weak_hessian_rhs(const FeSpace& space, int element, int i, int j) {
  const Mesh& mesh = space.mesh();
  const DofLayout& L = space.layout();
  const Element& el = mesh.element(element);
  const int k = space.k();
  const int l = space.l();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(L.w_size, L.local_size());

  // (v0, d2_{ji} psi)_T
  const int col = hess_col(i, j);
  for (const QuadPoint& q : space.element_quadrature(element)) {
    const Eigen::VectorXd phi = space.basis_values(element, q.x, k);
    const Eigen::VectorXd d2psi = space.basis_hessians(element, q.x, l).col(col);
    rhs.leftCols(L.v0_size).noalias() += q.w * d2psi * phi.transpose();
  }

  const IntervalRule& rule = space.edge_rule();
  for (int le = 0; le < 3; ++le) {
    const int e = el.edges[static_cast<std::size_t>(le)];
    const EdgeMap em = mesh.edge_param(e);
    const double he = em.length();
    const Vec2 n = el.normals[static_cast<std::size_t>(le)];
    const int off = L.local_edge_offset(le);
    const int off_g = off + L.vb_size + i * L.vg_size;
    for (std::size_t qi = 0; qi < rule.size(); ++qi) {
      const double t = rule.points[qi];
      const double w = rule.weights[qi] * he;
      const Vec2 x = em(t);
      const Eigen::VectorXd psi = space.basis_values(element, x, l);
      const Eigen::VectorXd dpsi = space.basis_gradients(element, x, l).col(j);
      double tp = 1.0;
      for (int m = 0; m <= k; ++m) {
        // -<v_b n_i, d_j psi>
        rhs.col(off + m) -= w * n(i) * tp * dpsi;
        // +<v_gi, psi n_j>, v_gi has degree k-1
        if (m < k) rhs.col(off_g + m) += w * n(j) * tp * psi;
        tp *= t;
      }
    }
  }
  return rhs;
}

}  // namespace

Eigen::MatrixXd local_weak_hessian(const FeSpace& space, int element, int i, int j) {
  if (i < 0 || i > 1 || j < 0 || j > 1) throw std::invalid_argument("local_weak_hessian: i, j must be 0 or 1");
  Eigen::LLT<Eigen::MatrixXd> llt(space.element_mass(element, space.l()));
  if (llt.info() != Eigen::Success) throw std::runtime_error("local_weak_hessian: singular W_h mass matrix");
  return llt.solve(weak_hessian_rhs(space, element, i, j));
}

WeakHessianLocal local_weak_hessians(const FeSpace& space, int element) {
  Eigen::LLT<Eigen::MatrixXd> llt(space.element_mass(element, space.l()));
  if (llt.info() != Eigen::Success) throw std::runtime_error("local_weak_hessian: singular W_h mass matrix");
  WeakHessianLocal out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.hessian[i][j] = llt.solve(weak_hessian_rhs(space, element, i, j));
  return out;
}

Eigen::MatrixXd local_constraint_matrix(const FeSpace& space, int element, const MatrixField& a) {
  const DofLayout& L = space.layout();
  const WeakHessianLocal wh = local_weak_hessians(space, element);
  // K_ij(m, r) = (a_ij psi_r, psi_m)_T
  std::array<std::array<Eigen::MatrixXd, 2>, 2> K;
  for (auto& row : K)
    for (auto& m : row) m = Eigen::MatrixXd::Zero(L.w_size, L.w_size);
  for (const QuadPoint& q : space.element_quadrature(element)) {
    const Eigen::VectorXd psi = space.basis_values(element, q.x, space.l());
    const Eigen::Matrix2d A = a(q.x);
    const Eigen::MatrixXd pp = q.w * psi * psi.transpose();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) K[i][j] += A(i, j) * pp;
  }
  Eigen::MatrixXd local = Eigen::MatrixXd::Zero(L.w_size, L.local_size());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) local.noalias() += K[i][j] * wh.hessian[i][j];
  return local;
}

Eigen::VectorXd ConstraintSystem::rhs(const Eigen::VectorXd& boundary_values) const {
  if (boundary_values.size() == 0) return fvec;
  return fvec - A_boundary * boundary_values;
}

Eigen::VectorXd ConstraintSystem::apply(const WeakFunction& v) const {
  Eigen::VectorXd out = A * v.free;
  if (v.boundary.size() > 0) out += A_boundary * v.boundary;
  return out;
}

ConstraintSystem assemble_A(const FeSpace& space, const CoefficientField& coeffs) {
  const DofLayout& L = space.layout();
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> free_t, bd_t;
  Eigen::VectorXd fvec = Eigen::VectorXd::Zero(L.M);

  for (int t = 0; t < space.mesh().num_elements(); ++t) {
    const Eigen::MatrixXd local = local_constraint_matrix(space, t, coeffs.a);
    const auto dofs = space.local_dofs(t);
    const int row0 = L.w_offset(t);
    for (int m = 0; m < L.w_size; ++m) {
      for (std::size_t c = 0; c < dofs.size(); ++c) {
        const double val = local(m, static_cast<Eigen::Index>(c));
        if (val == 0.0) continue;
        (dofs[c].boundary ? bd_t : free_t).emplace_back(row0 + m, dofs[c].index, val);
      }
    }
    for (const QuadPoint& q : space.element_quadrature(t)) {
      fvec.segment(row0, L.w_size) += q.w * coeffs.f(q.x) * space.basis_values(t, q.x, space.l());
    }
  }

  ConstraintSystem sys;
  sys.A.resize(L.M, L.N);
  sys.A.setFromTriplets(free_t.begin(), free_t.end());
  sys.A_boundary.resize(L.M, L.num_boundary);
  sys.A_boundary.setFromTriplets(bd_t.begin(), bd_t.end());
  sys.fvec = std::move(fvec);
  return sys;
}

Eigen::VectorXd apply_Lw(const FeSpace& space, const WeakFunction& v, const MatrixField& a) {
  const DofLayout& L = space.layout();
  Eigen::VectorXd out(L.M);
  for (int t = 0; t < space.mesh().num_elements(); ++t) {
    const Eigen::VectorXd moments = local_constraint_matrix(space, t, a) * space.gather(v, t);
    Eigen::LLT<Eigen::MatrixXd> llt(space.element_mass(t, space.l()));
    out.segment(L.w_offset(t), L.w_size) = llt.solve(moments);
  }
  return out;
}

}  // namespace lpwg
