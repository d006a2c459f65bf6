#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lpwg/fe_space.hpp"

namespace lpwg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using MatrixField = std::function<Eigen::Matrix2d(const Vec2&)>;

/// Coefficients a_ij of the non-divergence operator and the source f.
struct CoefficientField {
  MatrixField a;
  ScalarField f;

  /// Samples a on a grid of the unit square; returns the extreme eigenvalues
  /// seen. Throws std::invalid_argument if a sample is not symmetric positive definite.
  std::array<double, 2> check_ellipticity(int samples_per_axis = 17) const;
};

/// Weak second derivatives of an element: hessian[i][j] maps the local DOF
/// vector (FeSpace::local_dofs order) to P_l coefficients of d2_{ij,w} v.
struct WeakHessianLocal {
  std::array<std::array<Eigen::MatrixXd, 2>, 2> hessian;
};

Eigen::MatrixXd local_weak_hessian(const FeSpace& space, int element, int i, int j);
WeakHessianLocal local_weak_hessians(const FeSpace& space, int element);

/// Discrete constraint A v = f, split into free and boundary-v_b columns.
struct ConstraintSystem {
  SparseMatrix A;           // M x N
  SparseMatrix A_boundary;  // M x num_boundary
  Eigen::VectorXd fvec;     // (f, psi_m)

  /// Right-hand side with prescribed boundary values moved across.
  Eigen::VectorXd rhs(const Eigen::VectorXd& boundary_values) const;
  /// A v including the boundary columns.
  Eigen::VectorXd apply(const WeakFunction& v) const;
};

/// Local block A_T = sum_ij (a_ij d2_{ij,w} phi, psi)_T, w_size x local_size.
Eigen::MatrixXd local_constraint_matrix(const FeSpace& space, int element, const MatrixField& a);

ConstraintSystem assemble_A(const FeSpace& space, const CoefficientField& coeffs);

/// Elementwise P_l coefficients c_T with (c_T, psi_m)_T = (L_w v, psi_m)_T.
Eigen::VectorXd apply_Lw(const FeSpace& space, const WeakFunction& v, const MatrixField& a);

}  // namespace lpwg
