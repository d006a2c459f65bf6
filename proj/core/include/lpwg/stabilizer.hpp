#pragma once

#include <array>
#include <limits>
#include <span>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lpwg/fe_space.hpp"
#include "lpwg/weak_assembly.hpp"

namespace lpwg {

/// Stabilizer exponent. Only 1, 2 and infinity are supported.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Row layout of the stacked jump vector: kind-major (value jump, d/dx jump,
/// d/dy jump), then element-edge incidence 3T+i, then t-monomial index.
struct JumpLayout {
  int num_incidences = 0;  // 3 |T_h|
  int block_size = 0;      // k+1

  int rows_per_kind() const { return num_incidences * block_size; }
  int rows() const { return 3 * rows_per_kind(); }
  int block_row(int kind, int element, int local_edge) const {
    return kind * rows_per_kind() + (3 * element + local_edge) * block_size;
  }
};

JumpLayout make_jump_layout(const FeSpace& space);

/// Raw jump coefficients on one incidence: for kind 0 the t-monomials of
/// v0 - v_b, for kind j+1 those of d_j v0 - v_gj (top coefficient 0). Each
/// matrix is (k+1) x local_size.
std::array<Eigen::MatrixXd, 3> local_jump_operators(const FeSpace& space, int element, int local_edge);

struct BMatrix {
  JumpLayout layout;
  int p = 1;
  SparseMatrix B;           // rows x N
  SparseMatrix B_boundary;  // rows x num_boundary

  /// B v including prescribed boundary columns.
  Eigen::VectorXd apply(const WeakFunction& v) const;
  /// Constant part contributed by boundary values.
  Eigen::VectorXd offset(const Eigen::VectorXd& boundary_values) const;
};

/// Scaled jump coefficients: h_e h_T^{1-2p} for value jumps, h_e h_T^{1-p} for
/// gradient jumps, so that phi(B v) = s(v) when p = 1.
BMatrix assemble_B(const FeSpace& space, int p);

/// Sum over (k+1)-blocks of the exact integral over [0,1] of |sum_m q_m t^m|.
double eval_phi(std::span<const double> q, int k);
double eval_phi(const Eigen::VectorXd& q, int k);

/// L^p stabilizer s(v); p in {1, 2, kInfinity}. Gradient jumps use the
/// componentwise sum sum_j |d_j v0 - v_gj|^p (componentwise max for p = inf).
double eval_s(const FeSpace& space, const WeakFunction& v, double p);
double eval_s_tilde(const FeSpace& space, const WeakFunction& v, double p);
/// s^{1/p} from a precomputed s.
double s_tilde_from(double s, double p);

/// Symmetric matrix of the p = 2 stabilizer bilinear form, s(v) = v^T S v / 2.
struct StabilizerP2 {
  SparseMatrix S;           // N x N
  SparseMatrix S_boundary;  // N x num_boundary
};

StabilizerP2 assemble_stabilizer_p2(const FeSpace& space);

}  // namespace lpwg
