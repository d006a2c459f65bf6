#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "lpwg/prox.hpp"
#include "lpwg/stabilizer.hpp"
#include "lpwg/weak_assembly.hpp"

namespace lpwg {

struct SolverConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double tol = 1e-10;           // relative step |v^{n+1} - v^n| / (1 + |v^n|)
  double residual_tol = 1e-8;   // fixed-point residuals (r1, r2, r3)
  long max_iters = 200000;
  prox::Method prox = prox::Method::WeightedL1;

  /// Throws std::invalid_argument on a non-positive parameter.
  void validate() const;
};

/// Iterate v^n = (y^n, u^n, x^n).
struct SaddleState {
  Eigen::VectorXd y;
  Eigen::VectorXd u;
  Eigen::VectorXd x;
  long iteration = 0;

  static SaddleState zero(Eigen::Index rows_B, Eigen::Index N, Eigen::Index M);
  Eigen::VectorXd stacked() const;
};

/// Data of min phi(B u + c) subject to A u = f over the free unknowns. With
/// homogeneous boundary data c = 0 and f is the load vector.
struct P1System {
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd f;
  Eigen::VectorXd c;
  int k = 2;

  static P1System from(const ConstraintSystem& cs, const BMatrix& bm, const Eigen::VectorXd& boundary_values,
                       int k);
};

/// Block matrix [[I, -B, 0], [0, alpha B^T B, beta A^T], [0, beta A, 0]] with
/// its sparse LU factorization.
class SMatrix {
 public:
  /// Throws std::runtime_error when the factorization fails.
  SMatrix(const SparseMatrix& A, const SparseMatrix& B, double alpha, double beta);

  const Eigen::SparseMatrix<double>& matrix() const { return S_; }
  Eigen::Index rows_B() const { return rows_B_; }
  Eigen::Index N() const { return N_; }
  Eigen::Index M() const { return M_; }
  Eigen::Index dim() const { return S_.rows(); }

  /// Smallest |diag(U)| of the LU factors divided by max |S_ij|.
  double min_relative_pivot() const;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  class LU;
  Eigen::SparseMatrix<double> S_;
  Eigen::Index rows_B_ = 0, N_ = 0, M_ = 0;
  std::shared_ptr<LU> lu_;
};

/// Right-hand side b^n of S v^{n+1} = b^n.
Eigen::VectorXd make_bn(const SaddleState& state, const P1System& sys, double alpha, double beta,
                        prox::Method method);

/// v^{n+1} = S^{-1} b^n.
SaddleState fixed_point_step(const SaddleState& state, const SMatrix& S, const Eigen::VectorXd& bn);

struct FixedPointResiduals {
  double r1 = 0.0;  // |beta A^T x + alpha B^T y|_inf
  double r2 = 0.0;  // |y - (I - prox)(B u + c + y)|_inf
  double r3 = 0.0;  // |A u - f|_inf

  double max() const;
};

FixedPointResiduals fixed_point_residuals(const SaddleState& state, const P1System& sys, double alpha, double beta,
                                  prox::Method method);

struct P1Result {
  SaddleState state;
  bool converged = false;
  long iterations = 0;
  double last_step = 0.0;
  FixedPointResiduals residuals;
  /// r2 with the numerical exact prox, when the chosen prox is a surrogate.
  double r2_exact_prox = -1.0;
  std::vector<double> step_history;

  // Invariant monitors over n >= 1.
  /// max_n of |y^n|^2 + |Bu^n|^2 + sum_{i<n} (|Bu^{i+1} - Bu^i|^2 + |y^{i+1} - y^i|^2) - |y^0|^2 - |Bu^0|^2.
  double max_energy_excess = 0.0;
  /// Same energy for the increments v^{n+1} - v^n, n >= 1, against the first increment.
  double max_increment_energy_excess = 0.0;
  double increment_energy_base = 0.0;
  double max_constraint = 0.0;     // max_n |A u^n - f|_inf
  double max_first_equation = 0.0; // max_n |beta A^T x^n + alpha B^T y^n|_inf
};

/// Fixed-point proximity iteration from v^0 = 0 (or the given start). Stops
/// when both the relative step and all residuals are below tolerance; on hitting
/// max_iters returns the last iterate with converged = false.
P1Result solve_p1(const P1System& sys, const SolverConfig& cfg, const SaddleState* start = nullptr);
P1Result solve_p1(const P1System& sys, const SMatrix& S, const SolverConfig& cfg,
                  const SaddleState* start = nullptr);

struct P2Result {
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
  double residual_stationarity = 0.0;  // |S2 u + S2_bd g + A^T lambda|_inf
  double residual_constraint = 0.0;    // |A u - f'|_inf
};

/// Solves [[S2, A^T], [A, 0]] (u; lambda) = (-S2_bd g; f - A_bd g).
/// Throws std::runtime_error when the system is singular.
P2Result solve_p2(const StabilizerP2& s2, const ConstraintSystem& cs, const Eigen::VectorXd& boundary_values);

}  // namespace lpwg
