#include "lpwg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpwg {

void SolverConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("solver: alpha and beta must be positive");
  if (!(tol > 0.0) || !(residual_tol > 0.0)) throw std::invalid_argument("solver: tolerances must be positive");
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be at least 1");
}

SaddleState SaddleState::zero(Eigen::Index rows_B, Eigen::Index N, Eigen::Index M) {
  return SaddleState{Eigen::VectorXd::Zero(rows_B), Eigen::VectorXd::Zero(N), Eigen::VectorXd::Zero(M), 0};
}

Eigen::VectorXd SaddleState::stacked() const {
  Eigen::VectorXd v(y.size() + u.size() + x.size());
  v << y, u, x;
  return v;
}

P1System P1System::from(const ConstraintSystem& cs, const BMatrix& bm, const Eigen::VectorXd& boundary_values,
                        int k) {
  P1System sys;
  sys.A = cs.A;
  sys.B = bm.B;
  sys.f = cs.rhs(boundary_values);
  sys.c = bm.offset(boundary_values);
  sys.k = k;
  return sys;
}

class SMatrix::LU : public Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> {
 public:
  double min_abs_pivot() const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < this->cols(); ++j) {
      double d = 0.0;
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it) {
        if (it.index() == j) {
          d = std::abs(it.value());
          break;
        }
      }
      m = std::min(m, d);
    }
    return m;
  }
};

SMatrix::SMatrix(const SparseMatrix& A, const SparseMatrix& B, double alpha, double beta)
    : rows_B_(B.rows()), N_(B.cols()), M_(A.rows()) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("SMatrix: alpha and beta must be positive");
  if (A.cols() != B.cols()) throw std::invalid_argument("SMatrix: A and B column counts differ");
  const Eigen::SparseMatrix<double> Bc = B;
  const Eigen::SparseMatrix<double> Ac = A;
  const Eigen::SparseMatrix<double> BtB = Eigen::SparseMatrix<double>(Bc.transpose() * Bc);

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(rows_B_ + 2 * Bc.nonZeros() + BtB.nonZeros() + 2 * Ac.nonZeros()));
  const Eigen::Index r2 = rows_B_, r3 = rows_B_ + N_;
  for (Eigen::Index i = 0; i < rows_B_; ++i) t.emplace_back(i, i, 1.0);
  for (Eigen::Index j = 0; j < Bc.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Bc, j); it; ++it) t.emplace_back(it.row(), r2 + it.col(), -it.value());
  for (Eigen::Index j = 0; j < BtB.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(BtB, j); it; ++it)
      t.emplace_back(r2 + it.row(), r2 + it.col(), alpha * it.value());
  for (Eigen::Index j = 0; j < Ac.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it) {
      t.emplace_back(r2 + it.col(), r3 + it.row(), beta * it.value());
      t.emplace_back(r3 + it.row(), r2 + it.col(), beta * it.value());
    }
  }
  S_.resize(rows_B_ + N_ + M_, rows_B_ + N_ + M_);
  S_.setFromTriplets(t.begin(), t.end());
  S_.makeCompressed();

  lu_ = std::make_shared<LU>();
  lu_->analyzePattern(S_);
  lu_->factorize(S_);
  if (lu_->info() != Eigen::Success) {
    throw std::runtime_error("SMatrix: factorization failed: " + lu_->lastErrorMessage());
  }
}

double SMatrix::min_relative_pivot() const {
  double smax = 0.0;
  for (Eigen::Index j = 0; j < S_.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S_, j); it; ++it) smax = std::max(smax, std::abs(it.value()));
  return lu_->min_abs_pivot() / smax;
}

Eigen::VectorXd SMatrix::solve(const Eigen::VectorXd& b) const {
  if (b.size() != dim()) throw std::invalid_argument("SMatrix::solve: length mismatch");
  Eigen::VectorXd v = lu_->solve(b);
  if (lu_->info() != Eigen::Success) throw std::runtime_error("SMatrix::solve: solve failed");
  return v;
}

namespace {

void check_state(const SaddleState& s, const P1System& sys) {
  if (s.y.size() != sys.B.rows() || s.u.size() != sys.B.cols() || s.x.size() != sys.A.rows()) {
    throw std::invalid_argument("saddle state dimensions do not match the assembled systems");
  }
}

// prox of (1/alpha) phi at B u + c + y.
Eigen::VectorXd prox_at(const SaddleState& s, const P1System& sys, double alpha, prox::Method method,
                        Eigen::VectorXd* point = nullptr) {
  Eigen::VectorXd q = sys.B * s.u + sys.c + s.y;
  Eigen::VectorXd p = prox::prox_phi(method, q, alpha, sys.k);
  if (point) *point = std::move(q);
  return p;
}

Eigen::VectorXd bn_from(const SaddleState& s, const P1System& sys, double alpha, double beta,
                        const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  const Eigen::Index R = sys.B.rows(), N = sys.B.cols(), M = sys.A.rows();
  Eigen::VectorXd b(R + N + M);
  b.head(R) = -(sys.B * s.u) + (q - p);
  b.segment(R, N) = alpha * (sys.B.transpose() * (p - sys.c)) + beta * (sys.A.transpose() * s.x);
  b.tail(M) = beta * sys.f;
  return b;
}

FixedPointResiduals residuals_from(const SaddleState& s, const P1System& sys, double alpha, double beta,
                                   const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  FixedPointResiduals r;
  r.r1 = (beta * (sys.A.transpose() * s.x) + alpha * (sys.B.transpose() * s.y)).lpNorm<Eigen::Infinity>();
  r.r2 = (s.y - (q - p)).lpNorm<Eigen::Infinity>();
  r.r3 = (sys.A * s.u - sys.f).lpNorm<Eigen::Infinity>();
  return r;
}

}  // namespace

double FixedPointResiduals::max() const { return std::max({r1, r2, r3}); }

Eigen::VectorXd make_bn(const SaddleState& state, const P1System& sys, double alpha, double beta,
                        prox::Method method) {
  check_state(state, sys);
  Eigen::VectorXd q;
  const Eigen::VectorXd p = prox_at(state, sys, alpha, method, &q);
  return bn_from(state, sys, alpha, beta, q, p);
}

SaddleState fixed_point_step(const SaddleState& state, const SMatrix& S, const Eigen::VectorXd& bn) {
  const Eigen::VectorXd v = S.solve(bn);
  SaddleState next;
  next.y = v.head(S.rows_B());
  next.u = v.segment(S.rows_B(), S.N());
  next.x = v.tail(S.M());
  next.iteration = state.iteration + 1;
  return next;
}

FixedPointResiduals fixed_point_residuals(const SaddleState& state, const P1System& sys, double alpha, double beta,
                                          prox::Method method) {
  check_state(state, sys);
  Eigen::VectorXd q;
  const Eigen::VectorXd p = prox_at(state, sys, alpha, method, &q);
  return residuals_from(state, sys, alpha, beta, q, p);
}

P1Result solve_p1(const P1System& sys, const SolverConfig& cfg, const SaddleState* start) {
  cfg.validate();
  const SMatrix S(sys.A, sys.B, cfg.alpha, cfg.beta);
  return solve_p1(sys, S, cfg, start);
}

P1Result solve_p1(const P1System& sys, const SMatrix& S, const SolverConfig& cfg, const SaddleState* start) {
  cfg.validate();
  if (cfg.prox == prox::Method::ExactK1 && sys.k != 1) {
    throw std::invalid_argument("solve_p1: exact prox requires blocks of size 2");
  }
  SaddleState state = start ? *start : SaddleState::zero(sys.B.rows(), sys.B.cols(), sys.A.rows());
  check_state(state, sys);

  P1Result res;
  // Stability energies, z = B u + c:
  //  from v^0:  |y^n|^2 + |z^n|^2 + sum_{i<n} |dz^i|^2 + |dy^i|^2  against |y^0|^2 + |z^0|^2
  //  increments from v^1 (d = v^{i+1} - v^i):
  //             |dy^n|^2 + |dz^n|^2 + sum_{1<=i<n} |dy^{i+1} - dy^i|^2 + |dz^{i+1} - dz^i|^2  against |dy^1|^2 + |dz^1|^2
  Eigen::VectorXd z_prev = sys.B * state.u + sys.c, y_prev = state.y;
  Eigen::VectorXd dz_prev, dy_prev;
  const double energy_base = y_prev.squaredNorm() + z_prev.squaredNorm();
  double energy_sum = 0.0, incr_base = 0.0, incr_sum = 0.0;

  // The step conserves g = beta A^T x + alpha B^T y exactly. Rounding errors in g would
  // otherwise accumulate, so beta A^T x^n is formed as g^0 - alpha B^T y^n.
  const Eigen::VectorXd g0 = cfg.beta * (sys.A.transpose() * state.x) + cfg.alpha * (sys.B.transpose() * state.y);
  const Eigen::Index R = sys.B.rows(), N = sys.B.cols();

  Eigen::VectorXd q, p;
  p = prox_at(state, sys, cfg.alpha, cfg.prox, &q);
  for (long it = 0; it < cfg.max_iters; ++it) {
    Eigen::VectorXd bn = bn_from(state, sys, cfg.alpha, cfg.beta, q, p);
    bn.segment(R, N) = cfg.alpha * (sys.B.transpose() * (p - sys.c - state.y)) + g0;
    SaddleState next = fixed_point_step(state, S, bn);

    const double step = (next.stacked() - state.stacked()).norm() / (1.0 + state.stacked().norm());
    res.step_history.push_back(step);

    const Eigen::VectorXd z = sys.B * next.u + sys.c;
    const Eigen::VectorXd dz = z - z_prev, dy = next.y - y_prev;
    energy_sum += dz.squaredNorm() + dy.squaredNorm();
    res.max_energy_excess =
        std::max(res.max_energy_excess, next.y.squaredNorm() + z.squaredNorm() + energy_sum - energy_base);
    if (state.iteration >= 1) {
      if (dz_prev.size() == 0) {
        incr_base = dz.squaredNorm() + dy.squaredNorm();
        res.increment_energy_base = incr_base;
      } else {
        incr_sum += (dz - dz_prev).squaredNorm() + (dy - dy_prev).squaredNorm();
        res.max_increment_energy_excess =
            std::max(res.max_increment_energy_excess, dz.squaredNorm() + dy.squaredNorm() + incr_sum - incr_base);
      }
      dz_prev = dz;
      dy_prev = dy;
    }
    z_prev = z;
    y_prev = next.y;

    state = std::move(next);
    p = prox_at(state, sys, cfg.alpha, cfg.prox, &q);
    res.residuals = residuals_from(state, sys, cfg.alpha, cfg.beta, q, p);
    res.max_constraint = std::max(res.max_constraint, res.residuals.r3);
    res.max_first_equation = std::max(res.max_first_equation, res.residuals.r1);
    res.last_step = step;
    res.iterations = state.iteration;

    if (step <= cfg.tol && res.residuals.max() <= cfg.residual_tol) {
      res.converged = true;
      break;
    }
  }

  if (cfg.prox == prox::Method::WeightedL1 && sys.k <= 3) {
    res.r2_exact_prox = fixed_point_residuals(state, sys, cfg.alpha, cfg.beta, prox::Method::Oracle).r2;
  }
  res.state = std::move(state);
  return res;
}

P2Result solve_p2(const StabilizerP2& s2, const ConstraintSystem& cs, const Eigen::VectorXd& boundary_values) {
  const Eigen::Index N = s2.S.rows(), M = cs.A.rows();
  if (cs.A.cols() != N) throw std::invalid_argument("solve_p2: dimension mismatch");
  const Eigen::SparseMatrix<double> Sc = s2.S;
  const Eigen::SparseMatrix<double> Ac = cs.A;

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(Sc.nonZeros() + 2 * Ac.nonZeros()));
  for (Eigen::Index j = 0; j < Sc.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Sc, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index j = 0; j < Ac.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it) {
      t.emplace_back(it.col(), N + it.row(), it.value());
      t.emplace_back(N + it.row(), it.col(), it.value());
    }
  }
  Eigen::SparseMatrix<double> K(N + M, N + M);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + M);
  if (boundary_values.size() > 0) rhs.head(N) = -(s2.S_boundary * boundary_values);
  rhs.tail(M) = cs.rhs(boundary_values);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("solve_p2: singular saddle system (mesh too coarse?): " + lu.lastErrorMessage());
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite()) throw std::runtime_error("solve_p2: solve failed");

  P2Result out;
  out.u = sol.head(N);
  out.lambda = sol.tail(M);
  out.residual_stationarity = (s2.S * out.u + cs.A.transpose() * out.lambda - rhs.head(N)).lpNorm<Eigen::Infinity>();
  out.residual_constraint = (cs.A * out.u - rhs.tail(M)).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace lpwg
