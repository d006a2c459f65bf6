#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lpwg/fe_space.hpp"
#include "lpwg/solver.hpp"
#include "lpwg/weak_assembly.hpp"

namespace lpwg {

/// Manufactured-solution test problem on the unit square.
struct ProblemCase {
  std::string name;
  std::string description;
  MatrixField a;
  ScalarField u;
  VectorField grad_u;
  MatrixField hess_u;
  /// Coefficient discontinuous across x = 1/2 and y = 1/2: meshes need even n.
  bool even_n_only = false;

  /// f = sum_ij a_ij d2_ij u, evaluated pointwise.
  double f(const Vec2& x) const;
  CoefficientField coefficients() const;
  /// Throws std::invalid_argument when n is not admissible for this case.
  void check_n(int n) const;
};

/// "const", "var" or "disc". Throws std::invalid_argument otherwise.
ProblemCase builtin_case(std::string_view name);
std::vector<std::string> builtin_case_names();

/// u = x^2 + y^2 with the constant coefficients of "const" (f = 14). u does not
/// vanish on the boundary; solves lift the boundary trace of u.
ProblemCase quadratic_case();

/// Assembled discretization of a case on the uniform n x n mesh.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FeSpace> space;
  ConstraintSystem constraint;
  Eigen::VectorXd boundary_values;  // Q_b u on boundary edges

  static Discretization build(const ProblemCase& pc, int n, const SpaceConfig& cfg);
};

struct SolveOutcome {
  WeakFunction uh;
  bool converged = true;
  long iterations = 0;
  FixedPointResiduals residuals;
  P1Result p1;  // populated for p = 1
  P2Result p2;  // populated for p = 2
};

/// p = 1: fixed-point iteration; p = 2: direct saddle solve.
SolveOutcome solve_discretization(const Discretization& d, int p, const SolverConfig& cfg);

/// |u - u0|_{0,p} by element quadrature (max over quadrature points for p = inf).
double error_lp(const FeSpace& space, const WeakFunction& uh, const ProblemCase& pc, double p);
/// |grad u - grad u0|_{0,p}, Euclidean pointwise norm.
double error_w1p(const FeSpace& space, const WeakFunction& uh, const ProblemCase& pc, double p);
/// s~(e_h) + |Q_W L e0|_{0,p} with e_h = Q_h u - u_h.
double error_w2ph(const FeSpace& space, const WeakFunction& uh, const ProblemCase& pc, double p);
/// Discrete W^{2,p} norm s~(v) + |Q_W L v0|_{0,p} of a weak function.
double discrete_w2p_norm(const FeSpace& space, const WeakFunction& v, const MatrixField& a, double p);

/// r_i = log2(e_i / e_{i+1}). Throws std::invalid_argument on a non-positive error.
std::vector<double> rates(const std::vector<double>& errors);

struct ErrorReport {
  int n = 0;
  double h = 0.0;
  double e_L = 0.0;
  double e_W1 = 0.0;
  double e_W2 = 0.0;
  long iterations = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double wall_time = 0.0;
  bool converged = true;
};

struct ConvergenceTable {
  std::string problem;
  int p = 2;
  int k = 2;
  int l = 1;
  std::vector<ErrorReport> reports;

  bool converged() const;
  std::vector<double> rates_L() const;
  std::vector<double> rates_W1() const;
  std::vector<double> rates_W2() const;
};

using StudyProgress = std::function<void(const ErrorReport&)>;

/// Solves and measures every n in order. Stops after the first unconverged
/// level, leaving a partial table.
ConvergenceTable run_study(const ProblemCase& pc, int p, const SpaceConfig& space_cfg, const std::vector<int>& n_list,
                           const SolverConfig& solver_cfg, const StudyProgress& progress = {});

}  // namespace lpwg
