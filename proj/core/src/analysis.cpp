#include "lpwg/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "lpwg/stabilizer.hpp"

namespace lpwg {

double ProblemCase::f(const Vec2& x) const {
  const Eigen::Matrix2d A = a(x);
  const Eigen::Matrix2d H = hess_u(x);
  return (A.array() * H.array()).sum();
}

CoefficientField ProblemCase::coefficients() const {
  auto self = *this;
  return CoefficientField{a, [self](const Vec2& x) { return self.f(x); }};
}

void ProblemCase::check_n(int n) const {
  if (n < 1) throw std::invalid_argument("mesh parameter n must be positive");
  if (even_n_only && n % 2 != 0) {
    throw std::invalid_argument("case '" + name + "' needs even n (coefficient jumps along x = 1/2, y = 1/2)");
  }
}

namespace {

constexpr double kPi = std::numbers::pi;

ProblemCase sine_case() {
  ProblemCase pc;
  pc.u = [](const Vec2& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  pc.grad_u = [](const Vec2& x) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()), kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  pc.hess_u = [](const Vec2& x) {
    const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
    const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
    Eigen::Matrix2d H;
    H << -kPi * kPi * sx * sy, kPi * kPi * cx * cy, kPi * kPi * cx * cy, -kPi * kPi * sx * sy;
    return H;
  };
  return pc;
}

// g(s) = s (1 - e^{1-s}) and its derivatives
double g0(double s) { return s * (1.0 - std::exp(1.0 - s)); }
double g1(double s) { return 1.0 - std::exp(1.0 - s) + s * std::exp(1.0 - s); }
double g2(double s) { return (2.0 - s) * std::exp(1.0 - s); }

Eigen::Matrix2d const_a(const Vec2&) {
  Eigen::Matrix2d A;
  A << 1.0, 1.0, 1.0, 6.0;
  return A;
}

}  // namespace

ProblemCase builtin_case(std::string_view name) {
  if (name == "const") {
    ProblemCase pc = sine_case();
    pc.name = "const";
    pc.description = "constant coefficients a = [1 1; 1 6], u = sin(pi x) sin(pi y)";
    pc.a = const_a;
    return pc;
  }
  if (name == "var") {
    ProblemCase pc = sine_case();
    pc.name = "var";
    pc.description = "variable coefficients a = [1+x, xy/2; xy/2, 1+y], u = sin(pi x) sin(pi y)";
    pc.a = [](const Vec2& x) {
      Eigen::Matrix2d A;
      A << 1.0 + x.x(), 0.5 * x.x() * x.y(), 0.5 * x.x() * x.y(), 1.0 + x.y();
      return A;
    };
    return pc;
  }
  if (name == "disc") {
    ProblemCase pc;
    pc.name = "disc";
    pc.description = "discontinuous coefficients a = [2, s; s, 2], s = sign(x-1/2) sign(y-1/2), u = xy(1-e^{1-x})(1-e^{1-y})";
    pc.even_n_only = true;
    pc.a = [](const Vec2& x) {
      const double s = (x.x() < 0.5 ? -1.0 : 1.0) * (x.y() < 0.5 ? -1.0 : 1.0);
      Eigen::Matrix2d A;
      A << 2.0, s, s, 2.0;
      return A;
    };
    pc.u = [](const Vec2& x) { return g0(x.x()) * g0(x.y()); };
    pc.grad_u = [](const Vec2& x) { return Vec2(g1(x.x()) * g0(x.y()), g0(x.x()) * g1(x.y())); };
    pc.hess_u = [](const Vec2& x) {
      Eigen::Matrix2d H;
      const double xy = g1(x.x()) * g1(x.y());
      H << g2(x.x()) * g0(x.y()), xy, xy, g0(x.x()) * g2(x.y());
      return H;
    };
    return pc;
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "' (expected const, var or disc)");
}

std::vector<std::string> builtin_case_names() { return {"const", "var", "disc"}; }

ProblemCase quadratic_case() {
  ProblemCase pc;
  pc.name = "quadratic";
  pc.description = "constant coefficients a = [1 1; 1 6], u = x^2 + y^2";
  pc.a = const_a;
  pc.u = [](const Vec2& x) { return x.squaredNorm(); };
  pc.grad_u = [](const Vec2& x) { return Vec2(2.0 * x); };
  pc.hess_u = [](const Vec2&) { return Eigen::Matrix2d(2.0 * Eigen::Matrix2d::Identity()); };
  return pc;
}

Discretization Discretization::build(const ProblemCase& pc, int n, const SpaceConfig& cfg) {
  pc.check_n(n);
  cfg.validate();
  Discretization d;
  d.mesh = std::make_shared<const Mesh>(build_uniform(n));
  d.space = std::make_shared<const FeSpace>(d.mesh, cfg);
  d.constraint = assemble_A(*d.space, pc.coefficients());
  d.boundary_values = project_boundary(*d.space, pc.u);
  return d;
}

SolveOutcome solve_discretization(const Discretization& d, int p, const SolverConfig& cfg) {
  const FeSpace& space = *d.space;
  SolveOutcome out;
  out.uh.boundary = d.boundary_values;
  if (p == 1) {
    const BMatrix bm = assemble_B(space, 1);
    const P1System sys = P1System::from(d.constraint, bm, d.boundary_values, space.k());
    out.p1 = solve_p1(sys, cfg);
    out.uh.free = out.p1.state.u;
    out.converged = out.p1.converged;
    out.iterations = out.p1.iterations;
    out.residuals = out.p1.residuals;
  } else if (p == 2) {
    const StabilizerP2 s2 = assemble_stabilizer_p2(space);
    out.p2 = solve_p2(s2, d.constraint, d.boundary_values);
    out.uh.free = out.p2.u;
    out.residuals.r1 = out.p2.residual_stationarity;
    out.residuals.r3 = out.p2.residual_constraint;
  } else {
    throw std::invalid_argument("solve: p must be 1 or 2");
  }
  return out;
}

namespace {

double finish_norm(double acc, double p) { return p == kInfinity ? acc : std::pow(acc, 1.0 / p); }

void accumulate(double& acc, double value, double weight, double p) {
  if (p == kInfinity) {
    acc = std::max(acc, std::abs(value));
  } else {
    acc += weight * std::pow(std::abs(value), p);
  }
}

void check_norm_p(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("error norm: p must be >= 1");
}

}  // namespace

double error_lp(const FeSpace& space, const WeakFunction& uh, const ProblemCase& pc, double p) {
  check_norm_p(p);
  double acc = 0.0;
  for (int t = 0; t < space.mesh().num_elements(); ++t) {
    for (const QuadPoint& q : space.element_quadrature(t)) {
      accumulate(acc, pc.u(q.x) - eval_v0(space, uh, t, q.x), q.w, p);
    }
  }
  return finish_norm(acc, p);
}

double error_w1p(const FeSpace& space, const WeakFunction& uh, const ProblemCase& pc, double p) {
  check_norm_p(p);
  double acc = 0.0;
  for (int t = 0; t < space.mesh().num_elements(); ++t) {
    for (const QuadPoint& q : space.element_quadrature(t)) {
      accumulate(acc, (pc.grad_u(q.x) - eval_v0_gradient(space, uh, t, q.x)).norm(), q.w, p);
    }
  }
  return finish_norm(acc, p);
}

double discrete_w2p_norm(const FeSpace& space, const WeakFunction& v, const MatrixField& a, double p) {
  check_norm_p(p);
  const int l = space.l();
  double acc = 0.0;
  for (int t = 0; t < space.mesh().num_elements(); ++t) {
    const auto quad = space.element_quadrature(t);
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(space.layout().w_size);
    for (const QuadPoint& q : quad) {
      const Eigen::Matrix2d H = eval_v0_hessian(space, v, t, q.x);
      moments += q.w * (a(q.x).array() * H.array()).sum() * space.basis_values(t, q.x, l);
    }
    const Eigen::VectorXd c = space.element_mass(t, l).llt().solve(moments);
    for (const QuadPoint& q : quad) accumulate(acc, space.basis_values(t, q.x, l).dot(c), q.w, p);
  }
  return eval_s_tilde(space, v, p) + finish_norm(acc, p);
}

double error_w2ph(const FeSpace& space, const WeakFunction& uh, const ProblemCase& pc, double p) {
  WeakFunction e = project_Qh(space, pc.u, pc.grad_u);
  e.free -= uh.free;
  if (uh.boundary.size() == e.boundary.size()) {
    e.boundary -= uh.boundary;
  } else if (uh.boundary.size() != 0) {
    throw std::invalid_argument("error_w2ph: boundary vector length mismatch");
  }
  return discrete_w2p_norm(space, e, pc.a, p);
}

std::vector<double> rates(const std::vector<double>& errors) {
  std::vector<double> r;
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("rates: errors must be positive and finite");
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) r.push_back(std::log2(errors[i] / errors[i + 1]));
  return r;
}

bool ConvergenceTable::converged() const {
  return std::all_of(reports.begin(), reports.end(), [](const ErrorReport& r) { return r.converged; });
}

namespace {

std::vector<double> column(const std::vector<ErrorReport>& reports, double ErrorReport::*field) {
  std::vector<double> v;
  for (const auto& r : reports) v.push_back(r.*field);
  return v;
}

}  // namespace

std::vector<double> ConvergenceTable::rates_L() const { return rates(column(reports, &ErrorReport::e_L)); }
std::vector<double> ConvergenceTable::rates_W1() const { return rates(column(reports, &ErrorReport::e_W1)); }
std::vector<double> ConvergenceTable::rates_W2() const { return rates(column(reports, &ErrorReport::e_W2)); }

ConvergenceTable run_study(const ProblemCase& pc, int p, const SpaceConfig& space_cfg, const std::vector<int>& n_list,
                           const SolverConfig& solver_cfg, const StudyProgress& progress) {
  if (p != 1 && p != 2) throw std::invalid_argument("run_study: p must be 1 or 2");
  space_cfg.validate();
  solver_cfg.validate();
  if (n_list.empty()) throw std::invalid_argument("run_study: empty n list");
  for (int n : n_list) pc.check_n(n);

  ConvergenceTable table;
  table.problem = pc.name;
  table.p = p;
  table.k = space_cfg.k;
  table.l = space_cfg.l;
  for (int n : n_list) {
    const auto t0 = std::chrono::steady_clock::now();
    const Discretization d = Discretization::build(pc, n, space_cfg);
    const SolveOutcome s = solve_discretization(d, p, solver_cfg);
    ErrorReport r;
    r.n = n;
    r.h = d.mesh->h();
    r.e_L = error_lp(*d.space, s.uh, pc, p);
    r.e_W1 = error_w1p(*d.space, s.uh, pc, p);
    r.e_W2 = error_w2ph(*d.space, s.uh, pc, p);
    r.iterations = s.iterations;
    r.r1 = s.residuals.r1;
    r.r2 = s.residuals.r2;
    r.r3 = s.residuals.r3;
    r.converged = s.converged;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    table.reports.push_back(r);
    if (progress) progress(r);
    if (!r.converged) break;
  }
  return table;
}

}  // namespace lpwg
