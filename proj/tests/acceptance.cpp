// Acceptance suite: one PASS/FAIL line per criterion. A FAIL whose only failing
// checks are listed deviations is tagged "[known deviation]" and does not set the
// exit status.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>

#include "lpwg/analysis.hpp"
#include "lpwg/prox.hpp"
#include "lpwg/solver.hpp"
#include "lpwg/stabilizer.hpp"
#include "test_support.hpp"

namespace {

using namespace lpwg;

struct Check {
  std::string what;
  bool ok = false;
  bool deviation = false;
};

struct Criterion {
  std::vector<Check> checks;
  std::vector<std::string> notes;

  void add(std::string what, bool ok, bool deviation = false) { checks.push_back({std::move(what), ok, deviation}); }
  void note(std::string s) { notes.push_back(std::move(s)); }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::string fix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string join(const std::vector<double>& v, std::string (*fmt)(double)) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

bool all_in(const std::vector<double>& v, double lo, double hi) {
  for (double x : v)
    if (!(x >= lo && x <= hi)) return false;
  return !v.empty();
}

// ---------------------------------------------------------------------------

Criterion polynomial_exactness() {
  Criterion c;
  const ProblemCase pc = quadratic_case();
  for (int p : {1, 2}) {
    for (int n : {1, 2, 4}) {
      const Discretization d = Discretization::build(pc, n, SpaceConfig{});
      const SolveOutcome s = solve_discretization(d, p, SolverConfig{});
      const WeakFunction qu = project_Qh(*d.space, pc.u, pc.grad_u);
      const double err = (s.uh.free - qu.free).lpNorm<Eigen::Infinity>();
      const double sv = eval_s(*d.space, s.uh, static_cast<double>(p));
      const double tol = p == 1 ? 1e-6 : 1e-9;
      const std::string tag = "p=" + std::to_string(p) + " n=" + std::to_string(n);
      c.add(tag + " converged", s.converged);
      c.add(tag + " |u_h - Q_h u|_inf = " + sci(err), err <= tol);
      c.add(tag + " s(u_h) = " + sci(sv), sv <= 1e-8);
    }
  }
  return c;
}

ConvergenceTable p2_study(const std::string& name) {
  return run_study(builtin_case(name), 2, SpaceConfig{}, {8, 16, 32}, SolverConfig{});
}

Criterion smooth_table(const std::string& name, double paper_l2_32) {
  Criterion c;
  const ConvergenceTable t = p2_study(name);
  const auto rl = t.rates_L(), r1 = t.rates_W1(), r2 = t.rates_W2();
  c.add("L2 rates [" + join(rl, fix) + "] in [2.7, 3.6]", all_in(rl, 2.7, 3.6));
  c.add("W12 rates [" + join(r1, fix) + "] in [1.8, 2.6]", all_in(r1, 1.8, 2.6));
  c.add("W22h rates [" + join(r2, fix) + "] in [0.7, 1.2]", all_in(r2, 0.7, 1.2));
  if (paper_l2_32 > 0.0) {
    const double e = t.reports.back().e_L;
    c.add("L2 error at n=32 " + sci(e) + " within 3x of " + sci(paper_l2_32),
          e <= 3.0 * paper_l2_32 && e >= paper_l2_32 / 3.0);
  }
  return c;
}

Criterion discontinuous_table() {
  Criterion c;
  const ConvergenceTable t = p2_study("disc");
  const auto rl = t.rates_L(), r1 = t.rates_W1(), r2 = t.rates_W2();
  c.add("W12 rates [" + join(r1, fix) + "] in [1.9, 2.2]", all_in(r1, 1.9, 2.2));
  c.add("W22h rates [" + join(r2, fix) + "] in [0.7, 1.1]", all_in(r2, 0.7, 1.1), true);
  c.add("L2 rates [" + join(rl, fix) + "] in [2.3, 2.8]", all_in(rl, 2.3, 2.8));
  c.note("W22h errors: " + sci(t.reports[0].e_W2) + ", " + sci(t.reports[1].e_W2) + ", " + sci(t.reports[2].e_W2));
  return c;
}

Criterion fixed_point_p1() {
  Criterion c;
  const ProblemCase pc = builtin_case("const");
  SolverConfig cfg;
  cfg.max_iters = 1000000;
  std::vector<double> w1;
  for (int n : {4, 8}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Discretization d = Discretization::build(pc, n, SpaceConfig{});
    const SolveOutcome s = solve_discretization(d, 1, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string tag = "n=" + std::to_string(n);
    const P1Result& r = s.p1;
    c.add(tag + " converged in " + std::to_string(r.iterations) + " iterations (" + fix(secs) + " s)", r.converged);
    c.add(tag + " max |Au^n - f|_inf = " + sci(r.max_constraint), r.max_constraint <= 1e-8);
    c.add(tag + " energy from v^0: max excess " + sci(r.max_energy_excess),
          r.max_energy_excess <= 1e-8 * (1.0 + r.increment_energy_base), true);
    c.note(tag + " energy of increments v^{i+1}-v^i, i>=1: max excess " + sci(r.max_increment_energy_excess) +
           " (base " + sci(r.increment_energy_base) + ")");
    w1.push_back(error_w1p(*d.space, s.uh, pc, 1.0));
  }
  const double rate = std::log2(w1[0] / w1[1]);
  c.add("W11 errors " + sci(w1[0]) + ", " + sci(w1[1]) + " rate " + fix(rate) + " in [2.0, 2.9]",
        rate >= 2.0 && rate <= 2.9);
  return c;
}

Criterion prox_correctness() {
  Criterion c;
  std::mt19937_64 rng(17);
  double k1 = 0.0, k0 = 0.0;
  for (int s = 0; s < 200; ++s) {
    const Eigen::VectorXd v2 = testing::random_vector(rng, 2, 3.0);
    k1 = std::max(k1, (prox::prox_phi_k1(v2, 1.0) - prox::prox_phi_oracle(v2, 1.0, 1)).norm());
    const Eigen::VectorXd v1 = testing::random_vector(rng, 1, 3.0);
    k0 = std::max(k0, (prox::soft_threshold(v1, 1.0) - prox::prox_phi_oracle(v1, 1.0, 0)).norm());
  }
  c.add("k=1 closed form vs oracle, 200 blocks: " + sci(k1), k1 <= 1e-6);
  c.add("soft threshold vs oracle (k=0), 200 blocks: " + sci(k0), k0 <= 1e-8);
  c.add("integral_abs_linear examples 3/2, 1/2, 3/2", prox::integral_abs_linear(1.0, 1.0) == 1.5 &&
                                                            prox::integral_abs_linear(-1.0, 2.0) == 0.5 &&
                                                            prox::integral_abs_linear(-2.0, 1.0) == 1.5);
  const IntervalRule g64 = gauss_legendre(64);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const double a = U(rng), b = U(rng);
    const double r = std::clamp(b != 0.0 ? -a / b : 0.0, 0.0, 1.0);
    double q = 0.0;
    for (auto [lo, hi] : {std::pair{0.0, r}, std::pair{r, 1.0}})
      for (std::size_t i = 0; i < g64.size(); ++i)
        q += (hi - lo) * g64.weights[i] * std::abs(a + b * (lo + (hi - lo) * g64.points[i]));
    worst = std::max(worst, std::abs(prox::integral_abs_linear(a, b) - q));
  }
  c.add("integral_abs_linear vs 64-point Gauss, 1000 pairs: " + sci(worst), worst <= 1e-10);
  return c;
}

Criterion structural() {
  Criterion c;
  std::mt19937_64 rng(23);
  {
    const ProblemCase pc = builtin_case("const");
    double worst = 0.0;
    for (int n : {4, 8}) {
      const auto mesh = std::make_shared<const Mesh>(build_uniform(n));
      const FeSpace space(mesh, SpaceConfig{});
      const WeakFunction qu = project_Qh(space, pc.u, pc.grad_u);
      for (int t = 0; t < mesh->num_elements(); ++t) {
        const Eigen::VectorXd local = space.gather(qu, t);
        const Eigen::MatrixXd mass = space.element_mass(t, space.l());
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            Eigen::VectorXd moments = Eigen::VectorXd::Zero(mass.rows());
            for (const QuadPoint& q : space.element_quadrature(t))
              moments += q.w * pc.hess_u(q.x)(i, j) * space.basis_values(t, q.x, space.l());
            const Eigen::VectorXd d = local_weak_hessian(space, t, i, j) * local - mass.ldlt().solve(moments);
            worst = std::max(worst, std::sqrt(d.dot(mass * d)));
          }
        }
      }
    }
    c.add("weak Hessian of Q_h u = projected Hessian, n in {4,8}: L2 " + sci(worst), worst <= 1e-9);
  }
  {
    double worst = 0.0;
    for (int n : {1, 2, 4}) {
      const auto mesh = std::make_shared<const Mesh>(build_uniform(n));
      const FeSpace space(mesh, SpaceConfig{});
      const BMatrix bm = assemble_B(space, 1);
      for (int s = 0; s < 100; ++s) {
        const WeakFunction v = testing::random_weak_function(space, rng);
        const double sv = eval_s(space, v, 1.0);
        worst = std::max(worst, std::abs(eval_phi(bm.apply(v), space.k()) - sv) / sv);
      }
    }
    c.add("phi(Bv) = s(v), 100 random v per n in {1,2,4}: relative " + sci(worst), worst <= 1e-9);
  }
  for (int n : {1, 2}) {
    const auto mesh = std::make_shared<const Mesh>(build_uniform(n));
    const FeSpace space(mesh, SpaceConfig{});
    const ConstraintSystem cs = assemble_A(space, builtin_case("const").coefficients());
    const auto rank = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd(cs.A).transpose()).rank();
    c.add("A rank at n=" + std::to_string(n) + ": " + std::to_string(rank) + "/" + std::to_string(cs.A.rows()),
          rank == cs.A.rows());
    if (n == 1) {
      const BMatrix bm = assemble_B(space, 1);
      double smallest = 1e300;
      bool ok = true;
      for (double a : {0.5, 1.0, 2.0}) {
        for (double b : {0.5, 1.0, 2.0}) {
          try {
            smallest = std::min(smallest, SMatrix(cs.A, bm.B, a, b).min_relative_pivot());
          } catch (const std::exception&) {
            ok = false;
          }
        }
      }
      c.add("S factorizes for alpha, beta in {0.5,1,2}^2, smallest relative pivot " + sci(smallest),
            ok && smallest > 1e-12);
    }
  }
  {
    using Op = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
    const std::vector<std::pair<Eigen::Index, Op>> ops{
        {4, [](const Eigen::VectorXd& v) { return prox::prox_phi_k1(v, 1.0); }},
        {3, [](const Eigen::VectorXd& v) { return prox::soft_threshold(v, 1.0); }},
        {6, [](const Eigen::VectorXd& v) { return prox::prox_phi_weighted_l1(v, 1.0, 2); }},
        {3, [](const Eigen::VectorXd& v) { return prox::prox_phi_oracle(v, 1.0, 2); }},
        {5, [](const Eigen::VectorXd& v) { return prox::prox_indicator(v, Eigen::VectorXd::Ones(5)); }},
    };
    double worst = -1e300;
    for (const auto& [n, P] : ops) {
      for (int s = 0; s < 200; ++s) {
        const Eigen::VectorXd x = testing::random_vector(rng, n, 3.0), y = testing::random_vector(rng, n, 3.0);
        const Eigen::VectorXd d = P(x) - P(y);
        worst = std::max(worst, d.squaredNorm() - d.dot(x - y));
      }
    }
    c.add("firm nonexpansiveness of every prox: max violation " + sci(worst), worst <= 1e-12);
  }
  return c;
}

Criterion optimality_sampling() {
  Criterion c;
  const ProblemCase pc = builtin_case("const");
  const Discretization d = Discretization::build(pc, 2, SpaceConfig{});
  const BMatrix bm = assemble_B(*d.space, 1);
  const P1System sys = P1System::from(d.constraint, bm, d.boundary_values, d.space->k());
  SolverConfig cfg;
  cfg.prox = prox::Method::Oracle;
  const P1Result r = solve_p1(sys, cfg);
  c.add("oracle-prox fixed point converged in " + std::to_string(r.iterations) + " iterations", r.converged);
  const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(Eigen::MatrixXd(sys.A)).kernel();
  const auto objective = [&](const Eigen::VectorXd& u) { return eval_phi(Eigen::VectorXd(sys.B * u + sys.c), 2); };
  const double base = objective(r.state.u);
  std::mt19937_64 rng(29);
  double worst = 1e300;
  for (int s = 0; s < 20; ++s) {
    Eigen::VectorXd z = kernel * testing::random_vector(rng, kernel.cols());
    z /= z.norm();
    for (double eps : {1e-3, -1e-3, 1e-2, -1e-2}) worst = std::min(worst, objective(r.state.u + eps * z) - base);
  }
  c.add("min over 20 kernel directions of phi(B(u+eps z)) - phi(Bu) = " + sci(worst), worst >= -1e-8);
  c.note("phi(Bu) = " + sci(base) + ", kernel dimension " + std::to_string(kernel.cols()));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
      {"polynomial exactness, p in {1,2}", polynomial_exactness},
      {"constant coefficients, p=2 rates", [] { return smooth_table("const", 1.59e-5); }},
      {"variable coefficients, p=2 rates", [] { return smooth_table("var", -1.0); }},
      {"discontinuous coefficients, p=2 rates", discontinuous_table},
      {"fixed-point iteration, p=1", fixed_point_p1},
      {"prox correctness", prox_correctness},
      {"structural invariants", structural},
      {"optimality sampling at the p=1 fixed point", optimality_sampling},
  };
  bool hard_failure = false;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.add(std::string("exception: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = true, only_deviations = true;
    for (const Check& ch : c.checks) {
      ok = ok && ch.ok;
      if (!ch.ok && !ch.deviation) only_deviations = false;
    }
    std::cout << (ok ? "PASS" : "FAIL") << ' ' << i + 1 << ' ' << criteria[i].first << " (" << fix(secs) << " s)"
              << (!ok && only_deviations ? " [known deviation]" : "") << '\n';
    for (const Check& ch : c.checks)
      std::cout << "    " << (ch.ok ? "ok   " : (ch.deviation ? "dev  " : "FAIL ")) << ch.what << '\n';
    for (const std::string& n : c.notes) std::cout << "    note " << n << '\n';
    std::cout.flush();
    if (!ok && !only_deviations) hard_failure = true;
  }
  return hard_failure ? 1 : 0;
}
