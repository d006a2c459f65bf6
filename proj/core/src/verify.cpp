#include "lpwg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "lpwg/analysis.hpp"
#include "lpwg/polynomial.hpp"
#include "lpwg/prox.hpp"
#include "lpwg/quadrature.hpp"
#include "lpwg/solver.hpp"
#include "lpwg/stabilizer.hpp"

namespace lpwg {

namespace {

std::string sci(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

CheckResult check(std::string name, double worst, double tol) {
  return CheckResult{std::move(name), worst <= tol, "worst " + sci(worst) + " (tol " + sci(tol) + ")"};
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> U(-scale, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

using ProxFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// max over sampled pairs of |Px - Py|^2 - <Px - Py, x - y>
double firm_nonexpansive_violation(const ProxFn& P, Eigen::Index n, std::mt19937_64& rng, int samples) {
  double worst = -1e300;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = random_vector(rng, n, 3.0), y = random_vector(rng, n, 3.0);
    const Eigen::VectorXd d = P(x) - P(y);
    worst = std::max(worst, d.squaredNorm() - d.dot(x - y));
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  {
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      const Eigen::VectorXd v = random_vector(rng, 2, 3.0);
      worst = std::max(worst, (prox::prox_phi_k1(v, 1.0) - prox::prox_phi_oracle(v, 1.0, 1)).norm());
    }
    out.push_back(check("prox k=1 closed form vs numerical prox", worst, 1e-6));
  }
  {
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      const Eigen::VectorXd v = random_vector(rng, 1, 3.0);
      worst = std::max(worst, (prox::soft_threshold(v, 1.0) - prox::prox_phi_oracle(v, 1.0, 0)).norm());
    }
    out.push_back(check("soft threshold vs numerical prox (k=0)", worst, 1e-8));
  }
  {
    const IntervalRule rule = gauss_legendre(64);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const double a = U(rng), b = U(rng);
      double q = 0.0;
      // split at the root so the rule integrates smooth pieces
      const double r = b != 0.0 ? -a / b : -1.0;
      for (auto [lo, hi] : {std::pair{0.0, std::clamp(r, 0.0, 1.0)}, std::pair{std::clamp(r, 0.0, 1.0), 1.0}}) {
        for (std::size_t i = 0; i < rule.size(); ++i) {
          const double t = lo + (hi - lo) * rule.points[i];
          q += (hi - lo) * rule.weights[i] * std::abs(a + b * t);
        }
      }
      worst = std::max(worst, std::abs(prox::integral_abs_linear(a, b) - q));
    }
    out.push_back(check("integral |a + b s| vs quadrature", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (int n : {1, 2}) {
      const auto mesh = std::make_shared<const Mesh>(build_uniform(n));
      const FeSpace space(mesh, SpaceConfig{});
      const BMatrix bm = assemble_B(space, 1);
      for (int s = 0; s < 20; ++s) {
        WeakFunction v = space.zero_function();
        v.free = random_vector(rng, v.free.size(), 1.0);
        v.boundary = random_vector(rng, v.boundary.size(), 1.0);
        const double sv = eval_s(space, v, 1.0);
        worst = std::max(worst, std::abs(eval_phi(bm.apply(v), space.k()) - sv) / std::max(1.0, sv));
      }
    }
    out.push_back(check("phi(Bv) = s(v) for p = 1", worst, 1e-9));
  }
  {
    const auto mesh = std::make_shared<const Mesh>(build_uniform(2));
    const FeSpace space(mesh, SpaceConfig{});
    // degree 6: beyond P_k, still integrated exactly by the element and edge rules
    const ScalarField u = [](const Vec2& x) {
      return std::pow(x.x(), 4) * x.y() * x.y() + x.x() * std::pow(x.y(), 3) - 2.0 * std::pow(x.x(), 5) + x.y();
    };
    const VectorField grad_u = [](const Vec2& x) {
      return Vec2(4.0 * std::pow(x.x(), 3) * x.y() * x.y() + std::pow(x.y(), 3) - 10.0 * std::pow(x.x(), 4),
                  2.0 * std::pow(x.x(), 4) * x.y() + 3.0 * x.x() * x.y() * x.y() + 1.0);
    };
    const auto hess_u = [](const Vec2& x) {
      Eigen::Matrix2d H;
      const double xy = 8.0 * std::pow(x.x(), 3) * x.y() + 3.0 * x.y() * x.y();
      H << 12.0 * x.x() * x.x() * x.y() * x.y() - 40.0 * std::pow(x.x(), 3), xy, xy,
          2.0 * std::pow(x.x(), 4) + 6.0 * x.x() * x.y();
      return H;
    };
    const WeakFunction qu = project_Qh(space, u, grad_u);
    double worst = 0.0;
    for (int t = 0; t < mesh->num_elements(); ++t) {
      const Eigen::VectorXd local = space.gather(qu, t);
      const Eigen::MatrixXd mass = space.element_mass(t, space.l());
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const Eigen::VectorXd weak = local_weak_hessian(space, t, i, j) * local;
          Eigen::VectorXd moments = Eigen::VectorXd::Zero(mass.rows());
          for (const QuadPoint& q : space.element_quadrature(t)) {
            moments += q.w * hess_u(q.x)(i, j) * space.basis_values(t, q.x, space.l());
          }
          worst = std::max(worst, (weak - mass.llt().solve(moments)).lpNorm<Eigen::Infinity>());
        }
      }
    }
    out.push_back(check("weak Hessian of Q_h u equals projected Hessian", worst, 1e-9));
  }
  {
    bool ok = true;
    std::string detail;
    for (int n : {1, 2}) {
      const auto mesh = std::make_shared<const Mesh>(build_uniform(n));
      const FeSpace space(mesh, SpaceConfig{});
      const ConstraintSystem cs = assemble_A(space, builtin_case("const").coefficients());
      const Eigen::MatrixXd At = Eigen::MatrixXd(cs.A).transpose();
      const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(At);
      const auto rank = qr.rank();
      ok = ok && rank == cs.A.rows();
      detail += "n=" + std::to_string(n) + ": rank " + std::to_string(rank) + "/" + std::to_string(cs.A.rows()) + " ";
    }
    out.push_back(CheckResult{"A has full row rank", ok, detail});
  }
  {
    const auto mesh = std::make_shared<const Mesh>(build_uniform(1));
    const FeSpace space(mesh, SpaceConfig{});
    const ConstraintSystem cs = assemble_A(space, builtin_case("const").coefficients());
    const BMatrix bm = assemble_B(space, 1);
    double worst = 1e300;
    bool ok = true;
    for (double a : {0.5, 1.0, 2.0}) {
      for (double b : {0.5, 1.0, 2.0}) {
        try {
          const SMatrix S(cs.A, bm.B, a, b);
          worst = std::min(worst, S.min_relative_pivot());
        } catch (const std::exception&) {
          ok = false;
        }
      }
    }
    out.push_back(CheckResult{"S factorizes for alpha, beta in {0.5, 1, 2}", ok && worst > 1e-12,
                              "smallest relative pivot " + sci(worst)});
  }
  {
    const ProblemCase pc = quadratic_case();
    const Discretization d = Discretization::build(pc, 2, SpaceConfig{});
    const SolveOutcome s = solve_discretization(d, 2, SolverConfig{});
    const WeakFunction qu = project_Qh(*d.space, pc.u, pc.grad_u);
    const double err = (s.uh.free - qu.free).lpNorm<Eigen::Infinity>();
    out.push_back(check("p = 2 solve reproduces quadratic u", err, 1e-9));
  }
  {
    const int samples = 200;
    double worst = -1e300;
    worst = std::max(worst, firm_nonexpansive_violation(
                                [](const Eigen::VectorXd& v) { return prox::prox_phi_k1(v, 1.0); }, 2, rng, samples));
    worst = std::max(worst, firm_nonexpansive_violation(
                                [](const Eigen::VectorXd& v) { return prox::soft_threshold(v, 1.0); }, 3, rng, samples));
    worst = std::max(worst, firm_nonexpansive_violation(
                                [](const Eigen::VectorXd& v) { return prox::prox_phi_weighted_l1(v, 1.0, 2); }, 3, rng,
                                samples));
    worst = std::max(worst, firm_nonexpansive_violation(
                                [](const Eigen::VectorXd& v) { return prox::prox_phi_oracle(v, 1.0, 2); }, 3, rng,
                                samples));
    out.push_back(check("every prox is firmly nonexpansive", worst, 1e-10));
  }
  return out;
}

}  // namespace lpwg
