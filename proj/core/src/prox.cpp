#include "lpwg/prox.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lpwg/polynomial.hpp"

namespace lpwg::prox {

double integral_abs_linear(double a, double b) {
  if (a * b >= 0.0) return std::abs(a) + 0.5 * std::abs(b);
  if (b > 0.0) {
    if (a + b <= 0.0) return -a - 0.5 * b;
    return a + 0.5 * b + a * a / b;
  }
  if (a + b >= 0.0) return a + 0.5 * b;
  return -a - 0.5 * b - a * a / b;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& q, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("soft_threshold: tau must be positive");
  Eigen::VectorXd out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double m = std::abs(q(i)) - tau;
    out(i) = m > 0.0 ? std::copysign(m, q(i)) : 0.0;
  }
  return out;
}

namespace {

double upper_arc(double x) { return 0.5 - 0.25 * (1.0 - x) * (1.0 - x); }
double lower_arc(double x) { return 0.25 * (1.0 + x) * (1.0 + x) - 0.5; }

// Projection onto the unit set Omega0.
Vec2 project_unit(const Vec2& p) {
  if (in_omega0(p, 1.0)) return p;

  std::vector<Vec2> candidates{Vec2(-1.0, -0.5), Vec2(1.0, 0.5)};
  // Stationary points of |(x, arc(x)) - p|^2 / 2 in x: (x - px) + (arc - py) arc'.
  const std::array<double, 2> du{0.5, -0.5};
  const std::array<double, 3> upper{0.25 - p.y(), 0.5, -0.25};
  const std::array<double, 2> dl{0.5, 0.5};
  const std::array<double, 3> lower{-0.25 - p.y(), 0.5, 0.25};
  for (int arc = 0; arc < 2; ++arc) {
    auto g = poly::multiply(arc == 0 ? std::span<const double>(upper) : std::span<const double>(lower),
                            arc == 0 ? std::span<const double>(du) : std::span<const double>(dl));
    g[0] -= p.x();
    g[1] += 1.0;
    for (double x : poly::sign_change_roots(g, -1.0, 1.0)) {
      candidates.emplace_back(x, arc == 0 ? upper_arc(x) : lower_arc(x));
    }
  }
  Vec2 best = candidates.front();
  double best_d = (best - p).squaredNorm();
  for (const Vec2& c : candidates) {
    const double d = (c - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

bool in_omega0(const Vec2& p, double c, double tol) {
  const double x = p.x() / c, y = p.y() / c;
  const double t = tol / c;
  return std::abs(x) <= 1.0 + t && y >= lower_arc(x) - t && y <= upper_arc(x) + t;
}

Vec2 project_omega0(const Vec2& p, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("project_omega0: c must be positive");
  return c * project_unit(p / c);
}

Eigen::VectorXd prox_phi_k1(const Eigen::VectorXd& v, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("prox_phi_k1: alpha must be positive");
  if (v.size() % 2 != 0) throw std::invalid_argument("prox_phi_k1: length must be even");
  const double c = 1.0 / alpha;
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); i += 2) {
    const Vec2 b(v(i), v(i + 1));
    out.segment<2>(i) = b - project_omega0(b, c);
  }
  return out;
}

Eigen::VectorXd prox_phi_weighted_l1(const Eigen::VectorXd& v, double alpha, int k) {
  if (!(alpha > 0.0)) throw std::invalid_argument("prox_phi_weighted_l1: alpha must be positive");
  if (k < 0 || v.size() % (k + 1) != 0) throw std::invalid_argument("prox_phi_weighted_l1: bad block size");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const int j = static_cast<int>(i % (k + 1)) + 1;
    const double tau = 1.0 / (alpha * j);
    const double m = std::abs(v(i)) - tau;
    out(i) = m > 0.0 ? std::copysign(m, v(i)) : 0.0;
  }
  return out;
}

namespace {

struct ProxObjective {
  const Eigen::VectorXd& v;
  double tau;

  double value(const Eigen::VectorXd& w) const {
    return 0.5 * (w - v).squaredNorm() +
           tau * poly::integrate_abs_unit(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
  }
};

std::span<const double> coeffs(const Eigen::VectorXd& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

// Moments m_i = int t^i sigma over [0, 1] for sigma = s0 * (-1)^q on the q-th interval cut by r.
Eigen::VectorXd sign_moments(double s0, const std::vector<double>& r, int n) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  double a = 0.0, sign = s0;
  for (std::size_t q = 0; q <= r.size(); ++q) {
    const double b = q < r.size() ? r[q] : 1.0;
    for (int i = 0; i < n; ++i) m(i) += sign * (std::pow(b, i + 1) - std::pow(a, i + 1)) / (i + 1);
    a = b;
    sign = -sign;
  }
  return m;
}

// dm / dr_q for the pattern above.
Eigen::VectorXd moment_derivative(double s0, std::size_t q, double r, int n) {
  Eigen::VectorXd a(n);
  double rp = 2.0 * s0 * (q % 2 == 0 ? 1.0 : -1.0);
  for (int i = 0; i < n; ++i, rp *= r) a(i) = rp;
  return a;
}

struct BoundaryPoint {
  double s0 = 1.0;
  std::vector<double> r;
  double dist2 = std::numeric_limits<double>::infinity();
};

double boundary_dist2(const Eigen::VectorXd& v, double tau, double s0, const std::vector<double>& r) {
  return (v - tau * sign_moments(s0, r, static_cast<int>(v.size()))).squaredNorm();
}

// Local Levenberg-Marquardt on 1/2 |v - tau m(s0, r)|^2 over 0 <= r_1 <= ... <= r_k <= 1.
void refine_boundary_point(const Eigen::VectorXd& v, double tau, BoundaryPoint& b) {
  const int n = static_cast<int>(v.size());
  const std::size_t k = b.r.size();
  if (k == 0) return;
  double mu = 1e-6;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd w = v - tau * sign_moments(b.s0, b.r, n);
    const auto dw = poly::derivative(coeffs(w));
    Eigen::MatrixXd A(n, static_cast<Eigen::Index>(k));
    Eigen::VectorXd grad(static_cast<Eigen::Index>(k));
    for (std::size_t q = 0; q < k; ++q) {
      A.col(static_cast<Eigen::Index>(q)) = tau * moment_derivative(b.s0, q, b.r[q], n);
      grad(static_cast<Eigen::Index>(q)) = -w.dot(A.col(static_cast<Eigen::Index>(q)));
    }
    Eigen::MatrixXd H = A.transpose() * A;
    for (std::size_t q = 0; q < k; ++q) {
      H(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q)) -=
          2.0 * tau * b.s0 * (q % 2 == 0 ? 1.0 : -1.0) * poly::eval(dw, b.r[q]);
    }
    bool moved = false;
    for (int tries = 0; tries < 40 && !moved; ++tries) {
      Eigen::MatrixXd M = H;
      M.diagonal().array() += mu * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      const Eigen::VectorXd d = M.ldlt().solve(-grad);
      std::vector<double> trial(k);
      for (std::size_t q = 0; q < k; ++q) trial[q] = std::clamp(b.r[q] + d(static_cast<Eigen::Index>(q)), 0.0, 1.0);
      std::sort(trial.begin(), trial.end());
      const double d2 = boundary_dist2(v, tau, b.s0, trial);
      if (d2 < b.dist2) {
        moved = trial != b.r;
        b.r = trial;
        b.dist2 = d2;
        mu = std::max(mu * 0.1, 1e-14);
        if (!moved) break;
      } else {
        mu *= 10.0;
      }
    }
    if (!moved) break;
  }
}

// The distance is flat near its minimum, so finish with Newton on the stationarity equations
// w(r_q) = 0, which resolve the switch points to working precision.
void polish_boundary_point(const Eigen::VectorXd& v, double tau, BoundaryPoint& b) {
  const int n = static_cast<int>(v.size());
  const auto k = static_cast<Eigen::Index>(b.r.size());
  if (k == 0) return;
  auto equations = [&](const std::vector<double>& r) {
    const Eigen::VectorXd w = v - tau * sign_moments(b.s0, r, n);
    Eigen::VectorXd e(k);
    for (Eigen::Index l = 0; l < k; ++l) e(l) = poly::eval(coeffs(w), r[static_cast<std::size_t>(l)]);
    return e;
  };
  Eigen::VectorXd e = equations(b.r);
  for (int it = 0; it < 30; ++it) {
    const Eigen::VectorXd w = v - tau * sign_moments(b.s0, b.r, n);
    const auto dw = poly::derivative(coeffs(w));
    Eigen::MatrixXd J(k, k);
    for (Eigen::Index q = 0; q < k; ++q) {
      const Eigen::VectorXd a = tau * moment_derivative(b.s0, static_cast<std::size_t>(q), b.r[static_cast<std::size_t>(q)], n);
      for (Eigen::Index l = 0; l < k; ++l) J(l, q) = -poly::eval(coeffs(a), b.r[static_cast<std::size_t>(l)]);
    }
    for (Eigen::Index l = 0; l < k; ++l) J(l, l) += poly::eval(dw, b.r[static_cast<std::size_t>(l)]);
    const Eigen::VectorXd d = J.colPivHouseholderQr().solve(-e);
    std::vector<double> trial(b.r.size());
    bool ordered = true;
    for (Eigen::Index q = 0; q < k; ++q) {
      trial[static_cast<std::size_t>(q)] = b.r[static_cast<std::size_t>(q)] + d(q);
      ordered = ordered && trial[static_cast<std::size_t>(q)] > (q > 0 ? trial[static_cast<std::size_t>(q - 1)] : 0.0);
    }
    if (!ordered || !(trial.back() < 1.0)) return;
    const Eigen::VectorXd et = equations(trial);
    if (!(et.norm() < e.norm())) return;
    b.r = trial;
    e = et;
  }
}

// Nearest point of the boundary of tau K, K = {moments of sigma : |sigma| <= 1}. The boundary is
// swept by sign patterns with at most n - 1 switches; v - (that point) is the prox whenever v lies
// outside tau K. Each switch count is searched separately (a switch point on the simplex boundary
// is a pattern with fewer switches): grid over the ordered switch points, then local refinement.
BoundaryPoint nearest_boundary_point(const Eigen::VectorXd& v, double tau) {
  const int n = static_cast<int>(v.size());
  BoundaryPoint winner;
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
    const int grid = j <= 1 ? 200 : j == 2 ? 60 : 30;
    std::vector<BoundaryPoint> best(3);
    std::vector<int> idx(j, 1);
    while (true) {
      std::vector<double> r(j);
      for (std::size_t q = 0; q < j; ++q) r[q] = static_cast<double>(idx[q]) / grid;
      for (double s0 : {1.0, -1.0}) {
        const double d2 = boundary_dist2(v, tau, s0, r);
        if (d2 < best.back().dist2) {
          best.back() = BoundaryPoint{s0, r, d2};
          std::sort(best.begin(), best.end(), [](const auto& x, const auto& y) { return x.dist2 < y.dist2; });
        }
      }
      // next nondecreasing index tuple in [1, grid - 1]
      std::size_t q = j;
      while (q > 0 && idx[q - 1] == grid - 1) --q;
      if (q == 0) break;
      ++idx[q - 1];
      for (std::size_t l = q; l < j; ++l) idx[l] = idx[q - 1];
    }
    for (BoundaryPoint& b : best) {
      if (!std::isfinite(b.dist2)) continue;
      refine_boundary_point(v, tau, b);
      if (b.dist2 < winner.dist2) winner = b;
    }
  }
  polish_boundary_point(v, tau, winner);
  return winner;
}

// F(w) minus the dual bound tau m(sigma).v - tau^2 |m(sigma)|^2 / 2, for w = v - tau m(sigma). Equals
// 2 tau times the integral of |w| where sigma disagrees with sign(w); summed piecewise to avoid cancellation.
double pattern_gap(const Eigen::VectorXd& w, double tau, const BoundaryPoint& b) {
  std::vector<double> cuts{0.0, 1.0};
  cuts.insert(cuts.end(), b.r.begin(), b.r.end());
  for (double x : poly::sign_change_roots(coeffs(w), 0.0, 1.0)) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const auto before = static_cast<std::size_t>(std::lower_bound(b.r.begin(), b.r.end(), mid) - b.r.begin());
    const double sigma = before % 2 == 0 ? b.s0 : -b.s0;
    const double part = poly::integrate(coeffs(w), lo, hi);
    if (sigma * part < 0.0) gap += 2.0 * tau * std::abs(part);
  }
  return gap;
}

}  // namespace

Eigen::VectorXd prox_phi_oracle(const Eigen::VectorXd& block, double alpha, int k) {
  if (!(alpha > 0.0)) throw std::invalid_argument("prox_phi_oracle: alpha must be positive");
  if (k < 0 || k > 3 || block.size() != k + 1) {
    throw std::invalid_argument("prox_phi_oracle: block size must be k+1 <= 4");
  }
  const int n = k + 1;
  const double tau = 1.0 / alpha;
  const ProxObjective F{block, tau};
  const double scale = std::max(1.0, block.norm());
  // 0 is the minimizer when v lies in tau * {int t^m sigma : |sigma| <= 1}; that set contains
  // the ball of radius lambda_min(Hilbert) / sqrt(n), since int |p| >= |p|_2^2 / |p|_inf.
  Eigen::MatrixXd hilbert(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hilbert(a, b) = 1.0 / (a + b + 1);
  const double inner_radius = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hilbert).eigenvalues()(0) / std::sqrt(n);
  if (block.norm() <= tau * inner_radius) return Eigen::VectorXd::Zero(n);
  // sharper: the polynomial sigma with moments block / tau, if |sigma| <= 1 on [0, 1]
  {
    const Eigen::VectorXd c = hilbert.ldlt().solve(block / tau);
    const std::span<const double> cs(c.data(), static_cast<std::size_t>(n));
    double sup = std::max(std::abs(poly::eval(cs, 0.0)), std::abs(poly::eval(cs, 1.0)));
    for (double r : poly::sign_change_roots(poly::derivative(cs), 0.0, 1.0)) sup = std::max(sup, std::abs(poly::eval(cs, r)));
    if (sup <= 1.0 - 1e-12) return Eigen::VectorXd::Zero(n);
  }

  auto gradient = [&](const Eigen::VectorXd& x) {
    const std::vector<double> gi =
        poly::integrate_abs_unit_gradient(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    Eigen::VectorXd g = x - block;
    for (int m = 0; m < n; ++m) g(m) += tau * gi[static_cast<std::size_t>(m)];
    return g;
  };

  Eigen::VectorXd w = block;
  bool converged = false;
  for (int it = 0; it < 2000; ++it) {
    if (w.norm() <= 1e-15 * scale) {
      w.setZero();
      converged = true;
      break;
    }
    const Eigen::VectorXd g = gradient(w);
    if (g.norm() <= 1e-13 * scale) {
      converged = true;
      break;
    }

    const std::span<const double> ws(w.data(), static_cast<std::size_t>(n));
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    const auto dw = poly::derivative(ws);
    for (double r : poly::sign_change_roots(ws, 0.0, 1.0)) {
      const double slope = std::max(std::abs(poly::eval(dw, r)), 1e-12 * w.norm());
      Eigen::VectorXd phi(n);
      double rp = 1.0;
      for (int m = 0; m < n; ++m) {
        phi(m) = rp;
        rp *= r;
      }
      H.noalias() += (2.0 * tau / slope) * phi * phi.transpose();
    }
    const Eigen::VectorXd d = -H.ldlt().solve(g);

    const double f0 = F.value(w);
    const double slope0 = g.dot(d);
    if (-slope0 <= 1e-13 * std::max(1.0, std::abs(f0))) {
      // predicted decrease is below the resolution of F: judge by the gradient
      const Eigen::VectorXd trial = w + d;
      if (gradient(trial).norm() < g.norm()) {
        w = trial;
        continue;
      }
      converged = g.norm() <= 1e-9 * scale;
      break;
    }
    double s = 1.0;
    Eigen::VectorXd trial = w + d;
    while (F.value(trial) > f0 + 1e-4 * s * slope0 && s > 1e-30) {
      s *= 0.5;
      trial = w + s * d;
    }
    if (trial == w) break;
    w = trial;
  }
  if (!converged) {
    // degenerate blocks (v near the boundary of tau K, or a double root) stall Newton
    // the boundary candidate is certified by its duality gap, |w - prox|^2 <= 2 gap
    const BoundaryPoint b = nearest_boundary_point(block, tau);
    const Eigen::VectorXd wb = block - tau * sign_moments(b.s0, b.r, n);
    const double tol = 1e-7 * scale;
    const double f0 = F.value(Eigen::VectorXd::Zero(n));
    const double fw = w.norm() > 1e-12 * scale ? F.value(w) : f0;
    const double fb = F.value(wb);
    if (fb < std::min(f0, fw) && 2.0 * pattern_gap(wb, tau, b) <= tol * tol) return wb;
    if (fw < std::min(f0, fb) && gradient(w).norm() <= tol) return w;
    if (f0 <= std::min(fw, fb) + 1e-15 * std::max(1.0, f0)) return Eigen::VectorXd::Zero(n);
    std::ostringstream msg;
    msg.precision(17);
    msg << "prox_phi_oracle: no convergence for block [" << block.transpose() << "], alpha " << alpha
        << " (F(0) - F(newton) " << f0 - fw << ", F(0) - F(boundary) " << f0 - fb << ", |grad| " << gradient(w).norm()
        << ", gap " << pattern_gap(wb, tau, b) << ")";
    throw std::runtime_error(msg.str());
  }
  if (F.value(Eigen::VectorXd::Zero(n)) <= F.value(w)) return Eigen::VectorXd::Zero(n);
  return w;
}

Eigen::VectorXd prox_phi_oracle_blocks(const Eigen::VectorXd& v, double alpha, int k) {
  if (v.size() % (k + 1) != 0) throw std::invalid_argument("prox_phi_oracle_blocks: bad block size");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); i += k + 1) {
    out.segment(i, k + 1) = prox_phi_oracle(v.segment(i, k + 1), alpha, k);
  }
  return out;
}

Eigen::VectorXd prox_indicator(const Eigen::VectorXd& x, const Eigen::VectorXd& fvec) {
  if (x.size() != fvec.size()) throw std::invalid_argument("prox_indicator: length mismatch");
  return fvec;
}

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::ExactK1;
  if (name == "wl1") return Method::WeightedL1;
  if (name == "oracle") return Method::Oracle;
  throw std::invalid_argument("unknown prox method '" + std::string(name) + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ExactK1: return "exact";
    case Method::WeightedL1: return "wl1";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

Eigen::VectorXd prox_phi(Method method, const Eigen::VectorXd& v, double alpha, int k) {
  switch (method) {
    case Method::ExactK1:
      if (k != 1) throw std::invalid_argument("exact prox requires blocks of size 2 (k = 1)");
      return prox_phi_k1(v, alpha);
    case Method::WeightedL1:
      return prox_phi_weighted_l1(v, alpha, k);
    case Method::Oracle:
      return prox_phi_oracle_blocks(v, alpha, k);
  }
  throw std::invalid_argument("prox_phi: unknown method");
}

}  // namespace lpwg::prox
