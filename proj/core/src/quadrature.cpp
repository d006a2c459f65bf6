#include "lpwg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lpwg {

IntervalRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: npoints must be >= 1");
  IntervalRule rule;
  rule.points.resize(static_cast<std::size_t>(npoints));
  rule.weights.resize(static_cast<std::size_t>(npoints));
  rule.degree = 2 * npoints - 1;

  const int n = npoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.points[lo] = 0.5 * (1.0 - x);
    rule.points[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

IntervalRule interval_rule_for_degree(int degree) {
  return gauss_legendre(std::max(1, (degree + 2) / 2));
}

TriangleRule triangle_rule_for_degree(int degree) {
  // (r,s) = (u, v(1-u)); the Jacobian (1-u) adds one degree in u
  const IntervalRule gu = interval_rule_for_degree(degree + 1);
  const IntervalRule gv = interval_rule_for_degree(degree);
  TriangleRule rule;
  rule.degree = degree;
  rule.points.reserve(gu.size() * gv.size());
  rule.weights.reserve(gu.size() * gv.size());
  for (std::size_t a = 0; a < gu.size(); ++a) {
    for (std::size_t b = 0; b < gv.size(); ++b) {
      const double u = gu.points[a];
      const double v = gv.points[b];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(gu.weights[a] * gv.weights[b] * (1.0 - u));
    }
  }
  return rule;
}

int quadrature_degree(int k) { return std::max(2 * k + 2, 10); }

}  // namespace lpwg
