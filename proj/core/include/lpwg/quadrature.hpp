#pragma once

#include <vector>

#include <Eigen/Core>

namespace lpwg {

/// Gauss-Legendre rule on [0,1].
struct IntervalRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;  // exact for polynomials up to this degree

  std::size_t size() const { return points.size(); }
};

/// Rule on the reference triangle {(r,s): r,s >= 0, r+s <= 1} of area 1/2.
struct TriangleRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

IntervalRule gauss_legendre(int npoints);

/// Smallest Gauss rule exact to the given degree.
IntervalRule interval_rule_for_degree(int degree);

/// Collapsed (Duffy) tensor rule: positive weights, interior points.
TriangleRule triangle_rule_for_degree(int degree);

/// Quadrature degree used for a space of order k: max(2k+2, 10).
int quadrature_degree(int k);

}  // namespace lpwg
