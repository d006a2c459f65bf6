#pragma once

#include <span>
#include <vector>

namespace lpwg::poly {

// Univariate polynomials as ascending coefficient lists: c[0] + c[1] t + ...

double eval(std::span<const double> c, double t);

std::vector<double> derivative(std::span<const double> c);

std::vector<double> multiply(std::span<const double> a, std::span<const double> b);

/// Exact integral of the polynomial over [a, b].
double integrate(std::span<const double> c, double a, double b);

/// All distinct real roots in the open interval (a, b) where the polynomial
/// changes sign, ascending. Isolation recurses on the derivative, so every
/// returned root brackets a genuine sign change of c on (a, b).
std::vector<double> sign_change_roots(std::span<const double> c, double a, double b);

/// Exact value of the integral of |p(t)| over [0, 1], splitting at sign changes.
double integrate_abs_unit(std::span<const double> c);

/// Gradient of integrate_abs_unit with respect to the coefficients:
/// g[m] = integral over [0,1] of t^m sign(p(t)).
std::vector<double> integrate_abs_unit_gradient(std::span<const double> c);

}  // namespace lpwg::poly
