#pragma once

#include <string>
#include <string_view>

#include <Eigen/Core>

#include "lpwg/mesh.hpp"

namespace lpwg::prox {

/// Integral of |a + b s| over s in [0, 1], by cases on the signs of a and b.
double integral_abs_linear(double a, double b);

/// Componentwise shrinkage max(|q_i| - tau, 0) sign(q_i).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& q, double tau);

/// Membership in c * Omega0, Omega0 = {(1+x)^2/4 - 1/2 <= y <= 1/2 - (1-x)^2/4, |x| <= 1}.
bool in_omega0(const Vec2& p, double c, double tol = 0.0);

/// Euclidean projection onto c * Omega0.
Vec2 project_omega0(const Vec2& p, double c);

/// prox of (1/alpha) phi for k = 1: blockwise v_i - project_omega0(v_i, 1/alpha).
Eigen::VectorXd prox_phi_k1(const Eigen::VectorXd& v, double alpha);

/// Surrogate prox: component j (1-based) of each (k+1)-block shrunk by 1/(alpha j).
Eigen::VectorXd prox_phi_weighted_l1(const Eigen::VectorXd& v, double alpha, int k);

/// Numerical prox of (1/alpha) phi on one block of size k+1 <= 4.
///
/// Minimizes F(w) = |w - v|^2 / 2 + (1/alpha) int_0^1 |sum_m w_m t^m| dt by a
/// damped Newton iteration using the exact gradient int t^m sign(p) and the
/// root-localized Hessian sum_r 2 t_r^{m+n} / |p'(t_r)|. When Newton stalls
/// (v close to the boundary of tau K, K the moment set of |sigma| <= 1, tau =
/// 1/alpha) the prox is v minus the nearest boundary point of tau K, found by a
/// search over sign patterns and certified by its duality gap.
/// Throws std::runtime_error when no candidate is certified to 1e-7 |v|.
Eigen::VectorXd prox_phi_oracle(const Eigen::VectorXd& block, double alpha, int k);

/// Blockwise prox_phi_oracle over a stacked vector.
Eigen::VectorXd prox_phi_oracle_blocks(const Eigen::VectorXd& v, double alpha, int k);

/// prox of the indicator of {fvec}: always fvec. Throws on length mismatch.
Eigen::VectorXd prox_indicator(const Eigen::VectorXd& x, const Eigen::VectorXd& fvec);

enum class Method { ExactK1, WeightedL1, Oracle };

/// Parses "exact", "wl1" or "oracle".
Method parse_method(std::string_view name);
std::string to_string(Method m);

/// prox of (1/alpha) phi on stacked (k+1)-blocks with the chosen method.
/// ExactK1 requires k == 1.
Eigen::VectorXd prox_phi(Method method, const Eigen::VectorXd& v, double alpha, int k);

}  // namespace lpwg::prox
