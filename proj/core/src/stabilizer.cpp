#include "lpwg/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpwg/polynomial.hpp"

namespace lpwg {

JumpLayout make_jump_layout(const FeSpace& space) {
  return JumpLayout{3 * space.mesh().num_elements(), space.k() + 1};
}

std::array<Eigen::MatrixXd, 3> local_jump_operators(const FeSpace& space, int element, int local_edge) {
  const DofLayout& L = space.layout();
  const int k = space.k();
  const int off = L.local_edge_offset(local_edge);
  std::array<Eigen::MatrixXd, 3> J;
  for (auto& m : J) m = Eigen::MatrixXd::Zero(k + 1, L.local_size());

  J[0].leftCols(L.v0_size) = space.edge_trace(element, local_edge);
  J[0].block(0, off, k + 1, k + 1) -= Eigen::MatrixXd::Identity(k + 1, k + 1);
  for (int j = 0; j < 2; ++j) {
    J[static_cast<std::size_t>(j + 1)].topLeftCorner(k, L.v0_size) = space.edge_gradient_trace(element, local_edge, j);
    J[static_cast<std::size_t>(j + 1)].block(0, off + L.vb_size + j * L.vg_size, k, k) -= Eigen::MatrixXd::Identity(k, k);
  }
  return J;
}

Eigen::VectorXd BMatrix::apply(const WeakFunction& v) const {
  Eigen::VectorXd out = B * v.free;
  if (v.boundary.size() > 0) out += B_boundary * v.boundary;
  return out;
}

Eigen::VectorXd BMatrix::offset(const Eigen::VectorXd& boundary_values) const {
  if (boundary_values.size() == 0) return Eigen::VectorXd::Zero(B.rows());
  return B_boundary * boundary_values;
}

BMatrix assemble_B(const FeSpace& space, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("assemble_B: unsupported p=" + std::to_string(p));
  const Mesh& mesh = space.mesh();
  const DofLayout& L = space.layout();
  BMatrix out;
  out.layout = make_jump_layout(space);
  out.p = p;

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> free_t, bd_t;
  for (const Element& el : mesh.elements()) {
    const auto dofs = space.local_dofs(el.id);
    const double hT = el.diameter;
    for (int le = 0; le < 3; ++le) {
      const double he = mesh.edge(el.edges[static_cast<std::size_t>(le)]).length;
      const auto J = local_jump_operators(space, el.id, le);
      for (int kind = 0; kind < 3; ++kind) {
        const double scale = kind == 0 ? he * std::pow(hT, 1.0 - 2.0 * p) : he * std::pow(hT, 1.0 - p);
        const int row0 = out.layout.block_row(kind, el.id, le);
        const Eigen::MatrixXd& Jk = J[static_cast<std::size_t>(kind)];
        for (int m = 0; m < Jk.rows(); ++m) {
          for (std::size_t c = 0; c < dofs.size(); ++c) {
            const double val = Jk(m, static_cast<Eigen::Index>(c));
            if (val == 0.0) continue;
            (dofs[c].boundary ? bd_t : free_t).emplace_back(row0 + m, dofs[c].index, scale * val);
          }
        }
      }
    }
  }
  out.B.resize(out.layout.rows(), L.N);
  out.B.setFromTriplets(free_t.begin(), free_t.end());
  out.B_boundary.resize(out.layout.rows(), L.num_boundary);
  out.B_boundary.setFromTriplets(bd_t.begin(), bd_t.end());
  return out;
}

double eval_phi(std::span<const double> q, int k) {
  const auto bs = static_cast<std::size_t>(k + 1);
  if (k < 0 || q.size() % bs != 0) {
    throw std::invalid_argument("eval_phi: length must be a multiple of k+1");
  }
  double acc = 0.0;
  for (std::size_t b = 0; b < q.size(); b += bs) acc += poly::integrate_abs_unit(q.subspan(b, bs));
  return acc;
}

double eval_phi(const Eigen::VectorXd& q, int k) {
  return eval_phi(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), k);
}

namespace {

void check_p(double p) {
  if (!(p == 1.0 || p == 2.0 || p == kInfinity)) {
    throw std::invalid_argument("stabilizer: unsupported p=" + std::to_string(p));
  }
}

double integrate_square_unit(const Eigen::VectorXd& c) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < c.size(); ++a)
    for (Eigen::Index b = 0; b < c.size(); ++b) acc += c(a) * c(b) / static_cast<double>(a + b + 1);
  return acc;
}

double max_abs_on_edge(const Eigen::VectorXd& c, const IntervalRule& rule) {
  const std::span<const double> cs(c.data(), static_cast<std::size_t>(c.size()));
  double m = std::max(std::abs(poly::eval(cs, 0.0)), std::abs(poly::eval(cs, 1.0)));
  for (double t : rule.points) m = std::max(m, std::abs(poly::eval(cs, t)));
  return m;
}

}  // namespace

double eval_s(const FeSpace& space, const WeakFunction& v, double p) {
  check_p(p);
  const Mesh& mesh = space.mesh();
  double total = 0.0;
  for (const Element& el : mesh.elements()) {
    const Eigen::VectorXd local = space.gather(v, el.id);
    const double hT = el.diameter;
    double value_sup = 0.0, grad_sup = 0.0;
    for (int le = 0; le < 3; ++le) {
      const double he = mesh.edge(el.edges[static_cast<std::size_t>(le)]).length;
      const auto J = local_jump_operators(space, el.id, le);
      for (int kind = 0; kind < 3; ++kind) {
        const Eigen::VectorXd c = J[static_cast<std::size_t>(kind)] * local;
        const double weight = kind == 0 ? std::pow(hT, 1.0 - 2.0 * p) : std::pow(hT, 1.0 - p);
        if (p == 1.0) {
          total += weight * he * poly::integrate_abs_unit(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
        } else if (p == 2.0) {
          total += 0.5 * weight * he * integrate_square_unit(c);
        } else {
          const double m = max_abs_on_edge(c, space.edge_rule());
          (kind == 0 ? value_sup : grad_sup) = std::max(kind == 0 ? value_sup : grad_sup, m);
        }
      }
    }
    if (p == kInfinity) total = std::max(total, value_sup / (hT * hT) + grad_sup / hT);
  }
  return total;
}

double s_tilde_from(double s, double p) {
  check_p(p);
  if (p == kInfinity || p == 1.0) return s;
  return std::pow(s, 1.0 / p);
}

double eval_s_tilde(const FeSpace& space, const WeakFunction& v, double p) {
  return s_tilde_from(eval_s(space, v, p), p);
}

StabilizerP2 assemble_stabilizer_p2(const FeSpace& space) {
  const Mesh& mesh = space.mesh();
  const DofLayout& L = space.layout();
  const int n = space.k() + 1;
  Eigen::MatrixXd hilbert(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hilbert(a, b) = 1.0 / (a + b + 1);

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> free_t, bd_t;
  for (const Element& el : mesh.elements()) {
    const auto dofs = space.local_dofs(el.id);
    const double hT = el.diameter;
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(L.local_size(), L.local_size());
    for (int le = 0; le < 3; ++le) {
      const double he = mesh.edge(el.edges[static_cast<std::size_t>(le)]).length;
      const auto J = local_jump_operators(space, el.id, le);
      local.noalias() += (he / (hT * hT * hT)) * J[0].transpose() * hilbert * J[0];
      for (int j = 1; j <= 2; ++j) {
        local.noalias() += (he / hT) * J[static_cast<std::size_t>(j)].transpose() * hilbert * J[static_cast<std::size_t>(j)];
      }
    }
    for (std::size_t r = 0; r < dofs.size(); ++r) {
      if (dofs[r].boundary) continue;
      for (std::size_t c = 0; c < dofs.size(); ++c) {
        const double val = local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (val == 0.0) continue;
        (dofs[c].boundary ? bd_t : free_t).emplace_back(dofs[r].index, dofs[c].index, val);
      }
    }
  }
  StabilizerP2 out;
  out.S.resize(L.N, L.N);
  out.S.setFromTriplets(free_t.begin(), free_t.end());
  out.S_boundary.resize(L.N, L.num_boundary);
  out.S_boundary.setFromTriplets(bd_t.begin(), bd_t.end());
  return out;
}

}  // namespace lpwg
