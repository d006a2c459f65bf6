#include "lpwg/fe_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "lpwg/polynomial.hpp"

namespace lpwg {

void SpaceConfig::validate() const {
  if (k < 2) throw std::invalid_argument("SpaceConfig: k must be >= 2, got " + std::to_string(k));
  if (l != k - 1 && l != k - 2) {
    throw std::invalid_argument("SpaceConfig: l must be k-2 or k-1, got l=" + std::to_string(l));
  }
}

DofRef DofLayout::vb_offset(int edge) const {
  const auto e = static_cast<std::size_t>(edge);
  if (interior_index[e] >= 0) return DofRef{N1 + interior_index[e] * vb_size, false};
  return DofRef{boundary_index[e] * vb_size, true};
}

DofLayout make_layout(const Mesh& mesh, const SpaceConfig& cfg) {
  cfg.validate();
  DofLayout L;
  L.k = cfg.k;
  L.l = cfg.l;
  L.num_elements = mesh.num_elements();
  L.num_edges = mesh.num_edges();
  L.v0_size = (cfg.k + 1) * (cfg.k + 2) / 2;
  L.vb_size = cfg.k + 1;
  L.vg_size = cfg.k;
  L.w_size = (cfg.l + 1) * (cfg.l + 2) / 2;

  L.interior_index.assign(static_cast<std::size_t>(mesh.num_edges()), -1);
  L.boundary_index.assign(static_cast<std::size_t>(mesh.num_edges()), -1);
  int ni = 0, nb = 0;
  for (const Edge& e : mesh.edges()) {
    if (e.boundary) {
      L.boundary_index[static_cast<std::size_t>(e.id)] = nb++;
    } else {
      L.interior_index[static_cast<std::size_t>(e.id)] = ni++;
    }
  }
  L.N1 = L.num_elements * L.v0_size;
  L.N2 = ni * L.vb_size;
  L.N3 = L.num_edges * L.vg_size;
  L.N = L.N1 + L.N2 + 2 * L.N3;
  L.M = L.num_elements * L.w_size;
  L.num_boundary = nb * L.vb_size;
  return L;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, SpaceConfig cfg)
    : mesh_(std::move(mesh)),
      cfg_(cfg),
      layout_(make_layout(*mesh_, cfg_)),
      tri_rule_(triangle_rule_for_degree(quadrature_degree(cfg_.k))),
      edge_rule_(interval_rule_for_degree(quadrature_degree(cfg_.k))) {
  for (int deg = 0; deg <= cfg_.k; ++deg) {
    for (int b = 0; b <= deg; ++b) exponents_.push_back({deg - b, b});
  }
}

std::vector<QuadPoint> FeSpace::element_quadrature(int element) const {
  return element_quadrature(element, tri_rule_);
}

std::vector<QuadPoint> FeSpace::element_quadrature(int element, const TriangleRule& rule) const {
  const Element& el = mesh_->element(element);
  const Vec2& a = mesh_->vertex(el.vertices[0]).p;
  const Vec2& b = mesh_->vertex(el.vertices[1]).p;
  const Vec2& c = mesh_->vertex(el.vertices[2]).p;
  std::vector<QuadPoint> out;
  out.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& rs = rule.points[q];
    out.push_back(QuadPoint{a + rs.x() * (b - a) + rs.y() * (c - a), rule.weights[q] * 2.0 * el.area});
  }
  return out;
}

namespace {

int basis_size(int degree) { return (degree + 1) * (degree + 2) / 2; }

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

Eigen::VectorXd FeSpace::basis_values(int element, const Vec2& x, int degree) const {
  const Element& el = mesh_->element(element);
  const double X = (x.x() - el.centroid.x()) / el.diameter;
  const double Y = (x.y() - el.centroid.y()) / el.diameter;
  const int n = basis_size(degree);
  Eigen::VectorXd v(n);
  for (int r = 0; r < n; ++r) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(r)];
    v(r) = ipow(X, a) * ipow(Y, b);
  }
  return v;
}

Eigen::MatrixX2d FeSpace::basis_gradients(int element, const Vec2& x, int degree) const {
  const Element& el = mesh_->element(element);
  const double h = el.diameter;
  const double X = (x.x() - el.centroid.x()) / h;
  const double Y = (x.y() - el.centroid.y()) / h;
  const int n = basis_size(degree);
  Eigen::MatrixX2d g(n, 2);
  for (int r = 0; r < n; ++r) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(r)];
    g(r, 0) = a > 0 ? a * ipow(X, a - 1) * ipow(Y, b) / h : 0.0;
    g(r, 1) = b > 0 ? b * ipow(X, a) * ipow(Y, b - 1) / h : 0.0;
  }
  return g;
}

Eigen::MatrixX3d FeSpace::basis_hessians(int element, const Vec2& x, int degree) const {
  const Element& el = mesh_->element(element);
  const double h = el.diameter;
  const double X = (x.x() - el.centroid.x()) / h;
  const double Y = (x.y() - el.centroid.y()) / h;
  const int n = basis_size(degree);
  Eigen::MatrixX3d H(n, 3);
  for (int r = 0; r < n; ++r) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(r)];
    H(r, 0) = a > 1 ? a * (a - 1) * ipow(X, a - 2) * ipow(Y, b) / (h * h) : 0.0;
    H(r, 1) = (a > 0 && b > 0) ? a * b * ipow(X, a - 1) * ipow(Y, b - 1) / (h * h) : 0.0;
    H(r, 2) = b > 1 ? b * (b - 1) * ipow(X, a) * ipow(Y, b - 2) / (h * h) : 0.0;
  }
  return H;
}

Eigen::MatrixXd FeSpace::element_mass(int element, int degree) const {
  const int n = basis_size(degree);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  for (const QuadPoint& q : element_quadrature(element)) {
    const Eigen::VectorXd phi = basis_values(element, q.x, degree);
    mass.noalias() += q.w * phi * phi.transpose();
  }
  return mass;
}

namespace {

// Affine coordinate of the scaled monomial variable along an edge: c0 + c1 t.
struct AffineT {
  double c0, c1;
};

std::vector<double> affine_power(AffineT s, int p) {
  std::vector<double> out{1.0};
  const std::array<double, 2> lin{s.c0, s.c1};
  for (int i = 0; i < p; ++i) out = poly::multiply(out, lin);
  return out;
}

}  // namespace

Eigen::MatrixXd FeSpace::edge_trace(int element, int local_edge) const {
  const Element& el = mesh_->element(element);
  const EdgeMap em = mesh_->edge_param(el.edges[static_cast<std::size_t>(local_edge)]);
  const double h = el.diameter;
  const AffineT X{(em.origin.x() - el.centroid.x()) / h, em.direction.x() / h};
  const AffineT Y{(em.origin.y() - el.centroid.y()) / h, em.direction.y() / h};
  const int k = cfg_.k;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k + 1, layout_.v0_size);
  for (int r = 0; r < layout_.v0_size; ++r) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(r)];
    const auto p = poly::multiply(affine_power(X, a), affine_power(Y, b));
    for (std::size_t m = 0; m < p.size(); ++m) R(static_cast<int>(m), r) = p[m];
  }
  return R;
}

Eigen::MatrixXd FeSpace::edge_gradient_trace(int element, int local_edge, int component) const {
  const Element& el = mesh_->element(element);
  const EdgeMap em = mesh_->edge_param(el.edges[static_cast<std::size_t>(local_edge)]);
  const double h = el.diameter;
  const AffineT X{(em.origin.x() - el.centroid.x()) / h, em.direction.x() / h};
  const AffineT Y{(em.origin.y() - el.centroid.y()) / h, em.direction.y() / h};
  const int k = cfg_.k;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, layout_.v0_size);
  for (int r = 0; r < layout_.v0_size; ++r) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(r)];
    std::vector<double> p;
    double scale = 0.0;
    if (component == 0 && a > 0) {
      p = poly::multiply(affine_power(X, a - 1), affine_power(Y, b));
      scale = a / h;
    } else if (component == 1 && b > 0) {
      p = poly::multiply(affine_power(X, a), affine_power(Y, b - 1));
      scale = b / h;
    }
    for (std::size_t m = 0; m < p.size(); ++m) G(static_cast<int>(m), r) = scale * p[m];
  }
  return G;
}

std::vector<DofRef> FeSpace::local_dofs(int element) const {
  const Element& el = mesh_->element(element);
  std::vector<DofRef> dofs;
  dofs.reserve(static_cast<std::size_t>(layout_.local_size()));
  const int off0 = layout_.v0_offset(element);
  for (int r = 0; r < layout_.v0_size; ++r) dofs.push_back(DofRef{off0 + r, false});
  for (int i = 0; i < 3; ++i) {
    const int e = el.edges[static_cast<std::size_t>(i)];
    const DofRef vb = layout_.vb_offset(e);
    for (int m = 0; m < layout_.vb_size; ++m) dofs.push_back(DofRef{vb.index + m, vb.boundary});
    for (int j = 0; j < 2; ++j) {
      const int og = layout_.vg_offset(e, j);
      for (int m = 0; m < layout_.vg_size; ++m) dofs.push_back(DofRef{og + m, false});
    }
  }
  return dofs;
}

Eigen::VectorXd FeSpace::gather(const WeakFunction& v, int element) const {
  const auto dofs = local_dofs(element);
  Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) out(static_cast<Eigen::Index>(i)) = v.coeff(dofs[i]);
  return out;
}

WeakFunction FeSpace::zero_function() const {
  return WeakFunction{Eigen::VectorXd::Zero(layout_.N), Eigen::VectorXd::Zero(layout_.num_boundary)};
}

namespace {

void check_element(const FeSpace& space, int element) {
  if (element < 0 || element >= space.mesh().num_elements()) {
    throw std::out_of_range("element id " + std::to_string(element) + " out of range");
  }
}

Eigen::VectorXd v0_block(const FeSpace& space, const WeakFunction& v, int element) {
  const auto& L = space.layout();
  return v.free.segment(L.v0_offset(element), L.v0_size);
}

}  // namespace

double eval_v0(const FeSpace& space, const WeakFunction& v, int element, const Vec2& x) {
  check_element(space, element);
  return space.basis_values(element, x, space.k()).dot(v0_block(space, v, element));
}

Vec2 eval_v0_gradient(const FeSpace& space, const WeakFunction& v, int element, const Vec2& x) {
  check_element(space, element);
  return space.basis_gradients(element, x, space.k()).transpose() * v0_block(space, v, element);
}

Eigen::Matrix2d eval_v0_hessian(const FeSpace& space, const WeakFunction& v, int element, const Vec2& x) {
  check_element(space, element);
  const Eigen::Vector3d h = space.basis_hessians(element, x, space.k()).transpose() * v0_block(space, v, element);
  Eigen::Matrix2d H;
  H << h(0), h(1), h(1), h(2);
  return H;
}

namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& mass, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(std::string(what) + ": singular local mass matrix");
  }
  return llt.solve(rhs);
}

// L2 projection of g onto P_{n-1}(e) in the monomials t^m, m < n.
Eigen::VectorXd project_on_edge(const EdgeMap& em, const IntervalRule& rule, int n,
                                const std::function<double(const Vec2&)>& g) {
  const double he = em.length();
  Eigen::MatrixXd mass(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mass(a, b) = he / (a + b + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q];
    const double val = g(em(t)) * rule.weights[q] * he;
    double tp = 1.0;
    for (int m = 0; m < n; ++m) {
      rhs(m) += val * tp;
      tp *= t;
    }
  }
  return solve_spd(mass, rhs, "edge projection");
}

}  // namespace

WeakFunction project_Qh(const FeSpace& space, const ScalarField& u, const VectorField& grad_u) {
  const Mesh& mesh = space.mesh();
  const DofLayout& L = space.layout();
  WeakFunction v = space.zero_function();
  const int k = space.k();

  for (int t = 0; t < mesh.num_elements(); ++t) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L.v0_size);
    for (const QuadPoint& q : space.element_quadrature(t)) {
      rhs += q.w * u(q.x) * space.basis_values(t, q.x, k);
    }
    v.free.segment(L.v0_offset(t), L.v0_size) = solve_spd(space.element_mass(t, k), rhs, "project_Qh");
  }

  for (const Edge& e : mesh.edges()) {
    const EdgeMap em = mesh.edge_param(e.id);
    const Eigen::VectorXd vb = project_on_edge(em, space.edge_rule(), k + 1, u);
    const DofRef ref = L.vb_offset(e.id);
    if (ref.boundary) {
      v.boundary.segment(ref.index, L.vb_size) = vb;
    } else {
      v.free.segment(ref.index, L.vb_size) = vb;
    }
    for (int j = 0; j < 2; ++j) {
      v.free.segment(L.vg_offset(e.id, j), L.vg_size) =
          project_on_edge(em, space.edge_rule(), k, [&](const Vec2& x) { return grad_u(x)(j); });
    }
  }
  return v;
}

Eigen::VectorXd project_Wh(const FeSpace& space, const ScalarField& g) {
  const DofLayout& L = space.layout();
  Eigen::VectorXd out(L.M);
  for (int t = 0; t < space.mesh().num_elements(); ++t) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L.w_size);
    for (const QuadPoint& q : space.element_quadrature(t)) {
      rhs += q.w * g(q.x) * space.basis_values(t, q.x, space.l());
    }
    out.segment(L.w_offset(t), L.w_size) = solve_spd(space.element_mass(t, space.l()), rhs, "project_Wh");
  }
  return out;
}

Eigen::VectorXd project_boundary(const FeSpace& space, const ScalarField& g) {
  const DofLayout& L = space.layout();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L.num_boundary);
  for (const Edge& e : space.mesh().edges()) {
    if (!e.boundary) continue;
    const DofRef ref = L.vb_offset(e.id);
    out.segment(ref.index, L.vb_size) = project_on_edge(space.mesh().edge_param(e.id), space.edge_rule(), space.k() + 1, g);
  }
  return out;
}

}  // namespace lpwg
