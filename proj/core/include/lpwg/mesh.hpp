#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace lpwg {

using Vec2 = Eigen::Vector2d;

struct Vertex {
  int id = 0;
  Vec2 p = Vec2::Zero();
};

/// Mesh edge, oriented from the lower vertex id to the higher one.
struct Edge {
  int id = 0;
  std::array<int, 2> vertices{};  // vertices[0] < vertices[1]
  double length = 0.0;
  bool boundary = false;
  /// Incident elements; elements[1] == -1 on the boundary.
  std::array<int, 2> elements{-1, -1};

  int num_elements() const { return elements[1] < 0 ? 1 : 2; }
};

/// Triangle with counterclockwise vertices. Local edge i joins local vertices
/// i and (i+1)%3.
struct Element {
  int id = 0;
  std::array<int, 3> vertices{};
  std::array<int, 3> edges{};
  /// +1 when the global edge orientation agrees with the local ccw traversal.
  std::array<int, 3> edge_signs{};
  double area = 0.0;
  double diameter = 0.0;  // longest edge
  Vec2 centroid = Vec2::Zero();
  std::array<Vec2, 3> normals{};  // unit outward normal per local edge
};

/// Affine map t in [0,1] -> edge, t=0 at the lower-id endpoint.
struct EdgeMap {
  Vec2 origin = Vec2::Zero();
  Vec2 direction = Vec2::Zero();  // endpoint(1) - endpoint(0)

  Vec2 operator()(double t) const { return origin + t * direction; }
  double length() const { return direction.norm(); }
};

class Mesh {
 public:
  Mesh() = default;

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Element>& elements() const { return elements_; }

  const Vertex& vertex(int i) const { return vertices_.at(static_cast<std::size_t>(i)); }
  const Edge& edge(int i) const { return edges_.at(static_cast<std::size_t>(i)); }
  const Element& element(int i) const { return elements_.at(static_cast<std::size_t>(i)); }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  /// Subdivision parameter of the equivalent uniform grid.
  int n() const { return n_; }
  /// Largest element diameter.
  double h() const { return h_; }

  EdgeMap edge_param(int edge_id) const;

  /// Builds connectivity and geometry from vertex coordinates and ccw triangles.
  static Mesh from_triangles(std::vector<Vec2> points, const std::vector<std::array<int, 3>>& triangles,
                             int n);

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<Element> elements_;
  int n_ = 0;
  double h_ = 0.0;
};

/// Uniform n x n grid of the unit square, each cell split bottom-left to top-right.
/// Throws std::invalid_argument for n < 1.
Mesh build_uniform(int n);

/// Midpoint refinement: every triangle into four congruent children.
Mesh refine(const Mesh& mesh);

EdgeMap edge_param(const Mesh& mesh, const Edge& e);

}  // namespace lpwg
