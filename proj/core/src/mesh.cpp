#include "lpwg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace lpwg {

Mesh Mesh::from_triangles(std::vector<Vec2> points, const std::vector<std::array<int, 3>>& triangles,
                          int n) {
  Mesh m;
  m.n_ = n;
  m.vertices_.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    m.vertices_.push_back(Vertex{static_cast<int>(i), points[i]});
  }

  std::map<std::pair<int, int>, int> edge_index;
  m.elements_.reserve(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    Element el;
    el.id = static_cast<int>(t);
    el.vertices = triangles[t];
    const Vec2& a = points[static_cast<std::size_t>(el.vertices[0])];
    const Vec2& b = points[static_cast<std::size_t>(el.vertices[1])];
    const Vec2& c = points[static_cast<std::size_t>(el.vertices[2])];
    const double twice_area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    if (twice_area <= 0.0) {
      throw std::invalid_argument("Mesh::from_triangles: triangle is not counterclockwise");
    }
    el.area = 0.5 * twice_area;
    el.centroid = (a + b + c) / 3.0;

    for (int i = 0; i < 3; ++i) {
      const int va = el.vertices[static_cast<std::size_t>(i)];
      const int vb = el.vertices[static_cast<std::size_t>((i + 1) % 3)];
      const auto key = std::minmax(va, vb);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, static_cast<int>(m.edges_.size()));
      if (inserted) {
        Edge e;
        e.id = it->second;
        e.vertices = {key.first, key.second};
        e.length = (points[static_cast<std::size_t>(key.second)] - points[static_cast<std::size_t>(key.first)]).norm();
        e.elements = {el.id, -1};
        m.edges_.push_back(e);
      } else {
        Edge& e = m.edges_[static_cast<std::size_t>(it->second)];
        if (e.elements[1] >= 0) {
          throw std::invalid_argument("Mesh::from_triangles: edge shared by more than two triangles");
        }
        e.elements[1] = el.id;
      }
      el.edges[static_cast<std::size_t>(i)] = it->second;
      el.edge_signs[static_cast<std::size_t>(i)] = va < vb ? 1 : -1;

      const Vec2 tangent = points[static_cast<std::size_t>(vb)] - points[static_cast<std::size_t>(va)];
      // ccw traversal: outward normal is the tangent rotated clockwise
      el.normals[static_cast<std::size_t>(i)] = Vec2(tangent.y(), -tangent.x()).normalized();
      el.diameter = std::max(el.diameter, tangent.norm());
    }
    m.h_ = std::max(m.h_, el.diameter);
    m.elements_.push_back(el);
  }
  for (Edge& e : m.edges_) {
    e.boundary = e.elements[1] < 0;
  }
  return m;
}

EdgeMap Mesh::edge_param(int edge_id) const {
  const Edge& e = edge(edge_id);
  const Vec2& p0 = vertex(e.vertices[0]).p;
  const Vec2& p1 = vertex(e.vertices[1]).p;
  return EdgeMap{p0, p1 - p0};
}

EdgeMap edge_param(const Mesh& mesh, const Edge& e) { return mesh.edge_param(e.id); }

Mesh build_uniform(int n) {
  if (n < 1) {
    throw std::invalid_argument("build_uniform: n must be >= 1");
  }
  const int np = n + 1;
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(np * np));
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      points.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  auto vid = [np](int i, int j) { return j * np + i; };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int bl = vid(i, j), br = vid(i + 1, j), tl = vid(i, j + 1), tr = vid(i + 1, j + 1);
      tris.push_back({bl, br, tr});
      tris.push_back({bl, tr, tl});
    }
  }
  return Mesh::from_triangles(std::move(points), tris, n);
}

Mesh refine(const Mesh& mesh) {
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(mesh.num_vertices() + mesh.num_edges()));
  for (const Vertex& v : mesh.vertices()) points.push_back(v.p);
  const int base = mesh.num_vertices();
  for (const Edge& e : mesh.edges()) {
    points.push_back(0.5 * (mesh.vertex(e.vertices[0]).p + mesh.vertex(e.vertices[1]).p));
  }

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(4 * mesh.num_elements()));
  for (const Element& el : mesh.elements()) {
    const auto& v = el.vertices;
    // midpoint of local edge i sits between v[i] and v[i+1]
    const int m0 = base + el.edges[0];
    const int m1 = base + el.edges[1];
    const int m2 = base + el.edges[2];
    tris.push_back({v[0], m0, m2});
    tris.push_back({m0, v[1], m1});
    tris.push_back({m2, m1, v[2]});
    tris.push_back({m0, m1, m2});
  }
  return Mesh::from_triangles(std::move(points), tris, 2 * mesh.n());
}

}  // namespace lpwg
