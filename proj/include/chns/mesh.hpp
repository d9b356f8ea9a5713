#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace chns {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Axis-aligned rectangular domain.
struct Rect {
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool valid() const { return x0 < x1 && y0 < y1; }
};

/// Affine map data for one triangle: x = v0 + J * xi, xi in the
/// reference triangle {(0,0),(1,0),(0,1)}.
struct TriangleGeometry {
    double area = 0.0;
    double jac[2][2] = {{0, 0}, {0, 0}};      // column k = edge vector v_{k+1}-v0
    double inv_jac_t[2][2] = {{0, 0}, {0, 0}}; // maps reference gradients to physical
};

/// Immutable triangulation of a rectangle. Two triangles per cell, split
/// along the lower-left to upper-right diagonal, vertices row-major.
class Mesh {
  public:
    static Mesh rectangle(const Rect& domain, int nx, int ny);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    // Local edges of triangle t in the order (v0,v1), (v1,v2), (v2,v0).
    const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
    const std::vector<bool>& boundary_vertex() const { return boundary_vertex_; }
    const std::vector<bool>& boundary_edge() const { return boundary_edge_; }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }
    int n_edges() const { return static_cast<int>(edges_.size()); }

    const Rect& domain() const { return domain_; }
    double h() const { return h_; }

    TriangleGeometry geometry(int t) const;
    Vec2 edge_midpoint(int e) const;

  private:
    Rect domain_;
    double h_ = 0.0;
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<bool> boundary_vertex_;
    std::vector<bool> boundary_edge_;
};

} // namespace chns
