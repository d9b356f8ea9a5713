#include "chns/mesh.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace chns {

namespace {
constexpr double kBoundaryTol = 1e-12;
}

Mesh Mesh::rectangle(const Rect& domain, int nx, int ny) {
    if (!domain.valid()) {
        throw std::invalid_argument("Mesh::rectangle: degenerate domain");
    }
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("Mesh::rectangle: nx and ny must be >= 1");
    }

    Mesh m;
    m.domain_ = domain;

    const int npx = nx + 1;
    const int npy = ny + 1;
    const double dx = domain.width() / nx;
    const double dy = domain.height() / ny;

    m.vertices_.reserve(static_cast<size_t>(npx) * npy);
    m.boundary_vertex_.assign(static_cast<size_t>(npx) * npy, false);
    for (int j = 0; j < npy; ++j) {
        for (int i = 0; i < npx; ++i) {
            // Endpoints written exactly so boundary detection is robust.
            const double x = (i == nx) ? domain.x1 : domain.x0 + i * dx;
            const double y = (j == ny) ? domain.y1 : domain.y0 + j * dy;
            m.vertices_.push_back({x, y});
        }
    }
    for (int v = 0; v < static_cast<int>(m.vertices_.size()); ++v) {
        const Vec2 p = m.vertices_[v];
        m.boundary_vertex_[v] = std::abs(p.x - domain.x0) <= kBoundaryTol ||
                                std::abs(p.x - domain.x1) <= kBoundaryTol ||
                                std::abs(p.y - domain.y0) <= kBoundaryTol ||
                                std::abs(p.y - domain.y1) <= kBoundaryTol;
    }

    auto vid = [npx](int i, int j) { return j * npx + i; };

    m.triangles_.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j);
            const int v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1);
            const int v11 = vid(i + 1, j + 1);
            // Diagonal v00 -> v11, both triangles counter-clockwise.
            m.triangles_.push_back({v00, v10, v11});
            m.triangles_.push_back({v00, v11, v01});
        }
    }

    std::map<std::pair<int, int>, int> edge_index;
    std::vector<int> edge_use_count;
    m.triangle_edges_.resize(m.triangles_.size());
    for (size_t t = 0; t < m.triangles_.size(); ++t) {
        const auto& tri = m.triangles_[t];
        for (int le = 0; le < 3; ++le) {
            int a = tri[le];
            int b = tri[(le + 1) % 3];
            if (a > b) std::swap(a, b);
            auto [it, inserted] = edge_index.try_emplace({a, b}, m.n_edges());
            if (inserted) {
                m.edges_.push_back({a, b});
                edge_use_count.push_back(0);
            }
            m.triangle_edges_[t][le] = it->second;
            ++edge_use_count[it->second];
        }
    }
    m.boundary_edge_.resize(m.edges_.size());
    for (size_t e = 0; e < m.edges_.size(); ++e) {
        m.boundary_edge_[e] = edge_use_count[e] == 1;
    }

    m.h_ = std::sqrt(dx * dx + dy * dy);
    return m;
}

TriangleGeometry Mesh::geometry(int t) const {
    if (t < 0 || t >= n_triangles()) {
        throw std::out_of_range("Mesh::geometry: triangle index out of range");
    }
    const auto& tri = triangles_[t];
    const Vec2 p0 = vertices_[tri[0]];
    const Vec2 p1 = vertices_[tri[1]];
    const Vec2 p2 = vertices_[tri[2]];

    TriangleGeometry g;
    g.jac[0][0] = p1.x - p0.x;
    g.jac[1][0] = p1.y - p0.y;
    g.jac[0][1] = p2.x - p0.x;
    g.jac[1][1] = p2.y - p0.y;
    const double det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
    g.area = 0.5 * det;
    // inv(J)^T = adj(J)^T / det
    g.inv_jac_t[0][0] = g.jac[1][1] / det;
    g.inv_jac_t[0][1] = -g.jac[1][0] / det;
    g.inv_jac_t[1][0] = -g.jac[0][1] / det;
    g.inv_jac_t[1][1] = g.jac[0][0] / det;
    return g;
}

Vec2 Mesh::edge_midpoint(int e) const {
    const auto& ed = edges_[e];
    return 0.5 * (vertices_[ed[0]] + vertices_[ed[1]]);
}

} // namespace chns
