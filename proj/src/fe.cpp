#include "chns/fe.hpp"

#include <cmath>
#include <stdexcept>

namespace chns {

int local_node_count(ElementKind kind) {
    return kind == ElementKind::P1_scalar ? 3 : 6;
}

int local_dof_count(ElementKind kind) {
    switch (kind) {
        case ElementKind::P1_scalar: return 3;
        case ElementKind::P2_scalar: return 6;
        case ElementKind::P2_vector2: return 12;
    }
    return 0;
}

BasisEval eval_basis(ElementKind kind, Vec2 p) {
    const double xi = p.x, eta = p.y;
    if (xi < -1e-12 || eta < -1e-12 || xi + eta > 1.0 + 1e-12) {
        throw std::invalid_argument("eval_basis: point outside reference triangle");
    }
    BasisEval out;
    const double l0 = 1.0 - xi - eta;
    const double l1 = xi;
    const double l2 = eta;
    if (kind == ElementKind::P1_scalar) {
        out.values = {l0, l1, l2};
        out.gradients = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
        return out;
    }
    // P2: vertex functions Li(2Li-1); midpoint functions 4*Li*Lj for the
    // edges (0,1), (1,2), (2,0).
    out.values = {
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
    };
    const Vec2 g0{-1.0, -1.0}, g1{1.0, 0.0}, g2{0.0, 1.0};
    auto vg = [](double l, Vec2 g) { return (4.0 * l - 1.0) * g; };
    out.gradients = {
        vg(l0, g0),
        vg(l1, g1),
        vg(l2, g2),
        4.0 * (l1 * g0 + l0 * g1),
        4.0 * (l2 * g1 + l1 * g2),
        4.0 * (l0 * g2 + l2 * g0),
    };
    return out;
}

namespace {

void push_orbit3(QuadratureRule& q, double a, double w) {
    // Symmetric orbit with barycentric pattern (1-2a, a, a); reference
    // coordinates are (l1, l2) = second and third barycentric components.
    q.points.push_back({a, a});
    q.points.push_back({1.0 - 2.0 * a, a});
    q.points.push_back({a, 1.0 - 2.0 * a});
    for (int i = 0; i < 3; ++i) q.weights.push_back(w);
}

void push_orbit6(QuadratureRule& q, double a, double b, double w) {
    const double c = 1.0 - a - b;
    const double pts[6][2] = {{a, b}, {b, a}, {a, c}, {c, a}, {b, c}, {c, b}};
    for (auto& p : pts) {
        q.points.push_back({p[0], p[1]});
        q.weights.push_back(w);
    }
}

} // namespace

QuadratureRule quadrature(int degree) {
    QuadratureRule q;
    // Dunavant rules; tabulated weights are normalized to 1 and scaled by
    // the reference-triangle area 1/2.
    switch (degree) {
        case 4:
            push_orbit3(q, 0.445948490915965, 0.5 * 0.223381589678011);
            push_orbit3(q, 0.091576213509771, 0.5 * 0.109951743655322);
            break;
        case 5: {
            const double s15 = std::sqrt(15.0);
            q.points.push_back({1.0 / 3.0, 1.0 / 3.0});
            q.weights.push_back(0.5 * 9.0 / 40.0);
            push_orbit3(q, (6.0 - s15) / 21.0, 0.5 * (155.0 - s15) / 1200.0);
            push_orbit3(q, (6.0 + s15) / 21.0, 0.5 * (155.0 + s15) / 1200.0);
            break;
        }
        case 6:
            push_orbit3(q, 0.063089014491502, 0.5 * 0.050844906370207);
            push_orbit3(q, 0.249286745170910, 0.5 * 0.116786275726379);
            push_orbit6(q, 0.310352451033785, 0.053145049844816,
                        0.5 * 0.082851075618374);
            break;
        default:
            throw std::invalid_argument("quadrature: unsupported degree");
    }
    return q;
}

DofMap::DofMap(const Mesh& mesh, ElementKind kind) : kind_(kind) {
    const int nv = mesh.n_vertices();
    const int ne = mesh.n_edges();
    n_nodes_ = (kind == ElementKind::P1_scalar) ? nv : nv + ne;
    const int comps = (kind == ElementKind::P2_vector2) ? 2 : 1;
    n_dofs_ = comps * n_nodes_;

    // Node numbering: vertices first, then edge midpoints. Vector dofs
    // interleave components: dof = 2*node + comp.
    std::vector<Vec2> node_coords(n_nodes_);
    std::vector<bool> node_boundary(n_nodes_, false);
    for (int v = 0; v < nv; ++v) {
        node_coords[v] = mesh.vertices()[v];
        node_boundary[v] = mesh.boundary_vertex()[v];
    }
    if (kind != ElementKind::P1_scalar) {
        for (int e = 0; e < ne; ++e) {
            node_coords[nv + e] = mesh.edge_midpoint(e);
            node_boundary[nv + e] = mesh.boundary_edge()[e];
        }
    }

    cell_dofs_.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        std::vector<int> nodes;
        const auto& tri = mesh.triangles()[t];
        nodes = {tri[0], tri[1], tri[2]};
        if (kind != ElementKind::P1_scalar) {
            for (int le = 0; le < 3; ++le) {
                nodes.push_back(nv + mesh.triangle_edges()[t][le]);
            }
        }
        auto& dofs = cell_dofs_[t];
        for (int node : nodes) {
            if (comps == 1) {
                dofs.push_back(node);
            } else {
                dofs.push_back(2 * node);
                dofs.push_back(2 * node + 1);
            }
        }
    }

    dof_coords_.resize(n_dofs_);
    for (int node = 0; node < n_nodes_; ++node) {
        for (int c = 0; c < comps; ++c) {
            dof_coords_[comps * node + c] = node_coords[node];
        }
        if (node_boundary[node]) {
            for (int c = 0; c < comps; ++c) {
                boundary_dofs_.push_back(comps * node + c);
            }
        }
    }
}

} // namespace chns
