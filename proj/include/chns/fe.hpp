#pragma once

#include <vector>

#include "chns/mesh.hpp"

namespace chns {

enum class ElementKind {
    P1_scalar,  // 3 local nodes at vertices
    P2_scalar,  // 6 local nodes: vertices + edge midpoints
    P2_vector2, // 12 local dofs: 6 nodes x 2 components, interleaved
};

int local_node_count(ElementKind kind);
int local_dof_count(ElementKind kind);

struct BasisEval {
    // Scalar nodal shape function values and reference-space gradients,
    // one per local node (3 for P1, 6 for P2). Vector elements reuse the
    // scalar P2 table per component.
    std::vector<double> values;
    std::vector<Vec2> gradients;
};

/// Lagrange shape functions at a reference-triangle point. Throws if the
/// point lies outside the closed reference triangle by more than 1e-12.
BasisEval eval_basis(ElementKind kind, Vec2 ref_point);

struct QuadratureRule {
    std::vector<Vec2> points;    // reference coordinates
    std::vector<double> weights; // sum to 1/2
};

/// Symmetric Gauss rule on the reference triangle, exact for total degree
/// 4, 5, or 6.
QuadratureRule quadrature(int degree);

class DofMap {
  public:
    DofMap(const Mesh& mesh, ElementKind kind);

    ElementKind kind() const { return kind_; }
    int n_dofs() const { return n_dofs_; }
    int n_nodes() const { return n_nodes_; }
    const std::vector<std::vector<int>>& cell_dofs() const { return cell_dofs_; }
    const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
    const std::vector<Vec2>& dof_coords() const { return dof_coords_; }

  private:
    ElementKind kind_;
    int n_dofs_ = 0;
    int n_nodes_ = 0;
    std::vector<std::vector<int>> cell_dofs_;
    std::vector<int> boundary_dofs_;
    std::vector<Vec2> dof_coords_;
};

} // namespace chns
