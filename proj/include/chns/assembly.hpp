#pragma once

#include <functional>
#include <memory>

#include "chns/fe.hpp"
#include "chns/linalg.hpp"
#include "chns/mesh.hpp"

namespace chns {

/// A discrete function: coefficient vector over a dof map.
struct Field {
    const DofMap* dofmap = nullptr;
    Vector coeffs;

    Field() = default;
    Field(const DofMap& map, double fill = 0.0)
        : dofmap(&map), coeffs(map.n_dofs(), fill) {}
};

struct FieldValue {
    double scalar = 0.0;
    Vec2 vector{};
    Vec2 gradient{};        // scalar fields
    double grad[2][2] = {}; // vector fields: grad[i][j] = d u_i / d x_j
};

/// Value and physical-space gradient of a field at a reference point of
/// one triangle.
FieldValue eval_field(const Mesh& mesh, const Field& field, int triangle, Vec2 ref_point);

Field interpolate(const Mesh& mesh, const DofMap& dofmap,
                  const std::function<double(double, double)>& f);
Field interpolate_vector(const Mesh& mesh, const DofMap& dofmap,
                         const std::function<Vec2(double, double)>& f);

// ---------------------------------------------------------------------------
// Operators

/// (phi_j, chi_i) and (grad phi_j, grad chi_i) on the scalar P1 space.
SparseMatrix assemble_mass_s(const Mesh& mesh, const DofMap& p1, const QuadratureRule& quad);
SparseMatrix assemble_stiffness_s(const Mesh& mesh, const DofMap& p1, const QuadratureRule& quad);

/// Same forms on the P2 vector space.
SparseMatrix assemble_mass_v(const Mesh& mesh, const DofMap& p2v, const QuadratureRule& quad);
SparseMatrix assemble_stiffness_v(const Mesh& mesh, const DofMap& p2v, const QuadratureRule& quad);

/// Convection (w . grad phi_j, chi_i); trial and test P1, w a P2 vector field.
SparseMatrix assemble_convection_phi(const Mesh& mesh, const DofMap& p1, const Field& w,
                                     const QuadratureRule& quad);

/// Pressure gradient (grad p_j, v_i); trial P1, test P2 vector.
SparseMatrix assemble_pressure_grad(const Mesh& mesh, const DofMap& p1, const DofMap& p2v,
                                    const QuadratureRule& quad);

/// The coupled 2n x 2n phase/potential block:
///   [ Ms/tau + C(w)   M Ks  ] [phi]
///   [    -lambda Ks    Ms   ] [mu ]
SparseMatrix assemble_ch_coupling(const Mesh& mesh, const DofMap& p1, const Field& w,
                                  double mobility, double lambda, double tau,
                                  const QuadratureRule& quad);

// ---------------------------------------------------------------------------
// Load vectors

Vector assemble_scalar_source(const Mesh& mesh, const DofMap& p1,
                              const std::function<double(double, double)>& f,
                              const QuadratureRule& quad);
Vector assemble_vector_source(const Mesh& mesh, const DofMap& p2v,
                              const std::function<Vec2(double, double)>& f,
                              const QuadratureRule& quad);

/// (F'(phi), chi_i) with F'(phi) = (phi^3 - phi) / epsilon^2.
Vector assemble_nonlinear_fprime(const Mesh& mesh, const DofMap& p1, const Field& phi,
                                 double epsilon, const QuadratureRule& quad);

/// Capillary force (mu grad phi, v_i).
Vector assemble_capillary(const Mesh& mesh, const DofMap& p2v, const Field& phi,
                          const Field& mu, const QuadratureRule& quad);

/// Skew-symmetrized convection functional B(u, u, v_i).
Vector assemble_skew_convection(const Mesh& mesh, const DofMap& p2v, const Field& u,
                                const QuadratureRule& quad);

/// B(u, v, w) = 1/2 integral of ((u.grad)v.w - (u.grad)w.v).
double trilinear_skew(const Mesh& mesh, const Field& u, const Field& v, const Field& w,
                      const QuadratureRule& quad);

/// (u . grad phi, mu) for the SAV update.
double convection_inner(const Mesh& mesh, const Field& u, const Field& phi, const Field& mu,
                        const QuadratureRule& quad);

/// (mu grad phi, u).
double capillary_inner(const Mesh& mesh, const Field& phi, const Field& mu, const Field& u,
                       const QuadratureRule& quad);

/// integral of F(phi) = (phi^2 - 1)^2 / (4 epsilon^2).
double integrate_double_well(const Mesh& mesh, const Field& phi, double epsilon,
                             const QuadratureRule& quad);

/// (field, 1).
double integrate_field(const Mesh& mesh, const Field& field, const QuadratureRule& quad);

/// Row sums of the P1 mass matrix (the exact integrals of the hat functions).
Vector lumped_mass_p1(const Mesh& mesh, const DofMap& p1);

} // namespace chns
