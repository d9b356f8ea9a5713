#include "chns/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace chns {

namespace {

Vec2 physical_gradient(const TriangleGeometry& g, Vec2 ref_grad) {
    return {g.inv_jac_t[0][0] * ref_grad.x + g.inv_jac_t[0][1] * ref_grad.y,
            g.inv_jac_t[1][0] * ref_grad.x + g.inv_jac_t[1][1] * ref_grad.y};
}

Vec2 map_point(const Mesh& mesh, int t, Vec2 ref) {
    const auto& tri = mesh.triangles()[t];
    const Vec2 p0 = mesh.vertices()[tri[0]];
    const Vec2 p1 = mesh.vertices()[tri[1]];
    const Vec2 p2 = mesh.vertices()[tri[2]];
    return p0 + ref.x * (p1 - p0) + ref.y * (p2 - p0);
}

ElementKind scalar_kind_of(const DofMap& map) {
    return map.kind() == ElementKind::P1_scalar ? ElementKind::P1_scalar
                                                : ElementKind::P2_scalar;
}

// Precomputed per-quadrature-point basis tables (reference space).
struct BasisTable {
    std::vector<BasisEval> at_qp;
    BasisTable(ElementKind kind, const QuadratureRule& quad) {
        at_qp.reserve(quad.points.size());
        for (Vec2 p : quad.points) at_qp.push_back(eval_basis(kind, p));
    }
};

struct VectorSample {
    Vec2 value{};
    double grad[2][2] = {}; // grad[i][j] = d u_i / d x_j
};

VectorSample sample_vector(const Field& f, const std::vector<int>& dofs,
                           const BasisEval& basis, const TriangleGeometry& g) {
    VectorSample s;
    const int nn = static_cast<int>(basis.values.size());
    for (int a = 0; a < nn; ++a) {
        const Vec2 grad = physical_gradient(g, basis.gradients[a]);
        const double cx = f.coeffs[dofs[2 * a]];
        const double cy = f.coeffs[dofs[2 * a + 1]];
        s.value.x += cx * basis.values[a];
        s.value.y += cy * basis.values[a];
        s.grad[0][0] += cx * grad.x;
        s.grad[0][1] += cx * grad.y;
        s.grad[1][0] += cy * grad.x;
        s.grad[1][1] += cy * grad.y;
    }
    return s;
}

struct ScalarSample {
    double value = 0.0;
    Vec2 gradient{};
};

ScalarSample sample_scalar(const Field& f, const std::vector<int>& dofs,
                           const BasisEval& basis, const TriangleGeometry& g) {
    ScalarSample s;
    const int nn = static_cast<int>(basis.values.size());
    for (int a = 0; a < nn; ++a) {
        const double c = f.coeffs[dofs[a]];
        s.value += c * basis.values[a];
        const Vec2 grad = physical_gradient(g, basis.gradients[a]);
        s.gradient.x += c * grad.x;
        s.gradient.y += c * grad.y;
    }
    return s;
}

template <typename CellKernel>
SparseMatrix assemble_matrix(const Mesh& mesh, int n_rows, int n_cols, CellKernel&& kernel) {
    TripletBuffer buf;
    for (int t = 0; t < mesh.n_triangles(); ++t) kernel(t, buf);
    return SparseMatrix::from_triplets(buf, n_rows, n_cols);
}

} // namespace

FieldValue eval_field(const Mesh& mesh, const Field& field, int t, Vec2 ref_point) {
    if (t < 0 || t >= mesh.n_triangles()) {
        throw std::out_of_range("eval_field: triangle index out of range");
    }
    const DofMap& map = *field.dofmap;
    const TriangleGeometry g = mesh.geometry(t);
    const BasisEval basis = eval_basis(scalar_kind_of(map), ref_point);
    const auto& dofs = map.cell_dofs()[t];
    FieldValue out;
    if (map.kind() == ElementKind::P2_vector2) {
        const VectorSample s = sample_vector(field, dofs, basis, g);
        out.vector = s.value;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out.grad[i][j] = s.grad[i][j];
    } else {
        const ScalarSample s = sample_scalar(field, dofs, basis, g);
        out.scalar = s.value;
        out.gradient = s.gradient;
    }
    return out;
}

Field interpolate(const Mesh& mesh, const DofMap& dofmap,
                  const std::function<double(double, double)>& f) {
    (void)mesh;
    Field out(dofmap);
    for (int d = 0; d < dofmap.n_dofs(); ++d) {
        const Vec2 p = dofmap.dof_coords()[d];
        out.coeffs[d] = f(p.x, p.y);
    }
    return out;
}

Field interpolate_vector(const Mesh& mesh, const DofMap& dofmap,
                         const std::function<Vec2(double, double)>& f) {
    (void)mesh;
    Field out(dofmap);
    for (int node = 0; node < dofmap.n_nodes(); ++node) {
        const Vec2 p = dofmap.dof_coords()[2 * node];
        const Vec2 v = f(p.x, p.y);
        out.coeffs[2 * node] = v.x;
        out.coeffs[2 * node + 1] = v.y;
    }
    return out;
}

SparseMatrix assemble_mass_s(const Mesh& mesh, const DofMap& p1, const QuadratureRule& quad) {
    const BasisTable table(scalar_kind_of(p1), quad);
    const int nl = local_node_count(scalar_kind_of(p1));
    return assemble_matrix(mesh, p1.n_dofs(), p1.n_dofs(), [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double w = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j)
                    buf.add(dofs[i], dofs[j], w * b.values[i] * b.values[j]);
        }
    });
}

SparseMatrix assemble_stiffness_s(const Mesh& mesh, const DofMap& p1,
                                  const QuadratureRule& quad) {
    const BasisTable table(scalar_kind_of(p1), quad);
    const int nl = local_node_count(scalar_kind_of(p1));
    return assemble_matrix(mesh, p1.n_dofs(), p1.n_dofs(), [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double w = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            std::vector<Vec2> grads(nl);
            for (int a = 0; a < nl; ++a) grads[a] = physical_gradient(g, b.gradients[a]);
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j)
                    buf.add(dofs[i], dofs[j], w * dot(grads[i], grads[j]));
        }
    });
}

SparseMatrix assemble_mass_v(const Mesh& mesh, const DofMap& p2v, const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P2_scalar, quad);
    return assemble_matrix(mesh, p2v.n_dofs(), p2v.n_dofs(), [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p2v.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double w = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) {
                    const double m = w * b.values[i] * b.values[j];
                    buf.add(dofs[2 * i], dofs[2 * j], m);
                    buf.add(dofs[2 * i + 1], dofs[2 * j + 1], m);
                }
        }
    });
}

SparseMatrix assemble_stiffness_v(const Mesh& mesh, const DofMap& p2v,
                                  const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P2_scalar, quad);
    return assemble_matrix(mesh, p2v.n_dofs(), p2v.n_dofs(), [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p2v.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double w = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            std::vector<Vec2> grads(6);
            for (int a = 0; a < 6; ++a) grads[a] = physical_gradient(g, b.gradients[a]);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) {
                    const double k = w * dot(grads[i], grads[j]);
                    buf.add(dofs[2 * i], dofs[2 * j], k);
                    buf.add(dofs[2 * i + 1], dofs[2 * j + 1], k);
                }
        }
    });
}

SparseMatrix assemble_convection_phi(const Mesh& mesh, const DofMap& p1, const Field& w,
                                     const QuadratureRule& quad) {
    const BasisTable p1_table(ElementKind::P1_scalar, quad);
    const BasisTable p2_table(ElementKind::P2_scalar, quad);
    return assemble_matrix(mesh, p1.n_dofs(), p1.n_dofs(), [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        const auto& wdofs = w.dofmap->cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& bp = p1_table.at_qp[q];
            const Vec2 wval = sample_vector(w, wdofs, p2_table.at_qp[q], g).value;
            for (int j = 0; j < 3; ++j) {
                const double conv = dot(wval, physical_gradient(g, bp.gradients[j]));
                for (int i = 0; i < 3; ++i) {
                    buf.add(dofs[i], dofs[j], wt * conv * bp.values[i]);
                }
            }
        }
    });
}

SparseMatrix assemble_pressure_grad(const Mesh& mesh, const DofMap& p1, const DofMap& p2v,
                                    const QuadratureRule& quad) {
    const BasisTable p1_table(ElementKind::P1_scalar, quad);
    const BasisTable p2_table(ElementKind::P2_scalar, quad);
    return assemble_matrix(mesh, p2v.n_dofs(), p1.n_dofs(), [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& pdofs = p1.cell_dofs()[t];
        const auto& vdofs = p2v.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& bp = p1_table.at_qp[q];
            const auto& bv = p2_table.at_qp[q];
            for (int j = 0; j < 3; ++j) {
                const Vec2 gp = physical_gradient(g, bp.gradients[j]);
                for (int i = 0; i < 6; ++i) {
                    buf.add(vdofs[2 * i], pdofs[j], wt * gp.x * bv.values[i]);
                    buf.add(vdofs[2 * i + 1], pdofs[j], wt * gp.y * bv.values[i]);
                }
            }
        }
    });
}

SparseMatrix assemble_ch_coupling(const Mesh& mesh, const DofMap& p1, const Field& w,
                                  double mobility, double lambda, double tau,
                                  const QuadratureRule& quad) {
    const int n = p1.n_dofs();
    const BasisTable p1_table(ElementKind::P1_scalar, quad);
    const BasisTable p2_table(ElementKind::P2_scalar, quad);
    return assemble_matrix(mesh, 2 * n, 2 * n, [&](int t, TripletBuffer& buf) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        const auto& wdofs = w.dofmap->cell_dofs()[t];
        double mass[3][3] = {}, stiff[3][3] = {}, conv[3][3] = {};
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& bp = p1_table.at_qp[q];
            const Vec2 wval = sample_vector(w, wdofs, p2_table.at_qp[q], g).value;
            Vec2 grads[3];
            for (int a = 0; a < 3; ++a) grads[a] = physical_gradient(g, bp.gradients[a]);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    mass[i][j] += wt * bp.values[i] * bp.values[j];
                    stiff[i][j] += wt * dot(grads[i], grads[j]);
                    conv[i][j] += wt * dot(wval, grads[j]) * bp.values[i];
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                buf.add(dofs[i], dofs[j], mass[i][j] / tau + conv[i][j]);
                buf.add(dofs[i], n + dofs[j], mobility * stiff[i][j]);
                buf.add(n + dofs[i], dofs[j], -lambda * stiff[i][j]);
                buf.add(n + dofs[i], n + dofs[j], mass[i][j]);
            }
        }
    });
}

Vector assemble_scalar_source(const Mesh& mesh, const DofMap& p1,
                              const std::function<double(double, double)>& f,
                              const QuadratureRule& quad) {
    const BasisTable table(scalar_kind_of(p1), quad);
    const int nl = local_node_count(scalar_kind_of(p1));
    Vector out(p1.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const Vec2 x = map_point(mesh, t, quad.points[q]);
            const double fv = f(x.x, x.y);
            const auto& b = table.at_qp[q];
            for (int i = 0; i < nl; ++i) out[dofs[i]] += wt * fv * b.values[i];
        }
    }
    return out;
}

Vector assemble_vector_source(const Mesh& mesh, const DofMap& p2v,
                              const std::function<Vec2(double, double)>& f,
                              const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P2_scalar, quad);
    Vector out(p2v.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p2v.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const Vec2 x = map_point(mesh, t, quad.points[q]);
            const Vec2 fv = f(x.x, x.y);
            const auto& b = table.at_qp[q];
            for (int i = 0; i < 6; ++i) {
                out[dofs[2 * i]] += wt * fv.x * b.values[i];
                out[dofs[2 * i + 1]] += wt * fv.y * b.values[i];
            }
        }
    }
    return out;
}

Vector assemble_nonlinear_fprime(const Mesh& mesh, const DofMap& p1, const Field& phi,
                                 double epsilon, const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P1_scalar, quad);
    const double inv_eps2 = 1.0 / (epsilon * epsilon);
    Vector out(p1.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            const double ph = sample_scalar(phi, dofs, b, g).value;
            const double fp = inv_eps2 * (ph * ph * ph - ph);
            for (int i = 0; i < 3; ++i) out[dofs[i]] += wt * fp * b.values[i];
        }
    }
    return out;
}

Vector assemble_capillary(const Mesh& mesh, const DofMap& p2v, const Field& phi,
                          const Field& mu, const QuadratureRule& quad) {
    const BasisTable p1_table(ElementKind::P1_scalar, quad);
    const BasisTable p2_table(ElementKind::P2_scalar, quad);
    Vector out(p2v.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& sdofs = phi.dofmap->cell_dofs()[t];
        const auto& vdofs = p2v.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& bp = p1_table.at_qp[q];
            const auto& bv = p2_table.at_qp[q];
            const ScalarSample ph = sample_scalar(phi, sdofs, bp, g);
            const double mv = sample_scalar(mu, sdofs, bp, g).value;
            const Vec2 force = mv * ph.gradient;
            for (int i = 0; i < 6; ++i) {
                out[vdofs[2 * i]] += wt * force.x * bv.values[i];
                out[vdofs[2 * i + 1]] += wt * force.y * bv.values[i];
            }
        }
    }
    return out;
}

Vector assemble_skew_convection(const Mesh& mesh, const DofMap& p2v, const Field& u,
                                const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P2_scalar, quad);
    Vector out(p2v.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p2v.cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            const VectorSample s = sample_vector(u, dofs, b, g);
            // (u.grad)u
            const Vec2 adv{s.value.x * s.grad[0][0] + s.value.y * s.grad[0][1],
                           s.value.x * s.grad[1][0] + s.value.y * s.grad[1][1]};
            for (int i = 0; i < 6; ++i) {
                const Vec2 gi = physical_gradient(g, b.gradients[i]);
                const double ugrad_vi = dot(s.value, gi); // (u.grad) N_i
                // Component c of 1/2[(u.grad)u . v_i - (u.grad)v_i . u]
                out[dofs[2 * i]] +=
                    0.5 * wt * (adv.x * b.values[i] - ugrad_vi * s.value.x);
                out[dofs[2 * i + 1]] +=
                    0.5 * wt * (adv.y * b.values[i] - ugrad_vi * s.value.y);
            }
        }
    }
    return out;
}

double trilinear_skew(const Mesh& mesh, const Field& u, const Field& v, const Field& w,
                      const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P2_scalar, quad);
    double total = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = u.dofmap->cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const auto& b = table.at_qp[q];
            const VectorSample su = sample_vector(u, dofs, b, g);
            const VectorSample sv = sample_vector(v, dofs, b, g);
            const VectorSample sw = sample_vector(w, dofs, b, g);
            const Vec2 adv_v{su.value.x * sv.grad[0][0] + su.value.y * sv.grad[0][1],
                             su.value.x * sv.grad[1][0] + su.value.y * sv.grad[1][1]};
            const Vec2 adv_w{su.value.x * sw.grad[0][0] + su.value.y * sw.grad[0][1],
                             su.value.x * sw.grad[1][0] + su.value.y * sw.grad[1][1]};
            total += 0.5 * wt * (dot(adv_v, sw.value) - dot(adv_w, sv.value));
        }
    }
    return total;
}

double convection_inner(const Mesh& mesh, const Field& u, const Field& phi, const Field& mu,
                        const QuadratureRule& quad) {
    const BasisTable p1_table(ElementKind::P1_scalar, quad);
    const BasisTable p2_table(ElementKind::P2_scalar, quad);
    double total = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& sdofs = phi.dofmap->cell_dofs()[t];
        const auto& vdofs = u.dofmap->cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const Vec2 uval = sample_vector(u, vdofs, p2_table.at_qp[q], g).value;
            const ScalarSample ph = sample_scalar(phi, sdofs, p1_table.at_qp[q], g);
            const double mv = sample_scalar(mu, sdofs, p1_table.at_qp[q], g).value;
            total += wt * dot(uval, ph.gradient) * mv;
        }
    }
    return total;
}

double capillary_inner(const Mesh& mesh, const Field& phi, const Field& mu, const Field& u,
                       const QuadratureRule& quad) {
    const BasisTable p1_table(ElementKind::P1_scalar, quad);
    const BasisTable p2_table(ElementKind::P2_scalar, quad);
    double total = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& sdofs = phi.dofmap->cell_dofs()[t];
        const auto& vdofs = u.dofmap->cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const Vec2 uval = sample_vector(u, vdofs, p2_table.at_qp[q], g).value;
            const ScalarSample ph = sample_scalar(phi, sdofs, p1_table.at_qp[q], g);
            const double mv = sample_scalar(mu, sdofs, p1_table.at_qp[q], g).value;
            total += wt * mv * dot(ph.gradient, uval);
        }
    }
    return total;
}

double integrate_double_well(const Mesh& mesh, const Field& phi, double epsilon,
                             const QuadratureRule& quad) {
    const BasisTable table(ElementKind::P1_scalar, quad);
    const double c = 1.0 / (4.0 * epsilon * epsilon);
    double total = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = phi.dofmap->cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            const double ph = sample_scalar(phi, dofs, table.at_qp[q], g).value;
            const double w2 = ph * ph - 1.0;
            total += wt * c * w2 * w2;
        }
    }
    return total;
}

double integrate_field(const Mesh& mesh, const Field& field, const QuadratureRule& quad) {
    const BasisTable table(scalar_kind_of(*field.dofmap), quad);
    double total = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = field.dofmap->cell_dofs()[t];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const double wt = 2.0 * g.area * quad.weights[q];
            total += wt * sample_scalar(field, dofs, table.at_qp[q], g).value;
        }
    }
    return total;
}

Vector lumped_mass_p1(const Mesh& mesh, const DofMap& p1) {
    Vector out(p1.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleGeometry g = mesh.geometry(t);
        const auto& dofs = p1.cell_dofs()[t];
        for (int i = 0; i < 3; ++i) out[dofs[i]] += g.area / 3.0;
    }
    return out;
}

} // namespace chns
