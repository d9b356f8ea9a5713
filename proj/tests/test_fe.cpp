#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "chns/fe.hpp"

using namespace chns;

TEST_CASE("P1 values at the barycenter") {
    const BasisEval b = eval_basis(ElementKind::P1_scalar, {1.0 / 3, 1.0 / 3});
    REQUIRE(b.values.size() == 3);
    for (double v : b.values) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("P2 Lagrange property at vertices and edge midpoints") {
    // Node order: vertices (0,0),(1,0),(0,1) then midpoints of
    // (v0,v1),(v1,v2),(v2,v0).
    const Vec2 nodes[6] = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}};
    for (int n = 0; n < 6; ++n) {
        const BasisEval b = eval_basis(ElementKind::P2_scalar, nodes[n]);
        for (int k = 0; k < 6; ++k) {
            CHECK(b.values[k] == doctest::Approx(k == n ? 1.0 : 0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("partition of unity and zero gradient sum at random points") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double a = U(rng), b = U(rng);
        if (a + b > 1.0) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        for (ElementKind kind : {ElementKind::P1_scalar, ElementKind::P2_scalar}) {
            const BasisEval e = eval_basis(kind, {a, b});
            double vs = 0.0, gx = 0.0, gy = 0.0;
            for (size_t k = 0; k < e.values.size(); ++k) {
                vs += e.values[k];
                gx += e.gradients[k].x;
                gy += e.gradients[k].y;
            }
            CHECK(vs == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(gx == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(gy == doctest::Approx(0.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("points outside the reference triangle are rejected") {
    CHECK_THROWS(eval_basis(ElementKind::P1_scalar, {0.7, 0.7}));
    CHECK_THROWS(eval_basis(ElementKind::P2_scalar, {-0.1, 0.2}));
}

TEST_CASE("quadrature weights and low-order moments") {
    for (int degree : {4, 5, 6}) {
        const QuadratureRule q = quadrature(degree);
        double w = 0.0, mx = 0.0;
        for (size_t k = 0; k < q.points.size(); ++k) {
            CHECK(q.weights[k] > 0.0);
            w += q.weights[k];
            mx += q.weights[k] * q.points[k].x;
        }
        CHECK(w == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(mx == doctest::Approx(1.0 / 6).epsilon(1e-13));
    }
    CHECK_THROWS(quadrature(3));
    CHECK_THROWS(quadrature(7));
}

namespace {
// Analytic integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double ref_moment(int a, int b) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    return fact(a) * fact(b) / fact(a + b + 2);
}
} // namespace

TEST_CASE("quadrature integrates all monomials up to its stated degree") {
    for (int degree : {4, 5, 6}) {
        const QuadratureRule q = quadrature(degree);
        for (int a = 0; a + 0 <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                double s = 0.0;
                for (size_t k = 0; k < q.points.size(); ++k) {
                    s += q.weights[k] * std::pow(q.points[k].x, a) *
                         std::pow(q.points[k].y, b);
                }
                CHECK(s == doctest::Approx(ref_moment(a, b)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("dof counts on tiny meshes") {
    const Mesh m1 = Mesh::rectangle({0, 1, 0, 1}, 1, 1);
    const DofMap p1(m1, ElementKind::P1_scalar);
    CHECK(p1.n_dofs() == 4);
    CHECK(p1.boundary_dofs().size() == 4);

    const DofMap p2(m1, ElementKind::P2_scalar);
    CHECK(p2.n_dofs() == 9); // 4 vertices + 5 edges

    const Mesh m2 = Mesh::rectangle({0, 1, 0, 1}, 2, 2);
    const DofMap p2v(m2, ElementKind::P2_vector2);
    CHECK(p2v.n_dofs() == 50); // 2 * (9 vertices + 16 edges)
    CHECK(p2v.boundary_dofs().size() == 32); // both components of 8+8 boundary nodes
}

TEST_CASE("shared nodes get the same global index from adjacent triangles") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 2, 2);
    for (ElementKind kind :
         {ElementKind::P1_scalar, ElementKind::P2_scalar, ElementKind::P2_vector2}) {
        const DofMap dm(m, kind);
        // The diagonal edge of each cell is shared by the cell's two
        // triangles; vertex dofs must also match across them.
        for (int c = 0; c < 4; ++c) {
            const auto& lo = dm.cell_dofs()[2 * c];
            const auto& up = dm.cell_dofs()[2 * c + 1];
            if (kind == ElementKind::P2_vector2) {
                // Interleaved components: [v0x, v0y, v1x, v1y, v2x, ...].
                CHECK(lo[0] == up[0]); // v00 x
                CHECK(lo[1] == up[1]); // v00 y
                CHECK(lo[4] == up[2]); // v11 x
                CHECK(lo[5] == up[3]); // v11 y
            } else {
                CHECK(lo[0] == up[0]); // v00
                CHECK(lo[2] == up[1]); // v11
            }
        }
    }
}

TEST_CASE("interpolation nodes reproduce affine and quadratic functions") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 3, 3);
    const DofMap p2(m, ElementKind::P2_scalar);
    auto f = [](Vec2 p) { return 2.0 * p.x * p.x - p.x * p.y + 0.5 * p.y + 1.0; };
    std::vector<double> coeffs(p2.n_dofs());
    for (int i = 0; i < p2.n_dofs(); ++i) coeffs[i] = f(p2.dof_coords()[i]);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double a = U(rng), b = U(rng);
        if (a + b > 1.0) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        const int t = static_cast<int>(rng() % m.n_triangles());
        const BasisEval e = eval_basis(ElementKind::P2_scalar, {a, b});
        double val = 0.0;
        for (int k = 0; k < 6; ++k) val += coeffs[p2.cell_dofs()[t][k]] * e.values[k];
        // Physical point of the reference point.
        const auto& tri = m.triangles()[t];
        const Vec2 v0 = m.vertices()[tri[0]], v1 = m.vertices()[tri[1]],
                   v2 = m.vertices()[tri[2]];
        const Vec2 xp{v0.x + (v1.x - v0.x) * a + (v2.x - v0.x) * b,
                      v0.y + (v1.y - v0.y) * a + (v2.y - v0.y) * b};
        CHECK(val == doctest::Approx(f(xp)).epsilon(1e-13));
    }
}

TEST_CASE("dof numbering is deterministic") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 3, 2);
    const DofMap a(m, ElementKind::P2_vector2);
    const DofMap b(m, ElementKind::P2_vector2);
    CHECK(a.cell_dofs() == b.cell_dofs());
    CHECK(a.boundary_dofs() == b.boundary_dofs());
}
