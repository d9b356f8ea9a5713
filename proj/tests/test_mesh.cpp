#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "chns/mesh.hpp"

using namespace chns;

TEST_CASE("smallest mesh: unit square 1x1") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 1, 1);
    CHECK(m.n_vertices() == 4);
    CHECK(m.n_triangles() == 2);
    CHECK(m.n_edges() == 5);
    for (const auto& bv : m.boundary_vertex()) CHECK(bv);
}

TEST_CASE("counting formulas on 4x4 unit square") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 4, 4);
    CHECK(m.n_vertices() == 25);
    CHECK(m.n_triangles() == 32);
}

TEST_CASE("boundary flags on the 64x64 centered square") {
    const Mesh m = Mesh::rectangle({-0.4, 0.4, -0.4, 0.4}, 64, 64);
    CHECK(m.h() == doctest::Approx(std::sqrt(2.0) * 0.8 / 64).epsilon(1e-14));
    // Direct enumeration over vertex coordinates.
    int flagged = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        const Vec2 p = m.vertices()[v];
        const bool expect = p.x == -0.4 || p.x == 0.4 || p.y == -0.4 || p.y == 0.4;
        CHECK(m.boundary_vertex()[v] == expect);
        flagged += m.boundary_vertex()[v];
    }
    CHECK(flagged == 4 * 64);
}

TEST_CASE("triangle areas are positive and sum to the domain area") {
    const Mesh m = Mesh::rectangle({-0.3, 1.7, 0.2, 0.9}, 5, 3);
    double total = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) {
        const double a = m.geometry(t).area;
        CHECK(a > 0.0);
        total += a;
    }
    CHECK(total == doctest::Approx(m.domain().area()).epsilon(1e-12));
}

TEST_CASE("geometry of unit-square triangles") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 1, 1);
    CHECK(m.geometry(0).area == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.geometry(1).area == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(m.geometry(2), std::out_of_range);
    CHECK_THROWS_AS(m.geometry(-1), std::out_of_range);
}

TEST_CASE("jacobian maps the reference triangle onto the cell") {
    // First triangle of a 1x1 mesh over [0,2]x[0,3] is {(0,0),(2,0),(2,3)}.
    const Mesh m = Mesh::rectangle({0, 2, 0, 3}, 1, 1);
    const TriangleGeometry g = m.geometry(0);
    CHECK(g.area == doctest::Approx(3.0).epsilon(1e-15));
    // Columns are the edge vectors v1-v0 and v2-v0.
    CHECK(g.jac[0][0] == doctest::Approx(2.0));
    CHECK(g.jac[1][0] == doctest::Approx(0.0));
    CHECK(g.jac[0][1] == doctest::Approx(2.0));
    CHECK(g.jac[1][1] == doctest::Approx(3.0));
    // inv_jac_t * jac^T = identity.
    double id[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) id[i][j] += g.inv_jac_t[i][k] * g.jac[j][k];
        }
    }
    CHECK(id[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(id[0][1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(id[1][0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(id[1][1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("edges are deduplicated and classified by sharing count") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 3, 2);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : m.edges()) {
        CHECK(e[0] < e[1]);
        CHECK(seen.insert({e[0], e[1]}).second);
    }
    std::map<int, int> use;
    for (int t = 0; t < m.n_triangles(); ++t) {
        for (int le = 0; le < 3; ++le) ++use[m.triangle_edges()[t][le]];
    }
    for (int e = 0; e < m.n_edges(); ++e) {
        CHECK(use[e] == (m.boundary_edge()[e] ? 1 : 2));
    }
}

TEST_CASE("refinement halves h exactly") {
    const Rect d{0.1, 2.1, -1.0, 0.5};
    const Mesh coarse = Mesh::rectangle(d, 3, 5);
    const Mesh fine = Mesh::rectangle(d, 6, 10);
    CHECK(fine.h() == doctest::Approx(coarse.h() / 2).epsilon(1e-15));
}

TEST_CASE("edge midpoints lie between their endpoints") {
    const Mesh m = Mesh::rectangle({0, 1, 0, 1}, 2, 2);
    for (int e = 0; e < m.n_edges(); ++e) {
        const auto& ed = m.edges()[e];
        const Vec2 mid = m.edge_midpoint(e);
        CHECK(mid.x == doctest::Approx(0.5 * (m.vertices()[ed[0]].x + m.vertices()[ed[1]].x)));
        CHECK(mid.y == doctest::Approx(0.5 * (m.vertices()[ed[0]].y + m.vertices()[ed[1]].y)));
    }
}

TEST_CASE("invalid construction is rejected") {
    CHECK_THROWS_AS(Mesh::rectangle({0, 1, 0, 1}, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::rectangle({0, 1, 0, 1}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::rectangle({1, 0, 0, 1}, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::rectangle({0, 1, 1, 1}, 1, 1), std::invalid_argument);
}
