#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "chns/verification.hpp"

using namespace chns;

namespace {

constexpr double pi = 3.14159265358979323846;

SchemeParams base_params() {
    SchemeParams p;
    p.mobility = 0.1;
    p.lambda = 0.04;
    p.nu = 0.01;
    p.epsilon = 0.2;
    return p;
}

// Fourth-order central differences; h = 1e-3 puts the truncation and
// rounding errors both far below the comparison tolerances.
template <typename F>
double diff1(F f, double x, double h = 1e-3) {
    return (8.0 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12.0 * h);
}

template <typename F>
double diff2(F f, double x, double h = 1e-3) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) -
            f(x - 2 * h)) /
           (12.0 * h * h);
}

void check_close(double got, double want, double tol_scale) {
    CHECK(std::abs(got - want) <= tol_scale * (1.0 + std::abs(want)));
}

} // namespace

TEST_CASE("manufactured solution at t = 0") {
    const ManufacturedSolution ms(base_params());
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double x = unit(gen), y = unit(gen);
        CHECK(ms.phi(x, y, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(ms.u(x, y, 0.0).x == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(ms.u(x, y, 0.0).y == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(ms.p(x, y, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
        // With the velocity and all spatial variation switched off, the
        // sources reduce to the plain time derivatives.
        check_close(ms.f_phi(x, y, 0.0), std::cos(pi * x) * std::cos(pi * y), 1e-13);
        const Vec2 fu = ms.f_u(x, y, 0.0);
        const Vec2 ut = ms.u_t(x, y, 0.0);
        check_close(fu.x, ut.x, 1e-13);
        check_close(fu.y, ut.y, 1e-13);
    }
}

TEST_CASE("manufactured derivatives match finite differences") {
    const ManufacturedSolution ms(base_params());
    std::mt19937 gen(29);
    std::uniform_real_distribution<double> pos(0.05, 0.95);
    std::uniform_real_distribution<double> time(0.1, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double x = pos(gen), y = pos(gen), t = time(gen);

        check_close(ms.phi_t(x, y, t),
                    diff1([&](double s) { return ms.phi(x, y, s); }, t), 1e-9);
        const Vec2 gphi = ms.grad_phi(x, y, t);
        check_close(gphi.x, diff1([&](double s) { return ms.phi(s, y, t); }, x), 1e-9);
        check_close(gphi.y, diff1([&](double s) { return ms.phi(x, s, t); }, y), 1e-9);

        const Vec2 gmu = ms.grad_mu(x, y, t);
        check_close(gmu.x, diff1([&](double s) { return ms.mu(s, y, t); }, x), 1e-8);
        check_close(gmu.y, diff1([&](double s) { return ms.mu(x, s, t); }, y), 1e-8);
        check_close(ms.laplace_mu(x, y, t),
                    diff2([&](double s) { return ms.mu(s, y, t); }, x) +
                        diff2([&](double s) { return ms.mu(x, s, t); }, y),
                    1e-6);

        const Vec2 ut = ms.u_t(x, y, t);
        check_close(ut.x, diff1([&](double s) { return ms.u(x, y, s).x; }, t), 1e-9);
        check_close(ut.y, diff1([&](double s) { return ms.u(x, y, s).y; }, t), 1e-9);
        double g[2][2];
        ms.grad_u(x, y, t, g);
        check_close(g[0][0], diff1([&](double s) { return ms.u(s, y, t).x; }, x), 1e-9);
        check_close(g[0][1], diff1([&](double s) { return ms.u(x, s, t).x; }, y), 1e-9);
        check_close(g[1][0], diff1([&](double s) { return ms.u(s, y, t).y; }, x), 1e-9);
        check_close(g[1][1], diff1([&](double s) { return ms.u(x, s, t).y; }, y), 1e-9);
        const Vec2 lap = ms.laplace_u(x, y, t);
        check_close(lap.x,
                    diff2([&](double s) { return ms.u(s, y, t).x; }, x) +
                        diff2([&](double s) { return ms.u(x, s, t).x; }, y),
                    1e-7);
        check_close(lap.y,
                    diff2([&](double s) { return ms.u(s, y, t).y; }, x) +
                        diff2([&](double s) { return ms.u(x, s, t).y; }, y),
                    1e-7);

        const Vec2 gp = ms.grad_p(x, y, t);
        check_close(gp.x, diff1([&](double s) { return ms.p(s, y, t); }, x), 1e-9);
        check_close(gp.y, diff1([&](double s) { return ms.p(x, s, t); }, y), 1e-9);
    }
}

TEST_CASE("closed-form double-well integral matches numeric quadrature") {
    const SchemeParams params = base_params();
    const ManufacturedSolution ms(params);
    // Composite Simpson on a 512^2 grid; the integrand is smooth, so the
    // quadrature error sits far below the tolerance.
    const int n = 512;
    const double h = 1.0 / n;
    auto simpson_w = [&](int i) { return i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    for (double t : {0.0, 0.35, 1.0}) {
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                const double ph = ms.phi(i * h, j * h, t);
                const double s = ph * ph - 1.0;
                acc += simpson_w(i) * simpson_w(j) * s * s;
            }
        }
        acc *= h * h / 9.0 / (4.0 * params.epsilon * params.epsilon);
        CHECK(ms.E1_exact(t) == doctest::Approx(acc).epsilon(1e-9));
        CHECK(ms.rho_exact(t) * ms.rho_exact(t) - params.C0 ==
              doctest::Approx(ms.E1_exact(t)).epsilon(1e-12));
    }
}

TEST_CASE("error norms vanish on exactly representable fields") {
    const Mesh mesh = Mesh::rectangle({0.0, 1.0, 0.0, 1.0}, 8, 8);
    const DofMap p1(mesh, ElementKind::P1_scalar);
    const DofMap p2v(mesh, ElementKind::P2_vector2);

    auto lin = [](double x, double y) { return 0.3 + 0.7 * x - 0.2 * y; };
    const Field f = interpolate(mesh, p1, lin);
    const ScalarExact exact{lin, [](double, double) { return Vec2{0.7, -0.2}; }};
    CHECK(error_norm(mesh, f, exact, ErrorNorm::L2) <= 1e-13);
    CHECK(error_norm(mesh, f, exact, ErrorNorm::H1_semi) <= 1e-13);

    auto quad_v = [](double x, double y) { return Vec2{x * x - y, x * y + 2.0}; };
    const Field v = interpolate_vector(mesh, p2v, quad_v);
    const VectorExact exact_v{quad_v, [](double x, double y, double(&g)[2][2]) {
                                  g[0][0] = 2.0 * x;
                                  g[0][1] = -1.0;
                                  g[1][0] = y;
                                  g[1][1] = x;
                              }};
    CHECK(error_norm(mesh, v, exact_v, ErrorNorm::L2) <= 1e-12);
    CHECK(error_norm(mesh, v, exact_v, ErrorNorm::H1_semi) <= 1e-12);
}

TEST_CASE("error norm against a constant equals the exact distance") {
    const Mesh mesh = Mesh::rectangle({0.0, 1.0, 0.0, 1.0}, 4, 4);
    const DofMap p1(mesh, ElementKind::P1_scalar);
    const Field zero(p1, 0.0);
    const ScalarExact two{[](double, double) { return 2.0; },
                          [](double, double) { return Vec2{0.0, 0.0}; }};
    // ||0 - 2||_{L2([0,1]^2)} = 2, gradient error zero.
    CHECK(error_norm(mesh, zero, two, ErrorNorm::L2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(error_norm(mesh, zero, two, ErrorNorm::H1_semi) <= 1e-13);
}

TEST_CASE("error norm of a random field matches the assembled quadratic forms") {
    const Mesh mesh = Mesh::rectangle({0.0, 1.0, 0.0, 1.0}, 5, 4);
    const DofMap p1(mesh, ElementKind::P1_scalar);
    const QuadratureRule quad = quadrature(5);
    Field f(p1);
    std::mt19937 gen(71);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (double& c : f.coeffs) c = unit(gen);

    const ScalarExact zero{[](double, double) { return 0.0; },
                           [](double, double) { return Vec2{0.0, 0.0}; }};
    const SparseMatrix Ms = assemble_mass_s(mesh, p1, quad);
    const SparseMatrix Ks = assemble_stiffness_s(mesh, p1, quad);
    const double l2 = std::sqrt(dot(f.coeffs, Ms.multiply(f.coeffs)));
    const double h1 = std::sqrt(dot(f.coeffs, Ks.multiply(f.coeffs)));
    CHECK(error_norm(mesh, f, zero, ErrorNorm::L2) == doctest::Approx(l2).epsilon(1e-12));
    CHECK(error_norm(mesh, f, zero, ErrorNorm::H1_semi) ==
          doctest::Approx(h1).epsilon(1e-12));
}

TEST_CASE("convergence study structure on a two-entry refinement") {
    const RateTable table = convergence_study({2, 4}, base_params(), 0.008);
    REQUIRE(table.error.empty());
    REQUIRE(table.completed() == 2);
    CHECK(table.h[0] == doctest::Approx(0.5));
    CHECK(table.h[1] == doctest::Approx(0.25));
    REQUIRE(table.norms == std::vector<std::string>{"phi_L2", "mu_L2", "p_L2", "u_L2",
                                                    "grad_u_L2", "rho"});
    for (size_t k = 0; k < table.norms.size(); ++k) {
        REQUIRE(table.errors[k].size() == 2);
        CHECK(table.errors[k][0] > 0.0);
        CHECK(table.errors[k][1] > 0.0);
        CHECK(std::isnan(table.rates[k][0]));
        CHECK(std::isfinite(table.rates[k][1]));
    }

    const std::string text = format_rate_table(table);
    CHECK(text.find("phi_L2") != std::string::npos);
    CHECK(text.find("rate") != std::string::npos);
    CHECK(text.find("aborted") == std::string::npos);

    const std::string csv = rate_table_csv(table);
    CHECK(csv.rfind("h,norm,error,rate\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13); // header + 2 h x 6 norms
}

TEST_CASE("convergence study input validation and abort reporting") {
    CHECK_THROWS_AS(convergence_study({}, base_params(), 0.01), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study({4, 4}, base_params(), 0.01), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study({4}, base_params(), 0.0), std::invalid_argument);

    SchemeParams bad = base_params();
    bad.nu = -1.0;
    const RateTable table = convergence_study({2}, bad, 0.008);
    CHECK(table.completed() == 0);
    CHECK(!table.error.empty());
    CHECK(format_rate_table(table).find("aborted") != std::string::npos);
}
