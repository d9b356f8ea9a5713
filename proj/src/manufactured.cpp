#include "chns/manufactured.hpp"

#include <cmath>

namespace chns {

namespace {
constexpr double pi = 3.14159265358979323846;
}

ManufacturedSolution::ManufacturedSolution(const SchemeParams& params)
    : lambda_(params.lambda),
      epsilon_(params.epsilon),
      mobility_(params.mobility),
      nu_(params.nu),
      C0_(params.C0),
      coef_f_(params.lambda_on_fprime ? params.lambda : 1.0) {}

double ManufacturedSolution::phi(double x, double y, double t) const {
    return 2.0 + std::sin(t) * std::cos(pi * x) * std::cos(pi * y);
}

double ManufacturedSolution::phi_t(double x, double y, double t) const {
    return std::cos(t) * std::cos(pi * x) * std::cos(pi * y);
}

Vec2 ManufacturedSolution::grad_phi(double x, double y, double t) const {
    const double a = std::sin(t);
    return {-pi * a * std::sin(pi * x) * std::cos(pi * y),
            -pi * a * std::cos(pi * x) * std::sin(pi * y)};
}

double ManufacturedSolution::mu(double x, double y, double t) const {
    const double ph = phi(x, y, t);
    const double g = ph - 2.0;
    const double fprime = (ph * ph * ph - ph) / (epsilon_ * epsilon_);
    return 2.0 * pi * pi * lambda_ * g + coef_f_ * fprime;
}

Vec2 ManufacturedSolution::grad_mu(double x, double y, double t) const {
    const double ph = phi(x, y, t);
    const double fsecond = (3.0 * ph * ph - 1.0) / (epsilon_ * epsilon_);
    const Vec2 gp = grad_phi(x, y, t);
    const double s = 2.0 * pi * pi * lambda_ + coef_f_ * fsecond;
    return {s * gp.x, s * gp.y};
}

double ManufacturedSolution::laplace_mu(double x, double y, double t) const {
    const double ph = phi(x, y, t);
    const double g = ph - 2.0;
    const Vec2 gp = grad_phi(x, y, t);
    const double grad2 = gp.x * gp.x + gp.y * gp.y;
    const double lap_phi = -2.0 * pi * pi * g;
    const double lap_fprime =
        ((3.0 * ph * ph - 1.0) * lap_phi + 6.0 * ph * grad2) / (epsilon_ * epsilon_);
    return 2.0 * pi * pi * lambda_ * lap_phi + coef_f_ * lap_fprime;
}

Vec2 ManufacturedSolution::u(double x, double y, double t) const {
    const double a = std::sin(t);
    const double s1 = std::sin(pi * x), s2 = std::sin(pi * y);
    return {pi * a * s1 * s1 * std::sin(2.0 * pi * y),
            -pi * a * s2 * s2 * std::sin(2.0 * pi * x)};
}

Vec2 ManufacturedSolution::u_t(double x, double y, double t) const {
    const double ad = std::cos(t);
    const double s1 = std::sin(pi * x), s2 = std::sin(pi * y);
    return {pi * ad * s1 * s1 * std::sin(2.0 * pi * y),
            -pi * ad * s2 * s2 * std::sin(2.0 * pi * x)};
}

void ManufacturedSolution::grad_u(double x, double y, double t, double (&g)[2][2]) const {
    const double a = std::sin(t);
    const double s1 = std::sin(pi * x), s2 = std::sin(pi * y);
    const double S1 = std::sin(2.0 * pi * x), S2 = std::sin(2.0 * pi * y);
    const double C1 = std::cos(2.0 * pi * x), C2 = std::cos(2.0 * pi * y);
    g[0][0] = pi * pi * a * S1 * S2;
    g[0][1] = 2.0 * pi * pi * a * s1 * s1 * C2;
    g[1][0] = -2.0 * pi * pi * a * s2 * s2 * C1;
    g[1][1] = -pi * pi * a * S1 * S2;
}

Vec2 ManufacturedSolution::laplace_u(double x, double y, double t) const {
    const double a = std::sin(t);
    const double s1 = std::sin(pi * x), s2 = std::sin(pi * y);
    const double S1 = std::sin(2.0 * pi * x), S2 = std::sin(2.0 * pi * y);
    const double C1 = std::cos(2.0 * pi * x), C2 = std::cos(2.0 * pi * y);
    const double p3 = 2.0 * pi * pi * pi * a;
    return {p3 * S2 * (C1 - 2.0 * s1 * s1), -p3 * S1 * (C2 - 2.0 * s2 * s2)};
}

double ManufacturedSolution::p(double x, double y, double t) const {
    return std::cos(pi * x) * std::sin(pi * y) * std::sin(t);
}

Vec2 ManufacturedSolution::grad_p(double x, double y, double t) const {
    const double a = std::sin(t);
    return {-pi * a * std::sin(pi * x) * std::sin(pi * y),
            pi * a * std::cos(pi * x) * std::cos(pi * y)};
}

double ManufacturedSolution::f_phi(double x, double y, double t) const {
    const Vec2 vel = u(x, y, t);
    const Vec2 gp = grad_phi(x, y, t);
    return phi_t(x, y, t) + vel.x * gp.x + vel.y * gp.y -
           mobility_ * laplace_mu(x, y, t);
}

Vec2 ManufacturedSolution::f_u(double x, double y, double t) const {
    const Vec2 vel = u(x, y, t);
    const Vec2 ut = u_t(x, y, t);
    double g[2][2];
    grad_u(x, y, t, g);
    const Vec2 lap = laplace_u(x, y, t);
    const Vec2 gp = grad_p(x, y, t);
    const double muv = mu(x, y, t);
    const Vec2 gphi = grad_phi(x, y, t);
    return {ut.x + vel.x * g[0][0] + vel.y * g[0][1] - nu_ * lap.x + gp.x - muv * gphi.x,
            ut.y + vel.x * g[1][0] + vel.y * g[1][1] - nu_ * lap.y + gp.y - muv * gphi.y};
}

double ManufacturedSolution::E1_exact(double t) const {
    // integral of (phi^2-1)^2 with phi = 2 + sin(t) cos(pi x) cos(pi y):
    // cross terms with odd cosine powers vanish on [0,1]^2.
    const double a2 = std::sin(t) * std::sin(t);
    const double num = 9.0 + 5.5 * a2 + 0.140625 * a2 * a2;
    return num / (4.0 * epsilon_ * epsilon_);
}

double ManufacturedSolution::rho_exact(double t) const {
    return std::sqrt(E1_exact(t) + C0_);
}

} // namespace chns
