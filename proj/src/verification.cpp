#include "chns/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chns {

namespace {

Vec2 map_point(const Mesh& mesh, int t, Vec2 ref) {
    const auto& tri = mesh.triangles()[t];
    const Vec2 v0 = mesh.vertices()[tri[0]];
    const Vec2 v1 = mesh.vertices()[tri[1]];
    const Vec2 v2 = mesh.vertices()[tri[2]];
    return {v0.x + (v1.x - v0.x) * ref.x + (v2.x - v0.x) * ref.y,
            v0.y + (v1.y - v0.y) * ref.x + (v2.y - v0.y) * ref.y};
}

} // namespace

double error_norm(const Mesh& mesh, const Field& field, const ScalarExact& exact,
                  ErrorNorm norm) {
    const QuadratureRule quad = quadrature(5);
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double area2 = 2.0 * mesh.geometry(t).area;
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Vec2 xp = map_point(mesh, t, quad.points[q]);
            const FieldValue fv = eval_field(mesh, field, t, quad.points[q]);
            double contrib;
            if (norm == ErrorNorm::L2) {
                const double d = fv.scalar - exact.value(xp.x, xp.y);
                contrib = d * d;
            } else {
                const Vec2 ge = exact.gradient(xp.x, xp.y);
                const double dx = fv.gradient.x - ge.x;
                const double dy = fv.gradient.y - ge.y;
                contrib = dx * dx + dy * dy;
            }
            acc += area2 * quad.weights[q] * contrib;
        }
    }
    return std::sqrt(acc);
}

double error_norm(const Mesh& mesh, const Field& field, const VectorExact& exact,
                  ErrorNorm norm) {
    const QuadratureRule quad = quadrature(5);
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double area2 = 2.0 * mesh.geometry(t).area;
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Vec2 xp = map_point(mesh, t, quad.points[q]);
            const FieldValue fv = eval_field(mesh, field, t, quad.points[q]);
            double contrib = 0.0;
            if (norm == ErrorNorm::L2) {
                const Vec2 ve = exact.value(xp.x, xp.y);
                const double dx = fv.vector.x - ve.x;
                const double dy = fv.vector.y - ve.y;
                contrib = dx * dx + dy * dy;
            } else {
                double ge[2][2];
                exact.gradient(xp.x, xp.y, ge);
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) {
                        const double d = fv.grad[i][j] - ge[i][j];
                        contrib += d * d;
                    }
                }
            }
            acc += area2 * quad.weights[q] * contrib;
        }
    }
    return std::sqrt(acc);
}

namespace {

struct RunErrors {
    double phi_linf = 0.0;
    double u_linf = 0.0;
    double grad_u_linf = 0.0;
    double mu_l2_sq = 0.0; // tau-weighted sum of squares
    double p_l2_sq = 0.0;
    double rho_linf = 0.0;
};

RunErrors run_forced(int n, const SchemeParams& base, double T) {
    SchemeParams params = base;
    const double h = 1.0 / n;
    const double tau_nominal = h * h * h;
    const int steps = std::max(1, static_cast<int>(std::llround(T / tau_nominal)));
    params.tau = T / steps;

    const Mesh mesh = Mesh::rectangle({0.0, 1.0, 0.0, 1.0}, n, n);
    const Scheme scheme(mesh, params);
    const ManufacturedSolution ms(params);

    const Field phi0 = interpolate(mesh, scheme.p1(),
                                   [&](double x, double y) { return ms.phi(x, y, 0.0); });
    const Field u0 = interpolate_vector(
        mesh, scheme.p2v(), [&](double x, double y) { return ms.u(x, y, 0.0); });
    State state = scheme.initial_state(phi0, u0);

    RunErrors err;
    for (int step = 0; step < steps; ++step) {
        const double t_next = state.t + params.tau;
        SourceTerms sources;
        sources.f_phi = [&, t_next](double x, double y) { return ms.f_phi(x, y, t_next); };
        sources.f_u = [&, t_next](double x, double y) { return ms.f_u(x, y, t_next); };
        state = scheme.advance(state, sources).first;

        const double t = state.t;
        ScalarExact phi_e{[&, t](double x, double y) { return ms.phi(x, y, t); },
                          [&, t](double x, double y) { return ms.grad_phi(x, y, t); }};
        ScalarExact mu_e{[&, t](double x, double y) { return ms.mu(x, y, t); }, {}};
        ScalarExact p_e{[&, t](double x, double y) { return ms.p(x, y, t); }, {}};
        VectorExact u_e{[&, t](double x, double y) { return ms.u(x, y, t); },
                        [&, t](double x, double y, double(&g)[2][2]) {
                            ms.grad_u(x, y, t, g);
                        }};

        err.phi_linf = std::max(err.phi_linf,
                                error_norm(mesh, state.phi, phi_e, ErrorNorm::L2));
        err.u_linf = std::max(err.u_linf, error_norm(mesh, state.u, u_e, ErrorNorm::L2));
        err.grad_u_linf =
            std::max(err.grad_u_linf, error_norm(mesh, state.u, u_e, ErrorNorm::H1_semi));
        const double emu = error_norm(mesh, state.mu, mu_e, ErrorNorm::L2);
        const double ep = error_norm(mesh, state.p, p_e, ErrorNorm::L2);
        err.mu_l2_sq += params.tau * emu * emu;
        err.p_l2_sq += params.tau * ep * ep;
        err.rho_linf = std::max(err.rho_linf, std::abs(state.rho - ms.rho_exact(t)));
    }
    return err;
}

} // namespace

RateTable convergence_study(const std::vector<int>& n_list, const SchemeParams& base,
                            double T) {
    if (n_list.empty()) throw std::invalid_argument("convergence_study: empty list");
    for (size_t k = 1; k < n_list.size(); ++k) {
        if (n_list[k] <= n_list[k - 1]) {
            throw std::invalid_argument("convergence_study: resolutions must increase");
        }
    }
    if (T <= 0) throw std::invalid_argument("convergence_study: T must be positive");

    RateTable table;
    table.norms = {"phi_L2", "mu_L2", "p_L2", "u_L2", "grad_u_L2", "rho"};
    table.errors.assign(table.norms.size(), {});
    table.rates.assign(table.norms.size(), {});

    for (int n : n_list) {
        RunErrors err;
        try {
            err = run_forced(n, base, T);
        } catch (const std::exception& e) {
            table.error = e.what();
            break;
        }
        table.h.push_back(1.0 / n);
        const double vals[6] = {err.phi_linf,       std::sqrt(err.mu_l2_sq),
                                std::sqrt(err.p_l2_sq), err.u_linf,
                                err.grad_u_linf,    err.rho_linf};
        for (size_t k = 0; k < table.norms.size(); ++k) {
            table.errors[k].push_back(vals[k]);
            const size_t m = table.errors[k].size();
            if (m == 1) {
                table.rates[k].push_back(std::nan(""));
            } else {
                const double ratio = table.errors[k][m - 2] / table.errors[k][m - 1];
                const double hr = table.h[m - 2] / table.h[m - 1];
                table.rates[k].push_back(std::log(ratio) / std::log(hr));
            }
        }
    }
    return table;
}

std::string format_rate_table(const RateTable& table) {
    std::ostringstream out;
    char buf[128];
    for (size_t k = 0; k < table.norms.size(); ++k) {
        out << table.norms[k] << "\n";
        std::snprintf(buf, sizeof buf, "  %-10s %-14s %s\n", "h", "error", "rate");
        out << buf;
        for (size_t i = 0; i < table.h.size(); ++i) {
            if (std::isnan(table.rates[k][i])) {
                std::snprintf(buf, sizeof buf, "  %-10.6g %-14.4e %s\n", table.h[i],
                              table.errors[k][i], "-");
            } else {
                std::snprintf(buf, sizeof buf, "  %-10.6g %-14.4e %.4f\n", table.h[i],
                              table.errors[k][i], table.rates[k][i]);
            }
            out << buf;
        }
    }
    if (!table.error.empty()) out << "aborted: " << table.error << "\n";
    return out.str();
}

std::string rate_table_csv(const RateTable& table) {
    std::ostringstream out;
    out << "h,norm,error,rate\n";
    char buf[160];
    for (size_t i = 0; i < table.h.size(); ++i) {
        for (size_t k = 0; k < table.norms.size(); ++k) {
            if (std::isnan(table.rates[k][i])) {
                std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,\n", table.h[i],
                              table.norms[k].c_str(), table.errors[k][i]);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", table.h[i],
                              table.norms[k].c_str(), table.errors[k][i],
                              table.rates[k][i]);
            }
            out << buf;
        }
    }
    return out.str();
}

} // namespace chns
