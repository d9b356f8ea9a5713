#include "chns/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace chns {

void SchemeParams::validate() const {
    if (mobility <= 0 || lambda <= 0 || nu <= 0 || epsilon <= 0 || C0 <= 0 || tau <= 0) {
        throw std::invalid_argument("SchemeParams: all parameters must be positive");
    }
    if (epsilon > 1.0) {
        throw std::invalid_argument("SchemeParams: epsilon must be <= 1");
    }
    if (solver.rel_tol <= 0) {
        throw std::invalid_argument("SchemeParams: solver.rel_tol must be positive");
    }
}

Scheme::Scheme(const Mesh& mesh, SchemeParams params)
    : mesh_(mesh),
      params_(params),
      p1_(mesh, ElementKind::P1_scalar),
      p2v_(mesh, ElementKind::P2_vector2),
      quad_(quadrature(5)) {
    params_.validate();
    mass_s_ = assemble_mass_s(mesh_, p1_, quad_);
    stiff_s_ = assemble_stiffness_s(mesh_, p1_, quad_);
    mass_v_ = assemble_mass_v(mesh_, p2v_, quad_);
    stiff_v_ = assemble_stiffness_v(mesh_, p2v_, quad_);
    grad_p_ = assemble_pressure_grad(mesh_, p1_, p2v_, quad_);
    lumped_p1_ = lumped_mass_p1(mesh_, p1_);
    for (double v : grad_p_.values()) grad_p_frob_ += v * v;
    grad_p_frob_ = std::sqrt(grad_p_frob_);
    velocity_bc_dofs_ = p2v_.boundary_dofs();
    {
        // Small diagonal shift makes the pure-Neumann operator factorable;
        // as a preconditioner the perturbation is immaterial.
        double max_diag = 0.0;
        for (double v : stiff_s_.diagonal()) max_diag = std::max(max_diag, v);
        poisson_precond_.emplace(stiff_s_, 1e-8 * max_diag);
    }

    // Mv/tau + nu Kv with homogeneous Dirichlet rows/columns eliminated;
    // zero boundary values mean the RHS coupling is zero too, so the
    // constrained operator can be built once.
    TripletBuffer buf;
    auto add_scaled = [&buf](const SparseMatrix& A, double s) {
        for (int r = 0; r < A.n_rows(); ++r) {
            for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k) {
                buf.add(r, A.col_indices()[k], s * A.values()[k]);
            }
        }
    };
    add_scaled(mass_v_, 1.0 / params_.tau);
    add_scaled(stiff_v_, params_.nu);
    SparseMatrix vel = SparseMatrix::from_triplets(buf, p2v_.n_dofs(), p2v_.n_dofs());
    Vector zero_b(p2v_.n_dofs(), 0.0);
    std::vector<double> zero_vals(velocity_bc_dofs_.size(), 0.0);
    velocity_system_ = apply_dirichlet(vel, zero_b, velocity_bc_dofs_, zero_vals).first;
}

double Scheme::compute_E1(const Field& phi) const {
    return integrate_double_well(mesh_, phi, params_.epsilon, quad_) + params_.C0;
}

State Scheme::initial_state(const Field& phi0, const Field& u0) const {
    State s;
    s.phi = phi0;
    s.u = u0;
    s.u_tilde = u0;
    s.p = Field(p1_);
    // mu0 consistent with the discrete potential equation.
    const double coef_f = params_.lambda_on_fprime ? params_.lambda : 1.0;
    Vector rhs =
        assemble_nonlinear_fprime(mesh_, p1_, phi0, params_.epsilon, quad_);
    for (double& v : rhs) v *= coef_f;
    Vector stiff_phi = stiff_s_.multiply(phi0.coeffs);
    axpy(params_.lambda, stiff_phi, rhs);
    SolverConfig cfg = params_.solver;
    cfg.method = SolverMethod::cg;
    s.mu = Field(p1_);
    s.mu.coeffs = solve(mass_s_, rhs, cfg).x;
    s.rho = std::sqrt(compute_E1(phi0));
    return s;
}

std::pair<Field, Field> Scheme::step_cahn_hilliard(const State& state,
                                                   const Vector* f_phi_load) const {
    const int n = p1_.n_dofs();
    const SparseMatrix system = assemble_ch_coupling(
        mesh_, p1_, state.u, params_.mobility, params_.lambda, params_.tau, quad_);

    Vector rhs(2 * n, 0.0);
    const Vector mphi = mass_s_.multiply(state.phi.coeffs);
    for (int i = 0; i < n; ++i) rhs[i] = mphi[i] / params_.tau;
    if (f_phi_load) {
        for (int i = 0; i < n; ++i) rhs[i] += (*f_phi_load)[i];
    }
    const double coef_f = params_.lambda_on_fprime ? params_.lambda : 1.0;
    const Vector fprime =
        assemble_nonlinear_fprime(mesh_, p1_, state.phi, params_.epsilon, quad_);
    for (int i = 0; i < n; ++i) rhs[n + i] = coef_f * fprime[i];

    // Equivalent scaled system: multiplying the potential equation by
    // M/lambda turns the off-diagonal blocks into (B, -B^T) with positive
    // definite diagonal blocks, and the symmetric diagonal scaling keeps
    // that structure. Plain Jacobi on the raw block system diverges once
    // the stiffness blocks dominate the mass diagonal.
    const double row_scale = params_.mobility / params_.lambda;
    const Vector raw_diag = system.diagonal();
    Vector d(2 * n), row_mult(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        const double rs = i < n ? 1.0 : row_scale;
        d[i] = 1.0 / std::sqrt(rs * raw_diag[i]);
        row_mult[i] = rs * d[i];
    }
    const SparseMatrix scaled_system = system.scaled(row_mult, d);
    Vector scaled_rhs(2 * n);
    for (int i = 0; i < 2 * n; ++i) scaled_rhs[i] = rhs[i] * row_mult[i];

    SolverConfig cfg = params_.solver;
    cfg.method = SolverMethod::bicgstab;
    Vector guess(2 * n);
    for (int i = 0; i < n; ++i) {
        guess[i] = state.phi.coeffs[i] / d[i];
        guess[n + i] = state.mu.coeffs[i] / d[n + i];
    }
    Vector sol = solve(scaled_system, scaled_rhs, cfg, std::nullopt, &guess).x;
    for (int i = 0; i < 2 * n; ++i) sol[i] *= d[i];

    Field phi_next(p1_), mu_next(p1_);
    for (int i = 0; i < n; ++i) {
        phi_next.coeffs[i] = sol[i];
        mu_next.coeffs[i] = sol[n + i];
    }
    return {std::move(phi_next), std::move(mu_next)};
}

Field Scheme::step_velocity(const State& state, const Field& phi_next, const Field& mu_next,
                            const Vector* f_u_load) const {
    const double e1 = compute_E1(phi_next);
    const double ratio = state.rho / std::sqrt(e1);

    Vector rhs = mass_v_.multiply(state.u.coeffs);
    for (double& v : rhs) v /= params_.tau;
    const Vector skew = assemble_skew_convection(mesh_, p2v_, state.u, quad_);
    axpy(-ratio, skew, rhs);
    const Vector gp = grad_p_.multiply(state.p.coeffs);
    axpy(-1.0, gp, rhs);
    const Vector cap = assemble_capillary(mesh_, p2v_, phi_next, mu_next, quad_);
    axpy(1.0, cap, rhs);
    if (f_u_load) axpy(1.0, *f_u_load, rhs);
    for (int d : velocity_bc_dofs_) rhs[d] = 0.0;

    SolverConfig cfg = params_.solver;
    cfg.method = SolverMethod::cg;
    Field out(p2v_);
    out.coeffs = solve(velocity_system_, rhs, cfg, std::nullopt, &state.u.coeffs).x;
    return out;
}

double Scheme::step_sav(const State& state, const Field& phi_next, const Field& mu_next,
                        const Field& u_tilde_next) const {
    const double tau = params_.tau;
    const double lambda = params_.lambda;
    const double e1 = compute_E1(phi_next);
    const double coef_f = params_.lambda_on_fprime ? params_.lambda : 1.0;

    const Vector fprime =
        assemble_nonlinear_fprime(mesh_, p1_, state.phi, params_.epsilon, quad_);
    Vector dphi = phi_next.coeffs;
    axpy(-1.0, state.phi.coeffs, dphi);
    const double term_f = (coef_f / lambda) * dot(fprime, dphi);

    const double term_b = trilinear_skew(mesh_, state.u, state.u, u_tilde_next, quad_);
    const double term_conv = convection_inner(mesh_, state.u, phi_next, mu_next, quad_);
    const double term_cap = capillary_inner(mesh_, phi_next, mu_next, u_tilde_next, quad_);

    // 2 rho^2 - 2 rho^n rho + c = 0
    const double c = -(term_f + (tau * state.rho / (lambda * std::sqrt(e1))) * term_b +
                       (tau / lambda) * (term_conv - term_cap));
    const double b = -2.0 * state.rho;
    double disc = b * b - 8.0 * c;
    if (disc < 0.0) {
        if (-disc > 1e-12 * (b * b + std::abs(8.0 * c))) {
            throw std::runtime_error("step_sav: negative discriminant beyond roundoff");
        }
        disc = 0.0;
    }
    const double sq = std::sqrt(disc);
    const double r1 = (-b + sq) / 4.0;
    const double r2 = (-b - sq) / 4.0;
    if (r1 <= 0.0 && r2 <= 0.0 && state.rho > 0.0) {
        throw std::runtime_error("step_sav: both roots nonpositive (scheme breakdown)");
    }
    const double target = std::sqrt(e1);
    return std::abs(r1 / target - 1.0) <= std::abs(r2 / target - 1.0) ? r1 : r2;
}

std::tuple<Field, Field, double> Scheme::step_projection(const State& state,
                                                         const Field& u_tilde_next) const {
    const double tau = params_.tau;
    const int n = p1_.n_dofs();

    // Mixed projection: find (u, psi) with (u, v) + tau(grad psi, v) =
    // (u_tilde, v) and (u, grad q) = 0, so the projected velocity is
    // exactly weakly divergence-free (this is what conserves (phi, 1)).
    // Solved by CG on the pressure Schur complement S = G^T Mv^{-1} G in
    // the scaled unknown chi = tau psi, preconditioned by the spectrally
    // equivalent P1 Laplacian. The velocity correction Mv^{-1} G chi is
    // accumulated alongside the CG recurrences.
    Vector b(n, 0.0);
    grad_p_.add_transpose_multiply(u_tilde_next.coeffs, 1.0, b);
    // When u_tilde is already (nearly) divergence-free, b is dominated by
    // the cancellation noise of the G^T product, whose rounding level is
    // eps |G|_F |u_tilde|. Flooring the residual scale there keeps the
    // relative tolerance attainable.
    const double noise_floor =
        (1e-15 / params_.solver.rel_tol) * grad_p_frob_ * norm2(u_tilde_next.coeffs);
    const double bnorm = std::max(norm2(b), noise_floor);

    Field p_next(p1_), u_next(p2v_);
    p_next.coeffs = state.p.coeffs;
    u_next.coeffs = u_tilde_next.coeffs;
    if (bnorm == 0.0) return {std::move(p_next), std::move(u_next), 0.0};

    SolverConfig inner = params_.solver;
    inner.method = SolverMethod::cg;
    inner.rel_tol = std::min(params_.solver.rel_tol, 1e-11);
    NullspaceMeanZero ns{lumped_p1_};
    auto precond = [&](const Vector& r) {
        return solve(stiff_s_, r, inner, ns, nullptr, &*poisson_precond_).x;
    };
    // The mass solve inside each Schur application may be relaxed as the
    // outer residual shrinks (inexact Krylov): late search directions
    // carry small weights, so their application error stays below the
    // outer tolerance.
    const double tol = params_.solver.rel_tol * bnorm;
    double mv_tol = inner.rel_tol;
    double rel = 1.0;
    auto update_mv_tol = [&] {
        mv_tol = std::clamp(0.01 * params_.solver.rel_tol / std::max(rel, 1e-11),
                            inner.rel_tol, 1e-7);
    };
    auto mv_inv_g = [&](const Vector& q) {
        SolverConfig cfg = inner;
        cfg.rel_tol = mv_tol;
        return solve(mass_v_, grad_p_.multiply(q), cfg).x;
    };

    Vector chi(n, 0.0);
    Vector ucorr(p2v_.n_dofs(), 0.0);
    Vector r = b;
    // Warm start extrapolated from the two previous projections; the
    // cached velocity corrections make the residual update mass-solve
    // free. Only a guess, so staleness never changes results beyond the
    // solver tolerance.
    if (static_cast<int>(proj_warm_.chi.size()) == n) {
        const bool two = static_cast<int>(proj_warm_.chi_prev.size()) == n;
        for (int i = 0; i < n; ++i) {
            chi[i] = two ? 2.0 * proj_warm_.chi[i] - proj_warm_.chi_prev[i]
                         : proj_warm_.chi[i];
        }
        for (size_t i = 0; i < ucorr.size(); ++i) {
            ucorr[i] = two ? 2.0 * proj_warm_.ucorr[i] - proj_warm_.ucorr_prev[i]
                           : proj_warm_.ucorr[i];
        }
        grad_p_.add_transpose_multiply(ucorr, -1.0, r);
    }
    rel = norm2(r) / bnorm;
    bool converged = rel * bnorm <= tol;
    // Restarted CG: the relaxed inner solves let the recursive residual
    // drift from the true one, so after each cycle the velocity
    // correction is re-solved tightly and the residual recomputed before
    // continuing.
    const int max_restarts = 8;
    const int cycle_iters = 60;
    for (int restart = 0; restart < max_restarts && !converged; ++restart) {
        if (restart > 0) {
            mv_tol = inner.rel_tol;
            ucorr = mv_inv_g(chi);
            r = b;
            grad_p_.add_transpose_multiply(ucorr, -1.0, r);
            rel = norm2(r) / bnorm;
            if (rel * bnorm <= tol) {
                converged = true;
                break;
            }
        }
        Vector z = precond(r);
        Vector p = z;
        update_mv_tol();
        Vector wp = mv_inv_g(p);
        double rz = dot(r, z);
        for (int it = 0; it < cycle_iters; ++it) {
            Vector Sp(n, 0.0);
            grad_p_.add_transpose_multiply(wp, 1.0, Sp);
            const double alpha = rz / dot(p, Sp);
            axpy(alpha, p, chi);
            axpy(alpha, wp, ucorr);
            axpy(-alpha, Sp, r);
            rel = norm2(r) / bnorm;
            if (rel * bnorm <= tol) {
                converged = true;
                break;
            }
            update_mv_tol();
            z = precond(r);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            const Vector wz = mv_inv_g(z);
            for (size_t i = 0; i < wp.size(); ++i) wp[i] = wz[i] + beta * wp[i];
        }
    }
    if (!converged) {
        throw std::runtime_error("step_projection: Schur CG did not converge in " +
                                 std::to_string(max_restarts * cycle_iters) + " iterations");
    }
    proj_warm_.chi_prev = std::move(proj_warm_.chi);
    proj_warm_.ucorr_prev = std::move(proj_warm_.ucorr);
    proj_warm_.chi = chi;
    proj_warm_.ucorr = ucorr;

    // Pin the pressure gauge: chi shifted to weighted mean zero (the shift
    // does not change G chi, hence not the velocity).
    double wchi = 0.0, wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        wchi += lumped_p1_[i] * chi[i];
        wsum += lumped_p1_[i];
    }
    const double shift = wchi / wsum;
    for (int i = 0; i < n; ++i) p_next.coeffs[i] += (chi[i] - shift) / tau;

    axpy(-1.0, ucorr, u_next.coeffs);
    Vector res(n, 0.0);
    grad_p_.add_transpose_multiply(u_next.coeffs, 1.0, res);
    const double div_residual = norm2(res) / bnorm;

    return {std::move(p_next), std::move(u_next), div_residual};
}

std::pair<State, EnergyReport> Scheme::advance(const State& state,
                                               const std::optional<SourceTerms>& sources) const {
    const double t_next = state.t + params_.tau;
    Vector f_phi_load, f_u_load;
    const Vector* f_phi_ptr = nullptr;
    const Vector* f_u_ptr = nullptr;
    if (sources) {
        if (sources->f_phi) {
            f_phi_load = assemble_scalar_source(
                mesh_, p1_,
                [&](double x, double y) { return sources->f_phi(x, y); }, quad_);
            f_phi_ptr = &f_phi_load;
        }
        if (sources->f_u) {
            f_u_load = assemble_vector_source(
                mesh_, p2v_, [&](double x, double y) { return sources->f_u(x, y); },
                quad_);
            f_u_ptr = &f_u_load;
        }
    }

    auto [phi_next, mu_next] = step_cahn_hilliard(state, f_phi_ptr);
    Field u_tilde_next = step_velocity(state, phi_next, mu_next, f_u_ptr);
    const double rho_next = step_sav(state, phi_next, mu_next, u_tilde_next);
    auto [p_next, u_next, div_res] = step_projection(state, u_tilde_next);

    State next;
    next.phi = std::move(phi_next);
    next.mu = std::move(mu_next);
    next.u_tilde = std::move(u_tilde_next);
    next.u = std::move(u_next);
    next.p = std::move(p_next);
    next.rho = rho_next;
    next.t = t_next;
    next.step = state.step + 1;

    EnergyReport report = energy_report(next);
    report.div_residual = div_res;
    return {std::move(next), report};
}

double Scheme::h1_semi_scalar(const Field& f) const {
    return dot(f.coeffs, stiff_s_.multiply(f.coeffs));
}

double Scheme::l2_vector(const Field& f) const {
    return dot(f.coeffs, mass_v_.multiply(f.coeffs));
}

EnergyReport Scheme::energy_report(const State& state) const {
    const double tau = params_.tau;
    const double lambda = params_.lambda;
    EnergyReport r;
    const double grad_phi2 = h1_semi_scalar(state.phi);
    const double u2 = l2_vector(state.u);
    const double grad_p2 = h1_semi_scalar(state.p);
    const double rho2 = state.rho * state.rho;
    r.E_modified = 0.5 * (lambda * grad_phi2 + u2 + tau * tau * grad_p2) + lambda * rho2;
    r.E_theorem = lambda * grad_phi2 + u2 + tau * tau * grad_p2 + 2.0 * lambda * rho2;
    const double grad_mu2 = h1_semi_scalar(state.mu);
    const double grad_ut2 =
        dot(state.u_tilde.coeffs, stiff_v_.multiply(state.u_tilde.coeffs));
    r.dissipation_bound = 2.0 * params_.mobility * tau * grad_mu2 + 2.0 * params_.nu * tau * grad_ut2;
    r.mass = dot(lumped_p1_, state.phi.coeffs);
    r.rho = state.rho;
    r.sav_ratio = state.rho / std::sqrt(compute_E1(state.phi));
    return r;
}

Vector Scheme::weak_divergence(const Field& u) const {
    Vector out(p1_.n_dofs(), 0.0);
    grad_p_.add_transpose_multiply(u.coeffs, 1.0, out);
    return out;
}

} // namespace chns
