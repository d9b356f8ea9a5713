#pragma once

#include <functional>
#include <optional>

#include "chns/assembly.hpp"

namespace chns {

struct SchemeParams {
    double mobility = 0.1;   // M
    double lambda = 0.04;    // mixing coefficient
    double nu = 0.01;        // viscosity
    double epsilon = 0.2;    // interface width, <= 1
    double C0 = 1.0;         // shift inside sqrt(E1 + C0)
    double tau = 1e-3;       // time step
    bool lambda_on_fprime = true;
    SolverConfig solver;

    void validate() const;
};

/// One time level of the discrete system.
struct State {
    Field phi, mu, p;  // P1
    Field u, u_tilde;  // P2 vector
    double rho = 0.0;
    double t = 0.0;
    int step = 0;
};

struct EnergyReport {
    double E_modified = 0.0;         // 1/2 (lambda|grad phi|^2 + |u|^2 + tau^2|grad p|^2) + lambda rho^2
    double E_theorem = 0.0;          // lambda|grad phi|^2 + |u|^2 + tau^2|grad p|^2 + 2 lambda rho^2
    double dissipation_bound = 0.0;  // 2 M tau |grad mu|^2 + 2 nu tau |grad u_tilde|^2
    double mass = 0.0;               // (phi, 1)
    double rho = 0.0;                // auxiliary variable at this level
    double sav_ratio = 0.0;          // rho / sqrt(E1 + C0)
    double div_residual = 0.0;       // relative residual of the divergence enforcement
};

/// Optional source closures, evaluated at t^{n+1}.
struct SourceTerms {
    std::function<double(double, double)> f_phi;
    std::function<Vec2(double, double)> f_u;
};

/// Four-step decoupled time integrator. Owns the dof maps and the
/// step-invariant operators for one mesh/parameter pair.
class Scheme {
  public:
    Scheme(const Mesh& mesh, SchemeParams params);

    const Mesh& mesh() const { return mesh_; }
    const SchemeParams& params() const { return params_; }
    const DofMap& p1() const { return p1_; }
    const DofMap& p2v() const { return p2v_; }
    const QuadratureRule& quad() const { return quad_; }

    /// E1(phi) + C0.
    double compute_E1(const Field& phi) const;

    State initial_state(const Field& phi0, const Field& u0) const;

    // The four sub-steps; exposed individually for verification.
    std::pair<Field, Field> step_cahn_hilliard(const State& state,
                                               const Vector* f_phi_load = nullptr) const;
    Field step_velocity(const State& state, const Field& phi_next, const Field& mu_next,
                        const Vector* f_u_load = nullptr) const;
    double step_sav(const State& state, const Field& phi_next, const Field& mu_next,
                    const Field& u_tilde_next) const;
    /// Incremental pressure correction: returns (p_next, u_next) and the
    /// relative residual of the divergence-enforcement Poisson solve.
    std::tuple<Field, Field, double> step_projection(const State& state,
                                                     const Field& u_tilde_next) const;

    std::pair<State, EnergyReport> advance(const State& state,
                                           const std::optional<SourceTerms>& sources =
                                               std::nullopt) const;

    EnergyReport energy_report(const State& state) const;

    /// ||(grad q_h, u)||_2 over all P1 test functions, the weak divergence
    /// functional of a velocity field.
    Vector weak_divergence(const Field& u) const;

  private:
    const Mesh& mesh_;
    SchemeParams params_;
    DofMap p1_;
    DofMap p2v_;
    QuadratureRule quad_;

    // Step-invariant operators.
    SparseMatrix mass_s_;
    SparseMatrix stiff_s_;
    SparseMatrix mass_v_;
    SparseMatrix stiff_v_;
    SparseMatrix grad_p_; // (grad p_j, v_i), P2v rows x P1 cols
    SparseMatrix velocity_system_; // Mv/tau + nu Kv with Dirichlet rows folded
    Vector lumped_p1_;
    double grad_p_frob_ = 0.0;
    std::vector<int> velocity_bc_dofs_;
    // Banded factorization of the (shifted) pressure Laplacian, used as
    // the CG preconditioner in the projection's Schur solve.
    std::optional<BandCholesky> poisson_precond_;
    // Warm start for the projection's Schur solve; only an initial guess,
    // never affects results beyond solver tolerance. advance is
    // single-threaded per the concurrency model, so the mutable cache is
    // not contended.
    struct ProjectionWarmStart {
        Vector chi, ucorr;
        Vector chi_prev, ucorr_prev;
    };
    mutable ProjectionWarmStart proj_warm_;

    double h1_semi_scalar(const Field& f) const;
    double l2_vector(const Field& f) const;
};

} // namespace chns
