#pragma once

#include "chns/scheme.hpp"

namespace chns {

/// Closed-form space-time fields that solve the coupled system on the unit
/// square once the matching sources are added. The chemical potential
/// follows the same lambda_on_fprime convention as the scheme so the
/// discrete solution converges to these fields.
class ManufacturedSolution {
  public:
    explicit ManufacturedSolution(const SchemeParams& params);

    double phi(double x, double y, double t) const;
    double phi_t(double x, double y, double t) const;
    Vec2 grad_phi(double x, double y, double t) const;
    double mu(double x, double y, double t) const;
    Vec2 grad_mu(double x, double y, double t) const;
    double laplace_mu(double x, double y, double t) const;

    Vec2 u(double x, double y, double t) const;
    Vec2 u_t(double x, double y, double t) const;
    void grad_u(double x, double y, double t, double (&g)[2][2]) const;
    Vec2 laplace_u(double x, double y, double t) const;

    double p(double x, double y, double t) const;
    Vec2 grad_p(double x, double y, double t) const;

    /// Source closing the phase equation: phi_t + u.grad phi - M laplace mu.
    double f_phi(double x, double y, double t) const;
    /// Source closing the momentum equation:
    /// u_t + (u.grad)u - nu laplace u + grad p - mu grad phi.
    Vec2 f_u(double x, double y, double t) const;

    /// integral of F(phi(t)) over the unit square, in closed form.
    double E1_exact(double t) const;
    /// sqrt(E1_exact + C0), the reference auxiliary variable.
    double rho_exact(double t) const;

  private:
    double lambda_;
    double epsilon_;
    double mobility_;
    double nu_;
    double C0_;
    double coef_f_; // factor on F'(phi) in the potential definition
};

} // namespace chns
