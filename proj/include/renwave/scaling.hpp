#pragma once

#include <stdexcept>

namespace renwave {

// Time reparametrization for the blow-up family lambda(t) = t^{-1-nu}:
//   tau = nu^{-1} t^{-nu},  t = (nu tau)^{-1/nu},  lambda(tau) = (nu tau)^{1+1/nu}.
// The multiplicative constant is fixed so that lambda(t) * t^{1+nu} = 1 exactly.
struct ScalingLaw {
    double nu = 0.5;
    double tau0 = 10.0;
    double delta0 = 0.05; // exponent regulator behind every "0+" in the norms
    bool allow_large_nu = false;

    ScalingLaw() = default;
    ScalingLaw(double nu_, double tau0_, double delta0_ = 0.05, bool allow_large_nu_ = false);

    double kappa() const { return 2.0 * (1.0 + 1.0 / nu) * delta0; }

    // lambda, beta_nu = lambda'/lambda, and t at renormalized time tau.
    double lambda(double tau) const;
    double beta(double tau) const { check_tau(tau); return (1.0 + 1.0 / nu) / tau; }
    double t_of_tau(double tau) const;

    // beta_nu' / beta_nu^2, constant in tau.
    double beta_prime_over_beta_sq() const { return -1.0 / (1.0 + 1.0 / nu); }

    // Antiderivative identity: int lambda^{-1}(u) du = -nu^{-1/nu} u^{-1/nu}.
    double integral_inv_lambda(double tau_a, double tau_b) const;

    // lambda(anchor) * int_{tau_a}^{tau_b} lambda^{-1}(u) du, closed form.
    // Antisymmetric in (tau_a, tau_b).
    double phase_integral(double tau_a, double tau_b, double anchor) const;

private:
    void check_tau(double tau) const
    {
        if (!(tau > 0.0)) throw std::domain_error("ScalingLaw: tau must be positive");
    }
};

struct ScalingPoint {
    double lambda;
    double beta;
    double t;
};

ScalingPoint eval_scaling(const ScalingLaw& law, double tau);

} // namespace renwave
