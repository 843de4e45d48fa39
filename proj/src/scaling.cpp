#include "renwave/scaling.hpp"

#include <cmath>

namespace renwave {

ScalingLaw::ScalingLaw(double nu_, double tau0_, double delta0_, bool allow_large_nu_)
    : nu(nu_), tau0(tau0_), delta0(delta0_), allow_large_nu(allow_large_nu_)
{
    if (!(nu > 0.0)) throw std::domain_error("ScalingLaw: nu must be positive");
    if (nu > 1.0) throw std::domain_error("ScalingLaw: nu > 1 not supported");
    if (nu > 1.0 / 3.0 + 1e-12 && !allow_large_nu)
        throw std::domain_error("ScalingLaw: nu > 1/3 requires allow_large_nu");
    if (!(tau0 >= 1.0)) throw std::domain_error("ScalingLaw: tau0 must be >= 1");
    if (!(delta0 > 0.0 && delta0 <= 0.2)) throw std::domain_error("ScalingLaw: delta0 must lie in (0, 0.2]");
}

// powers in log space; tau >> tau0 at small nu overflows the direct form
double ScalingLaw::lambda(double tau) const
{
    check_tau(tau);
    return std::exp((1.0 + 1.0 / nu) * std::log(nu * tau));
}

double ScalingLaw::t_of_tau(double tau) const
{
    check_tau(tau);
    return std::exp(-std::log(nu * tau) / nu);
}

double ScalingLaw::integral_inv_lambda(double tau_a, double tau_b) const
{
    check_tau(tau_a);
    check_tau(tau_b);
    // -nu^{-1/nu} (b^{-1/nu} - a^{-1/nu}), evaluated in log space
    double la = std::exp(-(std::log(nu) + std::log(tau_a)) / nu);
    double lb = std::exp(-(std::log(nu) + std::log(tau_b)) / nu);
    return la - lb;
}

double ScalingLaw::phase_integral(double tau_a, double tau_b, double anchor) const
{
    check_tau(anchor);
    if (tau_a == tau_b) return 0.0;
    // lambda(anchor) * (a^{-1/nu} - b^{-1/nu}) * nu^{-1/nu}, grouped in log space
    // to survive tau >> tau0 at small nu.
    double c = (1.0 + 1.0 / nu) * std::log(nu * anchor) - std::log(nu) / nu;
    double pa = std::exp(c - std::log(tau_a) / nu);
    double pb = std::exp(c - std::log(tau_b) / nu);
    return pa - pb;
}

ScalingPoint eval_scaling(const ScalingLaw& law, double tau)
{
    return ScalingPoint{law.lambda(tau), law.beta(tau), law.t_of_tau(tau)};
}

} // namespace renwave
