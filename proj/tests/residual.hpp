#pragma once

#include "renwave/propagator.hpp"
#include "renwave/transference.hpp"

#include <array>
#include <functional>

namespace renwave::testing {

// Discretized transport-operator residual: apply D_tau^2 + beta D_tau + xi to
// five slices of x around tau (spacing h), with D_tau = d/dtau + beta A_c in
// 2nd-order central differences.  Independent of the propagator formulas.
inline FourierState transport_residual(const ScalingLaw& law, const SpectralTable& table,
                                       const Eigen::MatrixXd& Ac,
                                       const std::function<FourierState(double)>& x_of_tau, double tau,
                                       double h)
{
    auto Dtau = [&](double t) {
        FourierState xp = x_of_tau(t + h), xm = x_of_tau(t - h), xc = x_of_tau(t);
        FourierState out = FourierState::zero(table);
        Eigen::Map<const Eigen::VectorXd> v(xc.xc.data(), table.n_xi());
        Eigen::VectorXd av = Ac * v;
        double beta = law.beta(t);
        for (std::size_t i = 0; i < table.n_xi(); ++i)
            out.xc[i] = (xp.xc[i] - xm.xc[i]) / (2.0 * h) + beta * av(i);
        out.xd = (xp.xd - xm.xd) / (2.0 * h); // D_tau acts plainly on the discrete part
        return out;
    };
    FourierState d_p = Dtau(tau + h), d_m = Dtau(tau - h), d_c = Dtau(tau);
    FourierState x_c = x_of_tau(tau);
    FourierState res = FourierState::zero(table);
    Eigen::Map<const Eigen::VectorXd> dv(d_c.xc.data(), table.n_xi());
    Eigen::VectorXd adv = Ac * dv;
    double beta = law.beta(tau);
    for (std::size_t i = 0; i < table.n_xi(); ++i) {
        double d2 = (d_p.xc[i] - d_m.xc[i]) / (2.0 * h) + beta * adv(i);
        res.xc[i] = d2 + beta * d_c.xc[i] + table.grid_xi.xis[i] * x_c.xc[i];
    }
    res.xd = (d_p.xd - d_m.xd) / (2.0 * h) + beta * d_c.xd + table.xi_d * x_c.xd;
    return res;
}

} // namespace renwave::testing
