#include "renwave/nonlinear.hpp"

#include "renwave/conditions.hpp"
#include "renwave/util.hpp"

#include <cmath>

namespace renwave {

std::vector<double> bulk_difference(const ScalingLaw& law, const SpectralTable& table,
                                    const BulkProfile& bulk, double tau)
{
    std::vector<double> out(table.n_R(), 0.0);
    if (bulk.mode == BulkProfile::Mode::zero) return out;
    double lam = law.lambda(tau);
    double lt = law.nu * tau; // lambda(tau) t(tau)
    double amp = std::sqrt(lam) / (lt * lt);
    for (std::size_t j = 0; j < table.n_R(); ++j) {
        double R = table.grid_R.nodes[j];
        double a = std::min(R / lt, 1.0 - 1e-12);
        out[j] = amp * bulk.g(R, a);
    }
    return out;
}

std::vector<double> rn_physical(const ScalingLaw& law, const SpectralTable& table, const BulkProfile& bulk,
                                double tau, const std::vector<double>& eps_tilde)
{
    if (eps_tilde.size() != table.n_R()) throw grid_mismatch("rn_physical: field size mismatch");
    if (eps_tilde[0] != 0.0 && std::abs(eps_tilde[0]) > 1e-12)
        throw std::domain_error("rn_physical: eps_tilde(0) must vanish");

    double lam = law.lambda(tau);
    double inv_lam2 = 1.0 / (lam * lam);
    double sqlam = std::sqrt(lam);
    std::vector<double> diff = bulk_difference(law, table, bulk, tau);
    std::vector<double> out(table.n_R(), 0.0);

    for (std::size_t j = 1; j < table.n_R(); ++j) {
        double R = table.grid_R.nodes[j];
        double u0 = sqlam * ground_state_eval(R);
        double un = u0 + diff[j];
        double eps = eps_tilde[j];
        double v = eps / R;
        if (!std::isfinite(v)) throw accuracy_error("rn_physical: eps/R overflow near the origin");
        double un2 = un * un;
        double quintic = R * (10.0 * un * un2 * v * v + 10.0 * un2 * v * v * v
                              + 5.0 * un * v * v * v * v + v * v * v * v * v);
        double interact = 5.0 * (un2 * un2 - sq(sq(u0))) * eps;
        out[j] = inv_lam2 * (interact + quintic);
    }
    return out;
}

FourierState rn_fourier(const ScalingLaw& law, const SpectralTable& table, const BulkProfile& bulk,
                        double tau, const FourierState& state)
{
    std::vector<double> field = dft_inverse(table, state);
    field[0] = 0.0;
    std::vector<double> rn = rn_physical(law, table, bulk, tau, field);
    return dft_forward(table, rn);
}

double resonance_coefficient(const ScalingLaw& law, const SpectralTable& table, const CauchyPair& pair,
                             double tau)
{
    double c = law.phase_integral(law.tau0, tau, law.tau0);
    double lr = law.lambda(tau) / law.lambda(law.tau0);
    return lr
         * (oscillatory_xi_integral(table, pair.x1.xc, -0.75, true, c)
            + oscillatory_xi_integral(table, pair.x0.xc, -0.25, false, c));
}

SourceSplit source_split(const ScalingLaw& law, const SpectralTable& table, const BulkProfile& bulk,
                         double tau, const CauchyPair& pair, const FourierState& state)
{
    std::vector<double> field = dft_inverse(table, state);
    field[0] = 0.0;
    SourceSplit out;
    out.E1 = rn_physical(law, table, bulk, tau, field);
    out.E2.assign(table.n_R(), 0.0);
    if (bulk.mode == BulkProfile::Mode::zero) return out;

    out.g_tilde = resonance_coefficient(law, table, pair, tau);
    double lt = law.nu * tau;
    double amp = out.g_tilde / (tau * tau);
    for (std::size_t j = 0; j < table.n_R(); ++j) {
        double R = table.grid_R.nodes[j];
        double a = std::min(R / lt, 1.0 - 1e-12);
        out.E2[j] = amp * std::pow(1.0 + R * R, -1.5) * bulk.g(R, a);
        out.E1[j] -= out.E2[j];
    }
    return out;
}

double h1l1_proxy(const SpectralTable& table, const std::vector<double>& field, double cutoff)
{
    double h1 = 0.0, l1 = 0.0;
    double dr = table.grid_R.dr;
    for (std::size_t j = 0; j < table.n_R(); ++j) {
        double R = table.grid_R.nodes[j];
        if (R > cutoff) break;
        double w = table.grid_R.weights[j];
        double d = 0.0;
        if (j + 1 < table.n_R()) d = (field[j + 1] - field[j]) / dr;
        h1 += w * (sq(field[j]) + sq(d));
        l1 += w * std::abs(field[j]);
    }
    return std::sqrt(h1) + l1;
}

} // namespace renwave
