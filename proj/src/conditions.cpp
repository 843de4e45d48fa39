#include "renwave/conditions.hpp"

#include "renwave/util.hpp"

#include <algorithm>
#include <cmath>

namespace renwave {

namespace {

double norm_weight(const NormConfig& nc, NormKind kind, double xi)
{
    double d = nc.delta0;
    switch (kind) {
        case NormKind::S1t:
            return std::pow(jbracket(xi), 0.5 + 2.0 * d) / std::min(nc.tau0 * std::sqrt(xi), 1.0)
                 * std::pow(xi, 0.5 - d);
        case NormKind::S2t:
            return std::pow(jbracket(xi), 0.5 + 2.0 * d) * std::pow(xi, -d);
        case NormKind::S1:
            return std::pow(jbracket(xi), 1.0 + 2.0 * d) * std::pow(xi, -d);
        case NormKind::S2:
            return std::pow(jbracket(xi), 0.5 + 2.0 * d) * std::pow(xi, -d);
        case NormKind::S3:
            return std::min(std::pow(xi, d), 1.0) * std::pow(jbracket(xi), 0.5 + d);
    }
    return 0.0;
}

} // namespace

double weighted_norm(const NormConfig& nc, NormKind kind, const FourierState& s)
{
    const SpectralTable& t = *s.table;
    double acc = 0.0;
    for (std::size_t i = 0; i < t.n_xi(); ++i) {
        double w = norm_weight(nc, kind, t.grid_xi.xis[i]);
        acc += t.grid_xi.weights[i] * sq(w * s.xc[i]);
    }
    return std::sqrt(acc);
}

double pair_norm_tilde(const NormConfig& nc, const CauchyPair& p)
{
    return weighted_norm(nc, NormKind::S1t, p.x0) + weighted_norm(nc, NormKind::S2t, p.x1);
}

double pair_norm_strong(const NormConfig& nc, const CauchyPair& p)
{
    return weighted_norm(nc, NormKind::S1, p.x0) + weighted_norm(nc, NormKind::S2, p.x1);
}

double oscillatory_xi_integral(const SpectralTable& table, const std::vector<double>& x, double power,
                               bool use_sin, double phase_coeff)
{
    if (x.size() != table.n_xi()) throw grid_mismatch("oscillatory_xi_integral: size mismatch");
    std::size_t n = table.n_xi();
    // k = sqrt(xi): integrand 2 rho^{1/2} x k^{2 power + 1} trig(c k)
    std::vector<double> karr(n), amp(n);
    for (std::size_t i = 0; i < n; ++i) {
        karr[i] = std::sqrt(table.grid_xi.xis[i]);
        amp[i] = 2.0 * std::sqrt(table.rho[i]) * x[i] * std::pow(karr[i], 2.0 * power + 1.0);
    }
    double c = phase_coeff;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double k0 = karr[i], k1 = karr[i + 1], d = k1 - k0;
        if (std::abs(c) * k1 < 0.5) {
            // non-oscillatory; integrate the full product to dodge the
            // amplitude singularity of the sin branch at k -> 0
            double h0 = amp[i] * (use_sin ? std::sin(c * k0) : std::cos(c * k0));
            double h1 = amp[i + 1] * (use_sin ? std::sin(c * k1) : std::cos(c * k1));
            acc += 0.5 * d * (h0 + h1);
        } else {
            double c0, c1v;
            double p0 = use_sin ? c * k0 : c * k0 + 1.5707963267948966; // cos = sin(+pi/2)
            filon_cell_coeffs(p0, c, d, c0, c1v);
            acc += amp[i] * c0 + amp[i + 1] * c1v;
        }
    }
    // [0, k0) closure: the integrand tends to a finite limit there
    double h_first = amp[0] * (use_sin ? std::sin(c * karr[0]) : std::cos(c * karr[0]));
    acc += h_first * karr[0];
    return acc;
}

VanishingValues vanishing_functionals(const SpectralTable& table, const NormConfig& nc, double nu,
                                      const CauchyPair& pair, X0Weight w)
{
    (void)nc;
    double c = nu * nc.tau0;
    double p0 = (w == X0Weight::proof_quarter) ? -0.25 : -0.75;
    VanishingValues out;
    out.v0 = oscillatory_xi_integral(table, pair.x0.xc, p0, /*sin*/ false, c);
    out.v1 = oscillatory_xi_integral(table, pair.x1.xc, -0.75, /*sin*/ true, c);
    return out;
}

FourierState correction_profile(const SpectralTable& table, double tau0, double C_cut)
{
    std::vector<double> field(table.n_R(), 0.0);
    double cutoff = C_cut * tau0;
    for (std::size_t j = 0; j < table.n_R(); ++j) {
        double R = table.grid_R.nodes[j];
        if (R <= cutoff) field[j] = zero_resonance_eval(R);
    }
    FourierState s = dft_forward(table, field);
    s.xd = 0.0; // continuous-spectrum profile only
    return s;
}

CorrectionResult admissible_correction(const SpectralTable& table, const NormConfig& nc, double nu,
                                       const CauchyPair& pair, double C_cut, X0Weight w)
{
    FourierState prof = correction_profile(table, nc.tau0, C_cut);
    double c = nu * nc.tau0;
    double p0 = (w == X0Weight::proof_quarter) ? -0.25 : -0.75;
    double prof_v0 = oscillatory_xi_integral(table, prof.xc, p0, false, c);
    double prof_v1 = oscillatory_xi_integral(table, prof.xc, -0.75, true, c);

    VanishingValues v = vanishing_functionals(table, nc, nu, pair, w);
    double scale0 = std::abs(prof_v0), scale1 = std::abs(prof_v1);
    if (scale1 < 1e-10 * nc.tau0 || scale0 < 1e-10 * nc.tau0)
        throw accuracy_error("admissible_correction: degenerate correction profile");

    CorrectionResult out;
    out.alpha = -v.v1 / prof_v1;
    out.beta = -v.v0 / prof_v0;
    out.corrected = pair;
    axpy(out.beta, prof, out.corrected.x0);
    axpy(out.alpha, prof, out.corrected.x1);
    return out;
}

double dyadic_diagnostic(const NormConfig& nc, const std::vector<double>& taus, const std::vector<double>& q,
                         double weight_exponent)
{
    if (taus.size() != q.size()) throw std::invalid_argument("dyadic_diagnostic: size mismatch");
    double acc = 0.0;
    double N = nc.tau0;
    for (int level = 0; level < nc.dyadic_levels; ++level) {
        double sup = 0.0;
        for (std::size_t k = 0; k < taus.size(); ++k) {
            if (taus[k] < N || taus[k] >= N * nc.dyadic_base) continue;
            sup = std::max(sup, std::pow(taus[k] / nc.tau0, weight_exponent) * q[k]);
        }
        acc += sup * sup;
        N *= nc.dyadic_base;
    }
    return std::sqrt(acc);
}

GrowthReport growth_split_measure(const ScalingLaw& law, const SpectralTable& table, const NormConfig& nc,
                                  const CauchyPair& pair, const std::vector<double>& taus)
{
    (void)nc;
    GrowthReport rep;
    rep.taus = taus;
    std::size_t m = taus.size();
    rep.sup_eps1_over_R.assign(m, 0.0);
    rep.sup_eps2.assign(m, 0.0);
    rep.sup_total.assign(m, 0.0);
    rep.g_tilde.assign(m, 0.0);

    for (std::size_t k = 0; k < m; ++k) {
        double tau = taus[k];
        EvolvedSlice slice = free_evolve(law, table, pair, tau);
        std::vector<double> field = dft_inverse_continuous(table, slice.x);

        double lam_ratio = law.lambda(tau) / law.lambda(law.tau0);
        double c = law.phase_integral(law.tau0, tau, law.tau0); // lambda(tau0)-anchored phase
        double g = lam_ratio
                 * (oscillatory_xi_integral(table, pair.x1.xc, -0.75, true, c)
                    + oscillatory_xi_integral(table, pair.x0.xc, -0.25, false, c));
        rep.g_tilde[k] = g;

        double s1 = std::abs(g) * 1.0; // sup |phi(R,0)/R| = phi'(0) = 1 at R = 0
        double s2 = 0.0, st = 0.0;
        for (std::size_t j = 0; j < table.n_R(); ++j) {
            double R = table.grid_R.nodes[j];
            double e1 = table.phi0[j] * g;
            double e2 = field[j] - e1;
            if (j > 0) s1 = std::max(s1, std::abs(e1) / R);
            s2 = std::max(s2, std::abs(e2));
            st = std::max(st, std::abs(field[j]));
        }
        rep.sup_eps1_over_R[k] = s1;
        rep.sup_eps2[k] = s2;
        rep.sup_total[k] = st;
    }

    // exponent over the last half of the window, skipping transients
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < m; ++k) {
        if (taus[k] < 0.5 * (taus.front() + taus.back())) continue;
        if (rep.sup_total[k] <= 0.0) continue;
        xs.push_back(std::log(taus[k]));
        ys.push_back(std::log(rep.sup_total[k]));
    }
    rep.fitted_exponent = xs.size() >= 2 ? linfit(xs, ys).second : 0.0;
    return rep;
}

} // namespace renwave
