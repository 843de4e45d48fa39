#include "renwave/propagator.hpp"

#include "renwave/util.hpp"

#include <algorithm>
#include <cmath>

namespace renwave {

namespace {

// interpolate data coefficients at the rescaled argument; zero above the grid
double data_at(const SpectralTable& t, const std::vector<double>& xc, double xi)
{
    return interp_cubiclog(t.grid_xi.xis, xc, xi, /*zero above*/ true);
}

} // namespace

static EvolvedSlice free_evolve_impl(const ScalingLaw& law, const SpectralTable& table,
                                     const std::function<double(double)>& X0fn,
                                     const std::function<double(double)>& X1fn, double tau);

EvolvedSlice free_evolve(const ScalingLaw& law, const SpectralTable& table, const CauchyPair& pair,
                         double tau)
{
    if (pair.x0.table != &table || pair.x1.table != &table)
        throw grid_mismatch("free_evolve: pair from another table");
    return free_evolve_impl(
        law, table, [&](double q) { return data_at(table, pair.x0.xc, q); },
        [&](double q) { return data_at(table, pair.x1.xc, q); }, tau);
}

EvolvedSlice free_evolve_fn(const ScalingLaw& law, const SpectralTable& table,
                            const std::function<double(double)>& x0, const std::function<double(double)>& x1,
                            double tau)
{
    return free_evolve_impl(law, table, x0, x1, tau);
}

static EvolvedSlice free_evolve_impl(const ScalingLaw& law, const SpectralTable& table,
                                     const std::function<double(double)>& X0fn,
                                     const std::function<double(double)>& X1fn, double tau)
{
    if (tau < law.tau0) throw std::domain_error("free_evolve: tau < tau0");

    double a = law.lambda(tau) / law.lambda(law.tau0);
    double s = a * a;
    double a32 = std::pow(a, 1.5), a52 = std::pow(a, 2.5);
    double phase0 = law.phase_integral(law.tau0, tau, tau); // lambda(tau) int 1/lambda

    EvolvedSlice out{FourierState::zero(table), FourierState::zero(table)};
    std::size_t n = table.n_xi();
    parallel_for(n, [&](std::size_t i) {
        double xi = table.grid_xi.xis[i];
        double sqxi = std::sqrt(xi);
        double q = s * xi;
        double rr = table.sqrt_rho_ratio(q, xi);
        double X0 = X0fn(q);
        double X1 = X1fn(q);
        double ph = phase0 * sqxi;
        double cp = std::cos(ph), sp = std::sin(ph);
        out.x.xc[i] = a52 * rr * cp * X0 + a32 * rr * sp / sqxi * X1;
        out.dx.xc[i] = -sqxi * a52 * rr * sp * X0 + a32 * rr * cp * X1;
    });
    return out;
}

double GriddedSource::operator()(double sigma, double xi) const
{
    if (taus.empty()) return 0.0;
    if (sigma <= taus.front()) sigma = taus.front();
    if (sigma >= taus.back()) sigma = taus.back();
    auto it = std::upper_bound(taus.begin(), taus.end(), sigma);
    std::size_t k = std::min<std::size_t>(taus.size() - 1, static_cast<std::size_t>(it - taus.begin()));
    if (k == 0) k = 1;
    double w = (sigma - taus[k - 1]) / (taus[k] - taus[k - 1]);
    double lo = interp_loglin(table->grid_xi.xis, slices[k - 1], xi, true, false);
    double hi = interp_loglin(table->grid_xi.xis, slices[k], xi, true, false);
    return (1.0 - w) * lo + w * hi;
}

namespace {

struct KernelAccum {
    double x = 0.0;
    double dx = 0.0;
    double last_panel_mag = 0.0;
    double last_width = 1.0;
};

// integrate the sin/cos kernels against f over [lo, hi] for one output (tau, xi);
// phase = lambda(tau) sqrt(xi) |int_sigma^tau 1/lambda| handled in closed form.
// sign conventions: sin coefficient ssin, cos coefficient scos.
KernelAccum kernel_integrate(const ScalingLaw& law, const SpectralTable& table, const FreqSource& f,
                             double tau, double xi, double lo, double hi, double ssin, double scos,
                             const DuhamelOptions& opt)
{
    KernelAccum acc;
    if (hi <= lo) return acc;
    double sqxi = std::sqrt(xi);
    double lam_tau = law.lambda(tau);
    double rho_xi = table.rho_at(xi);
    double sigma = lo;
    while (sigma < hi) {
        double rate = lam_tau * sqxi / law.lambda(sigma);
        double width = std::min({opt.panel_phase / rate, opt.panel_frac * sigma, hi - sigma});
        width = std::max(width, 1e-9 * sigma);
        double panel_x = 0.0, panel_dx = 0.0;
        for (int g = 0; g < 7; ++g) {
            double s = sigma + 0.5 * width * (1.0 + GaussLegendre7::node[g]);
            double lr = lam_tau / law.lambda(s);
            double q = lr * lr * xi;
            double amp = std::pow(lr, 1.5) * std::sqrt(table.rho_at(q) / rho_xi);
            double ph = sqxi * std::abs(law.phase_integral(s, tau, tau));
            double fv = f(s, q);
            double w = 0.5 * width * GaussLegendre7::weight[g];
            panel_x += w * amp * std::sin(ph) / sqxi * fv;
            panel_dx += w * amp * std::cos(ph) * fv;
        }
        acc.x += ssin * panel_x;
        acc.dx += scos * panel_dx;
        acc.last_panel_mag = std::max(std::abs(panel_x), std::abs(panel_dx) / std::max(sqxi, 1.0));
        acc.last_width = width;
        sigma += width;
    }
    return acc;
}

} // namespace

DuhamelResult duhamel_forward(const ScalingLaw& law, const SpectralTable& table, const FreqSource& f,
                              double tau, const DuhamelOptions& opt)
{
    if (tau < law.tau0) throw std::domain_error("duhamel_forward: tau < tau0");
    DuhamelResult out{FourierState::zero(table), FourierState::zero(table), 0.0};
    parallel_for(table.n_xi(), [&](std::size_t i) {
        auto acc = kernel_integrate(law, table, f, tau, table.grid_xi.xis[i], law.tau0, tau, 1.0, 1.0, opt);
        out.x.xc[i] = acc.x;
        if (opt.with_derivative) out.dx.xc[i] = acc.dx;
    });
    return out;
}

DuhamelResult duhamel_backward(const ScalingLaw& law, const SpectralTable& table, const FreqSource& f,
                               double tau, double t_max, const DuhamelOptions& opt)
{
    if (tau < law.tau0) throw std::domain_error("duhamel_backward: tau < tau0");
    if (!(t_max > tau)) throw std::domain_error("duhamel_backward: t_max must exceed tau");
    DuhamelResult out{FourierState::zero(table), FourierState::zero(table), 0.0};
    std::vector<double> tails(table.n_xi(), 0.0);
    parallel_for(table.n_xi(), [&](std::size_t i) {
        // D_tau of the backward integral carries a minus cos kernel
        auto acc = kernel_integrate(law, table, f, tau, table.grid_xi.xis[i], tau, t_max, 1.0, -1.0, opt);
        out.x.xc[i] = acc.x;
        if (opt.with_derivative) out.dx.xc[i] = acc.dx;
        // decay of the integrand past the horizon: kernel alone falls off like
        // sigma^{-(3/2)(1+1/nu)}; credit the phase cancellation with one power
        double p_eff = 1.5 * (1.0 + 1.0 / law.nu) - 1.0;
        tails[i] = acc.last_panel_mag / acc.last_width * t_max / std::max(1.0, p_eff - 1.0);
    });
    double tail = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < table.n_xi(); ++i) {
        tail = std::max(tail, tails[i]);
        scale = std::max(scale, std::abs(out.x.xc[i]));
    }
    out.tail_bound = tail;
    if (tail > opt.tail_tol * std::max(scale, 1e-300))
        throw accuracy_error("duhamel_backward: truncation horizon too short");
    return out;
}

double discrete_green_apply(double xi_d, const std::vector<double>& sigmas, const std::vector<double>& f_d,
                            double tau)
{
    if (sigmas.size() != f_d.size() || sigmas.size() < 2)
        throw std::invalid_argument("discrete_green_apply: bad samples");
    double a = std::sqrt(-xi_d);

    // int_l^r exp(-a|tau - s|) (linear interpolant) ds, exact
    auto seg = [&](double l, double r, double fl, double fr) {
        if (r <= l) return 0.0;
        double c1 = (fr - fl) / (r - l);
        auto antider = [&](double lo, double hi, double sgn) {
            // integral of exp(sgn * a (s - tau)) (fl + c1 (s - l)) over [lo, hi]
            double g = sgn * a;
            double elo = std::exp(g * (lo - tau)), ehi = std::exp(g * (hi - tau));
            double lin_hi = fl + c1 * (hi - l), lin_lo = fl + c1 * (lo - l);
            return (ehi * lin_hi - elo * lin_lo) / g - c1 * (ehi - elo) / (g * g);
        };
        if (r <= tau) return antider(l, r, +1.0);  // s < tau: |tau-s| = tau-s
        if (l >= tau) return antider(l, r, -1.0);
        return antider(l, tau, +1.0) + antider(tau, r, -1.0);
    };

    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < sigmas.size(); ++k)
        acc += seg(sigmas[k], sigmas[k + 1], f_d[k], f_d[k + 1]);
    return -0.5 / a * acc;
}

std::vector<double> exp_green_apply(double xi_d, double dt, const std::vector<double>& g)
{
    // H_d * g on a uniform grid by two recursive exponential scans, O(n)
    double a = std::sqrt(-xi_d);
    std::size_t n = g.size();
    double E = std::exp(-a * dt);
    double cA = (1.0 - E) / a;                       // int exp(-a s) ds over a cell
    double cB = (1.0 - E * (1.0 + a * dt)) / (a * a * dt); // int (s/dt) exp(-a s) ds
    std::vector<double> L(n, 0.0), R(n, 0.0), out(n);
    for (std::size_t k = 1; k < n; ++k) {
        // kernel exp(-a (tau_k - sigma)) over [tau_{k-1}, tau_k]: mirror of cB
        L[k] = E * L[k - 1] + g[k] * (cA - cB) + g[k - 1] * cB;
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        R[k] = E * R[k + 1] + g[k] * (cA - cB) + g[k + 1] * cB;
    }
    for (std::size_t k = 0; k < n; ++k) out[k] = -0.5 / a * (L[k] + R[k]);
    return out;
}

DiscreteFreeResult discrete_free_evolve(const ScalingLaw& law, double xi_d, double x0d, double tau0,
                                        double t_max, double dt, double beta_scale)
{
    if (!(xi_d < 0.0)) throw std::domain_error("discrete_free_evolve: xi_d must be negative");
    double a = std::sqrt(-xi_d);
    std::size_t n = static_cast<std::size_t>(std::ceil((t_max - tau0) / dt)) + 1;
    DiscreteFreeResult out;
    out.taus.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.taus[k] = tau0 + dt * static_cast<double>(k);
    out.x_d.assign(n, 0.0);

    std::vector<double> cur(n, 0.0), rhs(n, 0.0);
    double free_amp = x0d;
    for (std::size_t k = 0; k < n; ++k) cur[k] = x0d * std::exp(-a * (out.taus[k] - tau0));

    double prev_delta = 1e300;
    int grow_count = 0;
    for (int it = 0; it < 400; ++it) {
        for (std::size_t k = 0; k < n; ++k) {
            double d;
            if (k == 0)
                d = (cur[1] - cur[0]) / dt;
            else if (k + 1 == n)
                d = (cur[n - 1] - cur[n - 2]) / dt;
            else
                d = (cur[k + 1] - cur[k - 1]) / (2.0 * dt);
            rhs[k] = beta_scale * law.beta(out.taus[k]) * d;
        }
        std::vector<double> green = exp_green_apply(xi_d, dt, rhs);
        double delta = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double v = free_amp * std::exp(-a * (out.taus[k] - tau0)) - green[k];
            delta = std::max(delta, std::abs(v - cur[k]));
            scale = std::max(scale, std::abs(v));
            cur[k] = v;
        }
        free_amp += x0d - cur[0]; // re-match the data at tau0 for the next sweep
        if (delta <= 1e-13 * std::max(scale, 1e-300)) break;
        if (delta > prev_delta * 1.02) {
            if (++grow_count >= 3) throw accuracy_error("discrete_free_evolve: fixed point not contracting (tau0 too small)");
        } else {
            grow_count = 0;
        }
        prev_delta = delta;
    }
    out.x_d = cur;

    // log-linear fit over [tau0, tau0 + 5/a]
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < n; ++k) {
        double dtau = out.taus[k] - tau0;
        if (dtau > 5.0 / a) break;
        if (cur[k] * x0d <= 0.0) continue;
        xs.push_back(dtau);
        ys.push_back(std::log(std::abs(cur[k])));
    }
    auto [b0, b1] = linfit(xs, ys);
    out.fit.gamma_d = b1;
    out.fit.c_d = std::exp(b0) / std::abs(x0d);
    out.x1d = out.fit.gamma_d * x0d;
    return out;
}

} // namespace renwave
