#include "renwave/iteration.hpp"

#include "renwave/util.hpp"

#include <algorithm>
#include <cmath>

namespace renwave {

std::size_t StateHistory::index_at(double tau) const
{
    if (taus.empty()) throw std::logic_error("StateHistory: empty");
    double k = (tau - tau0) / dt;
    long kk = std::lround(k);
    if (kk < 0) kk = 0;
    if (kk >= static_cast<long>(taus.size())) kk = static_cast<long>(taus.size()) - 1;
    return static_cast<std::size_t>(kk);
}

FourierState StateHistory::state_at(std::size_t k) const
{
    FourierState s = FourierState::zero(*table);
    s.xc = xc[k];
    s.xd = xd[k];
    return s;
}

FourierState StateHistory::dstate_at(std::size_t k) const
{
    FourierState s = FourierState::zero(*table);
    s.xc = dxc[k];
    s.xd = dxd[k];
    return s;
}

void StateHistory::add(const StateHistory& other, double factor)
{
    if (other.size() != size()) throw grid_mismatch("StateHistory::add: size mismatch");
    for (std::size_t k = 0; k < size(); ++k) {
        for (std::size_t i = 0; i < xc[k].size(); ++i) {
            xc[k][i] += factor * other.xc[k][i];
            dxc[k][i] += factor * other.dxc[k][i];
        }
        xd[k] += factor * other.xd[k];
        dxd[k] += factor * other.dxd[k];
    }
}

StateHistory zeroth_iterate(const ScalingLaw& law, const SpectralTable& table, const CauchyPair& pair,
                            const IterationConfig& cfg)
{
    StateHistory h;
    h.table = &table;
    h.tau0 = law.tau0;
    h.dt = cfg.dt;
    std::size_t n = static_cast<std::size_t>(std::llround((cfg.t_max - law.tau0) / cfg.dt)) + 1;
    h.taus.resize(n);
    for (std::size_t k = 0; k < n; ++k) h.taus[k] = law.tau0 + cfg.dt * static_cast<double>(k);
    h.xc.assign(n, {});
    h.dxc.assign(n, {});

    parallel_for(n, [&](std::size_t k) {
        EvolvedSlice s = free_evolve(law, table, pair, h.taus[k]);
        h.xc[k] = std::move(s.x.xc);
        h.dxc[k] = std::move(s.dx.xc);
    });

    auto disc = discrete_free_evolve(law, table.xi_d, pair.x0.xd, law.tau0, cfg.t_max, cfg.dt);
    h.xd.assign(n, 0.0);
    h.dxd.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        h.xd[k] = interp_linear(disc.taus, disc.x_d, h.taus[k]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0)
            h.dxd[k] = (h.xd[1] - h.xd[0]) / cfg.dt;
        else if (k + 1 == n)
            h.dxd[k] = (h.xd[n - 1] - h.xd[n - 2]) / cfg.dt;
        else
            h.dxd[k] = (h.xd[k + 1] - h.xd[k - 1]) / (2.0 * cfg.dt);
    }
    return h;
}

namespace {

// banded A_c application built from the log-grid stencils (matches build_Ac)
struct BandedAc {
    double du;
    std::vector<double> sym; // 5/2 + dlog rho/dlog xi

    void apply(const std::vector<double>& v, std::vector<double>& out) const
    {
        std::size_t n = v.size();
        double h12 = 12.0 * du;
        for (std::size_t i = 0; i < n; ++i) {
            double d;
            if (i >= 2 && i + 2 < n)
                d = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / h12;
            else if (i == 0)
                d = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / h12;
            else if (i == 1)
                d = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / h12;
            else if (i + 2 == n)
                d = (-v[n - 5] + 6.0 * v[n - 4] - 18.0 * v[n - 3] + 10.0 * v[n - 2] + 3.0 * v[n - 1]) / h12;
            else
                d = (3.0 * v[n - 5] - 16.0 * v[n - 4] + 36.0 * v[n - 3] - 48.0 * v[n - 2] + 25.0 * v[n - 1]) / h12;
            out[i] = -2.0 * d - sym[i] * v[i];
        }
    }
};

// composite source matrices on the (discrete + continuous) block vector:
// R(tau, X, dX) = beta * M1 dX - beta^2 * M2 X
struct SourceMatrices {
    Eigen::MatrixXd M1;
    Eigen::MatrixXd M2;
};

SourceMatrices build_source_matrices(const ScalingLaw& law, const TransferenceMatrices& tm,
                                     const RSourceOptions& opt)
{
    std::size_t n = tm.n();
    Eigen::MatrixXd K(n + 1, n + 1);
    K(0, 0) = tm.Kdd;
    K.block(0, 1, 1, n) = tm.Kdc;
    K.block(1, 0, n, 1) = tm.Kcd;
    K.block(1, 1, n, n) = tm.Kcc;
    if (opt.exact_transform) K -= Eigen::MatrixXd::Identity(n + 1, n + 1);

    Eigen::MatrixXd comm = Eigen::MatrixXd::Zero(n + 1, n + 1);
    comm.block(0, 1, 1, n) = -(tm.Kdc * tm.Ac);
    comm.block(1, 0, n, 1) = tm.Ac * tm.Kcd;
    comm.block(1, 1, n, n) = tm.commAK;

    double c1 = opt.exact_transform ? -2.0 : opt.ddx_coeff;
    double bpb = law.beta_prime_over_beta_sq();
    SourceMatrices sm;
    sm.M1 = c1 * K;
    sm.M2 = K * K + comm + (1.0 + bpb) * K;
    return sm;
}

struct FineGrids {
    std::size_t n_full = 0;
    std::vector<double> taus_half; // spacing dt/2, 2*(n_full-1)+1 points
};

FineGrids make_grids(const ScalingLaw& law, const IterationConfig& cfg)
{
    FineGrids g;
    g.n_full = static_cast<std::size_t>(std::llround((cfg.t_max - law.tau0) / cfg.dt)) + 1;
    std::size_t nh = 2 * (g.n_full - 1) + 1;
    g.taus_half.resize(nh);
    for (std::size_t m = 0; m < nh; ++m) g.taus_half[m] = law.tau0 + 0.5 * cfg.dt * static_cast<double>(m);
    return g;
}

// source tabulation on the half grid: [xd-row, xc-rows...]
struct SourceTab {
    std::vector<std::vector<double>> sc; // per half-slice, size nxi
    std::vector<double> sd;
};

// march D^2 x + beta D x + xi x = S backward from t_max with zero terminal
// data; writes (x = Delta_{>tau}, y = D_tau x) on the full grid
void march_backward(const ScalingLaw& law, const SpectralTable& table, const BandedAc& ac,
                    const SourceTab& src, const FineGrids& g, double dt, StateHistory& out)
{
    std::size_t n = g.n_full, nxi = table.n_xi();
    out.xc.assign(n, std::vector<double>(nxi, 0.0));
    out.dxc.assign(n, std::vector<double>(nxi, 0.0));

    std::vector<double> x(nxi, 0.0), y(nxi, 0.0);
    std::vector<double> ax(nxi), ay(nxi);
    std::vector<double> k1x(nxi), k1y(nxi), k2x(nxi), k2y(nxi), k3x(nxi), k3y(nxi), k4x(nxi), k4y(nxi);
    std::vector<double> tx(nxi), ty(nxi);

    auto rhs = [&](double tau, std::size_t half_idx, const std::vector<double>& xv,
                   const std::vector<double>& yv, std::vector<double>& ox, std::vector<double>& oy) {
        double beta = law.beta(tau);
        ac.apply(xv, ax);
        ac.apply(yv, ay);
        const std::vector<double>& s = src.sc[half_idx];
        for (std::size_t i = 0; i < nxi; ++i) {
            ox[i] = yv[i] - beta * ax[i];
            oy[i] = -beta * ay[i] - beta * yv[i] - table.grid_xi.xis[i] * xv[i] + s[i];
        }
    };

    double h = -dt; // backward
    for (std::size_t k = n - 1; k > 0; --k) {
        double tau = out.taus[k];
        std::size_t m = 2 * k; // half-grid index of tau
        rhs(tau, m, x, y, k1x, k1y);
        for (std::size_t i = 0; i < nxi; ++i) {
            tx[i] = x[i] + 0.5 * h * k1x[i];
            ty[i] = y[i] + 0.5 * h * k1y[i];
        }
        rhs(tau + 0.5 * h, m - 1, tx, ty, k2x, k2y);
        for (std::size_t i = 0; i < nxi; ++i) {
            tx[i] = x[i] + 0.5 * h * k2x[i];
            ty[i] = y[i] + 0.5 * h * k2y[i];
        }
        rhs(tau + 0.5 * h, m - 1, tx, ty, k3x, k3y);
        for (std::size_t i = 0; i < nxi; ++i) {
            tx[i] = x[i] + h * k3x[i];
            ty[i] = y[i] + h * k3y[i];
        }
        rhs(tau + h, m - 2, tx, ty, k4x, k4y);
        for (std::size_t i = 0; i < nxi; ++i) {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            y[i] += h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
        }
        out.xc[k - 1] = x;
        out.dxc[k - 1] = y;
    }
}

// discrete part: Delta x_d = H_d * (S_d - beta d_tau Delta x_d), vanishing at
// the horizon; fixed point with the O(n) Green scans
void discrete_increment(const ScalingLaw& law, const SpectralTable& table, const SourceTab& src,
                        const FineGrids& g, double dt, StateHistory& out)
{
    std::size_t n = g.n_full;
    std::vector<double> sd(n);
    for (std::size_t k = 0; k < n; ++k) sd[k] = src.sd[2 * k];
    std::vector<double> cur(n, 0.0), rhs(n);
    for (int it = 0; it < 200; ++it) {
        for (std::size_t k = 0; k < n; ++k) {
            double d;
            if (k == 0)
                d = (cur[1] - cur[0]) / dt;
            else if (k + 1 == n)
                d = (cur[n - 1] - cur[n - 2]) / dt;
            else
                d = (cur[k + 1] - cur[k - 1]) / (2.0 * dt);
            rhs[k] = sd[k] - law.beta(out.taus[k]) * d;
        }
        std::vector<double> next = exp_green_apply(table.xi_d, dt, rhs);
        double delta = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            delta = std::max(delta, std::abs(next[k] - cur[k]));
            scale = std::max(scale, std::abs(next[k]));
        }
        cur.swap(next);
        if (delta <= 1e-12 * std::max(scale, 1e-300)) break;
    }
    out.xd = cur;
    out.dxd.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0)
            out.dxd[k] = (cur[1] - cur[0]) / dt;
        else if (k + 1 == n)
            out.dxd[k] = (cur[n - 1] - cur[n - 2]) / dt;
        else
            out.dxd[k] = (cur[k + 1] - cur[k - 1]) / (2.0 * dt);
    }
}

struct LedgerInput {
    const ScalingLaw* law;
    const SpectralTable* table;
    const NormConfig* nc;
    const std::vector<double>* samples;
};

// Def-11.1 terms from the sampled increment; kappa-weighted sups and dyadic
// square sums, data norms, discrete sups
void fill_ledger(const LedgerInput& li, const StateHistory& delta, const StateHistory& march,
                 const CauchyPair& corr, IterateRecord& rec, std::array<double, 6>& terms)
{
    const auto& t = *li.table;
    const auto& nc = *li.nc;
    double kap = li.law->kappa();
    double one_minus = 1.0 - nc.delta0;

    auto masked_norm = [&](const std::vector<double>& v, NormKind kind, bool high) {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.n_xi(); ++i) {
            double xi = t.grid_xi.xis[i];
            if (high != (xi > 1.0)) continue;
            double w;
            switch (kind) {
                case NormKind::S1: w = std::pow(jbracket(xi), 1.0 + 2 * nc.delta0) * std::pow(xi, -nc.delta0); break;
                case NormKind::S2: w = std::pow(jbracket(xi), 0.5 + 2 * nc.delta0) * std::pow(xi, -nc.delta0); break;
                default: throw std::logic_error("masked_norm: unsupported kind");
            }
            acc += t.grid_xi.weights[i] * sq(w * v[i]);
        }
        return std::sqrt(acc);
    };

    std::vector<double> q1, q2, q3, q4, taus;
    double disc_sup = 0.0, ddisc_sup = 0.0;
    for (double tau : *li.samples) {
        std::size_t k = delta.index_at(tau);
        taus.push_back(delta.taus[k]);
        q1.push_back(masked_norm(delta.xc[k], NormKind::S1, true));
        q2.push_back(masked_norm(march.dxc[k], NormKind::S2, true));
        q3.push_back(masked_norm(march.xc[k], NormKind::S1, false));
        q4.push_back(masked_norm(march.dxc[k], NormKind::S2, false));
        disc_sup = std::max(disc_sup, std::pow(delta.taus[k], one_minus) * std::abs(delta.xd[k]));
        ddisc_sup = std::max(ddisc_sup, std::pow(delta.taus[k], one_minus) * std::abs(delta.dxd[k]));
    }
    double sup1 = 0.0, sup3 = 0.0;
    for (std::size_t m = 0; m < taus.size(); ++m) {
        sup1 = std::max(sup1, std::pow(taus[m] / nc.tau0, -kap) * q1[m]);
        sup3 = std::max(sup3, std::pow(taus[m] / nc.tau0, -kap) * q3[m]);
    }
    terms[0] = sup1;
    terms[1] = dyadic_diagnostic(nc, taus, q2, kap);
    terms[2] = sup3;
    terms[3] = dyadic_diagnostic(nc, taus, q4, kap);
    terms[4] = pair_norm_tilde(nc, corr) + pair_norm_strong(nc, corr);
    terms[5] = disc_sup + ddisc_sup;
    rec.ledger = terms[0] + terms[1] + terms[2] + terms[3] + terms[4] + terms[5];
}

} // namespace

IterationResult run_iteration(const ScalingLaw& law, const SpectralTable& table,
                              const TransferenceMatrices& tm, const CauchyPair& pair,
                              const IterationConfig& cfg)
{
    if (tm.table != &table || pair.x0.table != &table) throw grid_mismatch("run_iteration: table mismatch");
    NormConfig nc = NormConfig::from_law(law, cfg.tau_samples.empty() ? 3 : std::max(1, static_cast<int>(std::log2(
        cfg.tau_samples.back() / law.tau0))));
    double data_size = pair_norm_tilde(nc, pair) + std::abs(pair.x0.xd);
    if (data_size > cfg.delta2)
        throw std::domain_error("run_iteration: data above the smallness gate delta2");

    FineGrids g = make_grids(law, cfg);
    SourceMatrices sm = build_source_matrices(law, tm, cfg.r_opts);
    BandedAc ac{table.grid_xi.log_step(), {}};
    ac.sym.resize(table.n_xi());
    for (std::size_t i = 0; i < table.n_xi(); ++i) ac.sym[i] = 2.5 + tm.dlogrho[i];

    IterationResult result;
    result.total = zeroth_iterate(law, table, pair, cfg);
    StateHistory accum = result.total; // x^{(j)} accumulated
    std::size_t nxi = table.n_xi(), nfull = g.n_full, nhalf = g.taus_half.size();

    // nonlinear source of the accumulated state on the strided grid
    auto tabulate_f = [&](const StateHistory& st) {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < nfull; k += cfg.nl_stride) idx.push_back(k);
        if (idx.back() != nfull - 1) idx.push_back(nfull - 1);
        std::vector<std::vector<double>> slices(idx.size());
        std::vector<double> fd(idx.size());
        std::vector<double> taus(idx.size());
        parallel_for(idx.size(), [&](std::size_t m) {
            std::size_t k = idx[m];
            taus[m] = st.taus[k];
            FourierState f = rn_fourier(law, table, cfg.bulk, st.taus[k], st.state_at(k));
            slices[m] = std::move(f.xc);
            fd[m] = f.xd;
        });
        return std::make_tuple(taus, slices, fd);
    };

    auto tab0 = tabulate_f(accum);
    std::vector<double> f_taus = std::get<0>(tab0);
    std::vector<std::vector<double>> f_prev = std::get<1>(tab0);
    std::vector<double> fd_prev = std::get<2>(tab0);

    StateHistory prev_delta; // Delta x^{(j-1)}; j = 1 reads the zeroth iterate
    bool have_prev_delta = false;

    std::vector<double> ratios;
    for (int j = 1; j <= cfg.j_max; ++j) {
        // --- linear source tab on the half grid
        SourceTab lin;
        lin.sc.assign(nhalf, std::vector<double>(nxi, 0.0));
        lin.sd.assign(nhalf, 0.0);
        const StateHistory& src_state = have_prev_delta ? prev_delta : result.total;
        parallel_for(nhalf, [&](std::size_t m) {
            double tau = g.taus_half[m];
            Eigen::VectorXd X(nxi + 1), dX(nxi + 1);
            if (!have_prev_delta && m % 2 == 1) {
                // half-slice of the zeroth iterate evaluated analytically
                EvolvedSlice s = free_evolve(law, table, pair, tau);
                X(0) = 0.5 * (src_state.xd[m / 2] + src_state.xd[m / 2 + 1]);
                dX(0) = 0.5 * (src_state.dxd[m / 2] + src_state.dxd[m / 2 + 1]);
                for (std::size_t i = 0; i < nxi; ++i) {
                    X(i + 1) = s.x.xc[i];
                    dX(i + 1) = s.dx.xc[i];
                }
            } else if (m % 2 == 0) {
                std::size_t k = m / 2;
                X(0) = src_state.xd[k];
                dX(0) = src_state.dxd[k];
                for (std::size_t i = 0; i < nxi; ++i) {
                    X(i + 1) = src_state.xc[k][i];
                    dX(i + 1) = src_state.dxc[k][i];
                }
            } else {
                std::size_t k = m / 2;
                X(0) = 0.5 * (src_state.xd[k] + src_state.xd[k + 1]);
                dX(0) = 0.5 * (src_state.dxd[k] + src_state.dxd[k + 1]);
                for (std::size_t i = 0; i < nxi; ++i) {
                    X(i + 1) = 0.5 * (src_state.xc[k][i] + src_state.xc[k + 1][i]);
                    dX(i + 1) = 0.5 * (src_state.dxc[k][i] + src_state.dxc[k + 1][i]);
                }
            }
            double beta = law.beta(tau) * cfg.r_opts.beta_scale;
            Eigen::VectorXd R = beta * (sm.M1 * dX) - beta * beta * (sm.M2 * X);
            lin.sd[m] = R(0);
            for (std::size_t i = 0; i < nxi; ++i) lin.sc[m][i] = R(i + 1);
        });

        // --- nonlinear difference source: Delta f^{(0)} := f^{(0)}
        auto tabn = tabulate_f(accum);
        const std::vector<double>& fn_taus = std::get<0>(tabn);
        const std::vector<std::vector<double>>& f_now = std::get<1>(tabn);
        const std::vector<double>& fd_now = std::get<2>(tabn);
        SourceTab nl;
        nl.sc.assign(nhalf, std::vector<double>(nxi, 0.0));
        nl.sd.assign(nhalf, 0.0);
        parallel_for(nhalf, [&](std::size_t m) {
            double tau = g.taus_half[m];
            auto bracket = [tau](const std::vector<double>& ts, std::size_t& q, double& w) {
                q = 0;
                while (q + 2 < ts.size() && ts[q + 1] <= tau) ++q;
                w = std::clamp((tau - ts[q]) / (ts[q + 1] - ts[q]), 0.0, 1.0);
            };
            std::size_t qn, qp = 0;
            double wn, wp = 0.0;
            bracket(fn_taus, qn, wn);
            if (j > 1) bracket(f_taus, qp, wp);
            for (std::size_t i = 0; i < nxi; ++i) {
                double now = (1.0 - wn) * f_now[qn][i] + wn * f_now[qn + 1][i];
                double prev = j > 1 ? (1.0 - wp) * f_prev[qp][i] + wp * f_prev[qp + 1][i] : 0.0;
                nl.sc[m][i] = now - prev;
            }
            nl.sd[m] = (1.0 - wn) * fd_now[qn] + wn * fd_now[qn + 1]
                     - (j > 1 ? (1.0 - wp) * fd_prev[qp] + wp * fd_prev[qp + 1] : 0.0);
        });

        // --- march both components
        auto empty_hist = [&]() {
            StateHistory h;
            h.table = &table;
            h.tau0 = law.tau0;
            h.dt = cfg.dt;
            h.taus = result.total.taus;
            h.xd.assign(nfull, 0.0);
            h.dxd.assign(nfull, 0.0);
            return h;
        };
        StateHistory march_lin = empty_hist(), march_nl = empty_hist();
        march_backward(law, table, ac, lin, g, cfg.dt, march_lin);
        march_backward(law, table, ac, nl, g, cfg.dt, march_nl);
        discrete_increment(law, table, lin, g, cfg.dt, march_lin);
        discrete_increment(law, table, nl, g, cfg.dt, march_nl);

        StateHistory march = march_lin;
        march.add(march_nl);

        // --- tau0-anchored raw data shifts by panel quadrature
        GriddedSource gs_lin{&table, g.taus_half, lin.sc};
        GriddedSource gs_nl{&table, g.taus_half, nl.sc};
        auto combined = [&](double sig, double q) { return gs_lin(sig, q) + gs_nl(sig, q); };
        DuhamelOptions dopt;
        dopt.tail_tol = 0.25;
        DuhamelResult shift = duhamel_backward(law, table, combined, law.tau0, cfg.t_max, dopt);

        IterateRecord rec;
        rec.j = j;
        rec.tail_bound = shift.tail_bound;
        rec.raw_shift = CauchyPair{shift.x, shift.dx};
        rec.xd0 = march.xd[0];
        rec.xd1 = march.dxd[0];

        // --- free part: corrections of the negated shifts satisfy (3.1)
        CauchyPair negated{FourierState::zero(table), FourierState::zero(table)};
        axpy(-1.0, shift.x, negated.x0);
        axpy(-1.0, shift.dx, negated.x1);
        auto corr = admissible_correction(table, nc, law.nu, negated, cfg.C_cut);
        rec.data_correction = corr.corrected;
        rec.alpha = corr.alpha;
        rec.beta = corr.beta;

        // --- assemble the increment Delta x^{(j)} = march + S(tau)(e0, e1)
        StateHistory delta = march;
        {
            CauchyPair free_data = rec.data_correction;
            parallel_for(nfull, [&](std::size_t k) {
                EvolvedSlice s = free_evolve(law, table, free_data, delta.taus[k]);
                for (std::size_t i = 0; i < nxi; ++i) {
                    delta.xc[k][i] += s.x.xc[i];
                    delta.dxc[k][i] += s.dx.xc[i];
                }
            });
        }

        // --- ledger
        LedgerInput li{&law, &table, &nc, &cfg.tau_samples};
        fill_ledger(li, delta, march, rec.data_correction, rec, rec.ledger_terms);
        {
            std::array<double, 6> tmp{};
            IterateRecord scratch;
            CauchyPair zero_corr{FourierState::zero(table), FourierState::zero(table)};
            fill_ledger(li, march_lin, march_lin, zero_corr, scratch, tmp);
            rec.ledger_linear = scratch.ledger;
            fill_ledger(li, march_nl, march_nl, zero_corr, scratch, tmp);
            rec.ledger_nonlinear = scratch.ledger;
        }

        // bookkeeping: the increment's actual tau0 slice (march + free part)
        rec.slice0 = CauchyPair{FourierState::zero(table), FourierState::zero(table)};
        rec.slice0.x0.xc = delta.xc[0];
        rec.slice0.x1.xc = delta.dxc[0];
        rec.slice0.x0.xd = delta.xd[0];
        rec.slice0.x1.xd = delta.dxd[0];

        // --- advance the accumulation
        accum.add(delta);
        result.total = accum;
        f_taus = fn_taus;
        f_prev = std::get<1>(tabn);
        fd_prev = std::get<2>(tabn);
        prev_delta = std::move(delta);
        have_prev_delta = true;
        result.records.push_back(std::move(rec));
    }

    // convergence: the ledger ratios of the last two steps below one
    std::size_t nr = result.records.size();
    if (nr >= 3) {
        double r1 = result.records[nr - 2].ledger / std::max(result.records[nr - 3].ledger, 1e-300);
        double r2 = result.records[nr - 1].ledger / std::max(result.records[nr - 2].ledger, 1e-300);
        result.converged = r1 < 1.0 && r2 < 1.0;
    } else if (data_size == 0.0) {
        result.converged = true;
    }

    // corrected data: pair plus every increment's slice data at tau0
    result.corrected_data = pair;
    for (const auto& rec : result.records) {
        axpy(1.0, rec.slice0.x0, result.corrected_data.x0);
        axpy(1.0, rec.slice0.x1, result.corrected_data.x1);
    }
    return result;
}

std::vector<double> reconstruct_field(const SpectralTable& table, const FourierState& s)
{
    return dft_inverse(table, s);
}

PhysicalPair data_map_to_physical(const ScalingLaw& law, const SpectralTable& table,
                                  const TransferenceMatrices& tm, const CauchyPair& fourier,
                                  double beta_scale)
{
    double beta = law.beta(law.tau0) * beta_scale;
    double lam = law.lambda(law.tau0);
    std::vector<double> eps_tilde = dft_inverse(table, fourier.x0);

    // -F((R/lam) eps_t) = x1 + beta (K - 1) x0 componentwise
    FourierState rhs = fourier.x1;
    FourierState kx0 = apply_K(tm, fourier.x0, /*shifted=*/true);
    axpy(beta, kx0, rhs);
    std::vector<double> w = dft_inverse(table, rhs); // = -(R/lam) eps_t

    PhysicalPair out;
    out.eps.assign(table.n_R(), 0.0);
    out.eps_t.assign(table.n_R(), 0.0);
    for (std::size_t jj = 1; jj < table.n_R(); ++jj) {
        double R = table.grid_R.nodes[jj];
        out.eps[jj] = eps_tilde[jj] / R;
        out.eps_t[jj] = -lam / R * w[jj];
    }
    out.eps[0] = (eps_tilde[1] - eps_tilde[0]) / table.grid_R.dr;
    out.eps_t[0] = -lam * (w[1] - w[0]) / table.grid_R.dr;
    return out;
}

CauchyPair data_map_to_fourier(const ScalingLaw& law, const SpectralTable& table,
                               const TransferenceMatrices& tm, const PhysicalPair& physical,
                               double beta_scale)
{
    double beta = law.beta(law.tau0) * beta_scale;
    double lam = law.lambda(law.tau0);
    std::vector<double> eps_tilde(table.n_R()), w(table.n_R());
    for (std::size_t jj = 0; jj < table.n_R(); ++jj) {
        double R = table.grid_R.nodes[jj];
        eps_tilde[jj] = R * physical.eps[jj];
        w[jj] = -(R / lam) * physical.eps_t[jj];
    }
    CauchyPair out{dft_forward(table, eps_tilde), FourierState::zero(table)};
    FourierState g = dft_forward(table, w); // x1 + beta (K-1) x0
    FourierState kx0 = apply_K(tm, out.x0, /*shifted=*/true);
    out.x1 = g;
    axpy(-beta, kx0, out.x1);
    return out;
}

double local_energy(const ScalingLaw& law, const SpectralTable& table, const TransferenceMatrices& tm,
                    double tau, const FourierState& x, const FourierState& dx)
{
    double lam = law.lambda(tau);
    double R_cone = law.nu * tau;
    std::vector<double> eps_tilde = dft_inverse(table, x);

    FourierState dt_state = dx;
    FourierState kx = apply_K(tm, x, /*shifted=*/true);
    axpy(law.beta(tau), kx, dt_state);
    std::vector<double> w = dft_inverse(table, dt_state); // = -(R/lam) eps_t

    double acc = 0.0;
    double dr = table.grid_R.dr;
    for (std::size_t jj = 1; jj < table.n_R(); ++jj) {
        double R = table.grid_R.nodes[jj];
        if (R > R_cone) break;
        double eps_t = -lam / R * w[jj];
        double de;
        if (jj + 1 < table.n_R())
            de = (eps_tilde[jj + 1] - eps_tilde[jj - 1]) / (2.0 * dr);
        else
            de = (eps_tilde[jj] - eps_tilde[jj - 1]) / dr;
        double eps_r = lam * (de / R - eps_tilde[jj] / (R * R));
        acc += 0.5 * (eps_t * eps_t + eps_r * eps_r) * R * R * table.grid_R.weights[jj];
    }
    return 4.0 * 3.14159265358979323846 * acc / (lam * lam * lam);
}

} // namespace renwave
