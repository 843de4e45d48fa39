#include "renwave/transference.hpp"

#include "renwave/util.hpp"

#include <cmath>

namespace renwave {

std::vector<double> dlog_rho_dlog_xi(const FreqGrid& grid, const std::vector<double>& rho)
{
    std::size_t n = grid.size();
    if (rho.size() != n) throw grid_mismatch("dlog_rho_dlog_xi: size mismatch");
    std::vector<double> u(n), lr(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::log(grid.xis[i]);
        lr[i] = std::log(rho[i]);
    }
    const int W = 6;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i >= W ? i - W : 0;
        std::size_t hi = std::min(n - 1, i + W);
        if (hi - lo < 3) {
            out[i] = (lr[std::min(i + 1, n - 1)] - lr[i > 0 ? i - 1 : 0])
                   / (u[std::min(i + 1, n - 1)] - u[i > 0 ? i - 1 : 0]);
            continue;
        }
        std::vector<double> xs(hi - lo + 1), ys(hi - lo + 1);
        for (std::size_t k = lo; k <= hi; ++k) {
            xs[k - lo] = u[k] - u[i];
            ys[k - lo] = lr[k];
        }
        auto c = polyfit(xs, ys, 3);
        out[i] = c[1];
    }
    return out;
}

namespace {

// 4th-order first derivative on the uniform log grid, one-sided at the ends
Eigen::MatrixXd d_du_matrix(std::size_t n, double du)
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    auto row5 = [&](std::size_t r, std::size_t base, const double (&c)[5]) {
        for (int k = 0; k < 5; ++k) D(r, base + k) = c[k] / (12.0 * du);
    };
    const double fwd[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    const double fwd1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
    const double cen[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
    const double bwd1[5] = {-1.0, 6.0, -18.0, 10.0, 3.0};
    const double bwd[5] = {3.0, -16.0, 36.0, -48.0, 25.0};
    row5(0, 0, fwd);
    row5(1, 0, fwd1);
    for (std::size_t r = 2; r + 2 < n; ++r) row5(r, r - 2, cen);
    row5(n - 2, n - 5, bwd1);
    row5(n - 1, n - 5, bwd);
    return D;
}

} // namespace

Eigen::MatrixXd build_Ac(const FreqGrid& grid, const std::vector<double>& rho)
{
    std::size_t n = grid.size();
    Eigen::MatrixXd Ac = -2.0 * d_du_matrix(n, grid.log_step());
    auto s = dlog_rho_dlog_xi(grid, rho);
    for (std::size_t i = 0; i < n; ++i) Ac(i, i) -= 2.5 + s[i];
    return Ac;
}

TransferenceMatrices build_transference(const SpectralTable& table)
{
    std::size_t nR = table.n_R(), nxi = table.n_xi();
    TransferenceMatrices tm;
    tm.table = &table;
    tm.dlogrho = dlog_rho_dlog_xi(table.grid_xi, table.rho);
    tm.Ac = build_Ac(table.grid_xi, table.rho);

    // R d/dR in physical space: 4th-order differences times R
    Eigen::MatrixXd Fc(nxi, nR);
    Eigen::RowVectorXd Fd(nR);
    for (std::size_t j = 0; j < nR; ++j) {
        Fd(j) = table.grid_R.weights[j] * table.phi_d[j];
        for (std::size_t i = 0; i < nxi; ++i) Fc(i, j) = table.grid_R.weights[j] * table.phi[i][j];
    }

    auto apply_RdR = [&](const Eigen::VectorXd& f) {
        Eigen::VectorXd g(nR);
        double h12 = 12.0 * table.grid_R.dr;
        for (std::size_t j = 0; j < nR; ++j) {
            double d;
            if (j >= 2 && j + 2 < nR)
                d = (f(j - 2) - 8.0 * f(j - 1) + 8.0 * f(j + 1) - f(j + 2)) / h12;
            else if (j < 2)
                d = (-25.0 * f(j) + 48.0 * f(j + 1) - 36.0 * f(j + 2) + 16.0 * f(j + 3) - 3.0 * f(j + 4)) / h12;
            else
                d = (25.0 * f(j) - 48.0 * f(j - 1) + 36.0 * f(j - 2) - 16.0 * f(j - 3) + 3.0 * f(j - 4)) / h12;
            g(j) = table.grid_R.nodes[j] * d;
        }
        return g;
    };

    // columns of R d_R applied to the inverse-transform matrix and to phi_d
    Eigen::MatrixXd DInv(nR, nxi);
    parallel_for(nxi, [&](std::size_t i) {
        Eigen::VectorXd col(nR);
        for (std::size_t j = 0; j < nR; ++j) col(j) = table.invmat[j * nxi + i];
        DInv.col(i) = apply_RdR(col);
    });
    Eigen::VectorXd phid(nR);
    for (std::size_t j = 0; j < nR; ++j) phid(j) = table.phi_d[j];
    Eigen::VectorXd Dphid = apply_RdR(phid);

    tm.Kdd = Fd * Dphid;
    tm.Kcd = Fc * Dphid;
    tm.Kdc = Fd * DInv;
    tm.Kcc = Fc * DInv - tm.Ac;
    tm.commAK = tm.Ac * tm.Kcc - tm.Kcc * tm.Ac;
    return tm;
}

FourierState apply_K(const TransferenceMatrices& tm, const FourierState& s, bool shifted)
{
    if (s.table != tm.table) throw grid_mismatch("apply_K: state from another table");
    std::size_t n = tm.n();
    FourierState out = FourierState::zero(*tm.table);
    Eigen::Map<const Eigen::VectorXd> xc(s.xc.data(), n);
    Eigen::VectorXd oc = tm.Kcc * xc + tm.Kcd * s.xd;
    out.xd = tm.Kdd * s.xd + tm.Kdc * xc;
    if (shifted) {
        oc -= xc;
        out.xd -= s.xd;
    }
    for (std::size_t i = 0; i < n; ++i) out.xc[i] = oc(i);
    return out;
}

namespace {

// [A, K] on a full state; A = diag(0, A_c), so the blocks are
// dd: 0, cd: A_c K_cd, dc: -K_dc A_c, cc: [A_c, K_cc].  Unchanged when K is
// shifted by the identity.
FourierState apply_commAK(const TransferenceMatrices& tm, const FourierState& s)
{
    std::size_t n = tm.n();
    FourierState out = FourierState::zero(*tm.table);
    Eigen::Map<const Eigen::VectorXd> xc(s.xc.data(), n);
    Eigen::VectorXd oc = tm.commAK * xc + (tm.Ac * tm.Kcd) * s.xd;
    out.xd = -static_cast<double>(tm.Kdc * (tm.Ac * xc).eval());
    for (std::size_t i = 0; i < n; ++i) out.xc[i] = oc(i);
    return out;
}

} // namespace

FourierState apply_R_source(const ScalingLaw& law, const TransferenceMatrices& tm, double tau,
                            const FourierState& x, const FourierState& dx, const RSourceOptions& opt)
{
    if (x.table != tm.table || dx.table != tm.table) throw grid_mismatch("apply_R_source: table mismatch");
    double beta = law.beta(tau) * opt.beta_scale;
    double c1 = opt.exact_transform ? -2.0 : opt.ddx_coeff;
    bool sh = opt.exact_transform;

    FourierState out = FourierState::zero(*tm.table);
    FourierState Kdx = apply_K(tm, dx, sh);
    axpy(c1 * beta, Kdx, out);

    FourierState Kx = apply_K(tm, x, sh);
    FourierState KKx = apply_K(tm, Kx, sh);
    FourierState comm = apply_commAK(tm, x);
    double b2 = beta * beta;
    double bpb = law.beta_prime_over_beta_sq();
    axpy(-b2, KKx, out);
    axpy(-b2, comm, out);
    axpy(-b2 * (1.0 + bpb), Kx, out);
    return out;
}

KernelBandSplit kernel_band_split(const TransferenceMatrices& tm, int n, double eps)
{
    if (n < 2 || !(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("kernel_band_split: need n >= 2, eps in (0,1)");
    const auto& xis = tm.table->grid_xi.xis;
    std::size_t m = tm.n();
    KernelBandSplit out;
    out.Kd = Eigen::MatrixXd::Zero(m, m);
    out.Knd = Eigen::MatrixXd::Zero(m, m);
    out.K1 = Eigen::MatrixXd::Zero(m, m);
    out.K2 = Eigen::MatrixXd::Zero(m, m);
    out.K3 = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        bool low = xis[i] < eps, high = xis[i] > 1.0 / eps;
        for (std::size_t j = 0; j < m; ++j) {
            double v = tm.Kcc(i, j);
            if (std::abs(xis[i] / xis[j] - 1.0) < 1.0 / n) {
                out.Kd(i, j) = v;
                (low ? out.K1 : high ? out.K3 : out.K2)(i, j) = v;
            } else {
                out.Knd(i, j) = v;
            }
        }
    }
    return out;
}

} // namespace renwave
