#pragma once

#include "renwave/scaling.hpp"
#include "renwave/spectral.hpp"

#include <Eigen/Dense>

namespace renwave {

// d(log rho)/d(log xi) by a moving-window cubic fit; rho is symbol-like near
// both ends, so the log-log derivative is the stable object.
std::vector<double> dlog_rho_dlog_xi(const FreqGrid& grid, const std::vector<double>& rho);

// A_c = -2 xi d/dxi - (5/2 + rho' xi / rho), discretized on the log grid with
// 4th-order central differences, one-sided at the ends.
Eigen::MatrixXd build_Ac(const FreqGrid& grid, const std::vector<double>& rho);

// The transference operator pieces: K := F (R d/dR) F^{-1} - A with A_dd = 0,
// realized as dense matrices on the coefficient vectors of the table grids.
struct TransferenceMatrices {
    const SpectralTable* table = nullptr;
    Eigen::MatrixXd Ac;
    Eigen::MatrixXd Kcc;
    Eigen::VectorXd Kcd;     // K_d(xi)
    Eigen::RowVectorXd Kdc;  // f -> <phi_d, R d_R F^{-1}(0, f)>
    double Kdd = 0.0;
    Eigen::MatrixXd commAK;  // [A_c, K_cc]
    std::vector<double> dlogrho;

    std::size_t n() const { return static_cast<std::size_t>(Kcc.rows()); }
};

TransferenceMatrices build_transference(const SpectralTable& table);

// Full 2x2-block application of K (or K - 1 when shifted).
FourierState apply_K(const TransferenceMatrices& tm, const FourierState& s, bool shifted = false);

// Linear source R(tau, x) = c1 beta K dx - beta^2 (K^2 + [A,K] + K + beta'/beta^2 K) x.
// The printed equation carries c1 = -4 on the K dx term; `exact_transform`
// replaces K by K - 1 and c1 by -2, which is the combination produced by
// transforming the physical-space equation (used by the oracle comparison).
struct RSourceOptions {
    double ddx_coeff = -4.0;
    bool exact_transform = false;
    double beta_scale = 1.0; // test hook: 0 switches the source off
};

FourierState apply_R_source(const ScalingLaw& law, const TransferenceMatrices& tm, double tau,
                            const FourierState& x, const FourierState& dx,
                            const RSourceOptions& opt = {});

// Kernel splittings: Kd keeps |xi/eta - 1| < 1/n, Knd the complement;
// K1/K2/K3 restrict Kd by output frequency below eps / inside / above 1/eps.
struct KernelBandSplit {
    Eigen::MatrixXd Kd, Knd, K1, K2, K3;
};

KernelBandSplit kernel_band_split(const TransferenceMatrices& tm, int n, double eps);

} // namespace renwave
