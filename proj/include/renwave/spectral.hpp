#pragma once

#include "renwave/grids.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace renwave {

// Ground state W_lambda(R) = lambda^{1/2} (1 + lambda^2 R^2 / 3)^{-1/2}.
double ground_state_eval(double R, double lambda = 1.0);

// Attractive well 5 W^4(R) of the linearized operator L = -d^2/dR^2 - 5W^4.
double potential_w4(double R);

// Zero resonance phi(R, 0), normalized by phi'(0) = 1.  Closed form
// R (1 - R^2/3) (1 + R^2/3)^{-3/2}; bounded, phi -> -sqrt(3) as R -> infinity.
double zero_resonance_eval(double R);
std::vector<double> zero_resonance(const RadialGrid& grid);

// Weyl-Titchmarsh density from the fitted asymptotic amplitude c(xi) of the
// regular solution: rho = 1 / (pi c^2 sqrt(xi)).
double spectral_measure(double amplitude, double xi);

struct EigenSolveResult {
    std::vector<double> values; // regular solution on the grid nodes
    std::vector<double> derivs; // d(phi)/dR on the grid nodes
    double amp = 0.0;           // asymptotic amplitude c(xi)
    double phase = 0.0;         // asymptotic phase theta(xi)
    double fit_residual = 0.0;  // relative misfit of the amplitude extraction
    double ode_residual = 0.0;  // step-halving solver accuracy, relative
};

// Regular solution of -phi'' - 5W^4 phi = xi phi, phi(0) = 0, phi'(0) = 1,
// integrated by piecewise-uniform Numerov with oscillation-resolving steps.
// For xi below the last-wavelengths-fit threshold the integration continues
// past r_max until the potential tail is negligible against xi and the
// amplitude is read off the conserved envelope there.
EigenSolveResult eigenfunction_solve(const RadialGrid& grid, double xi, bool free_potential = false);

struct DiscreteMode {
    double xi_d = 0.0;           // unique negative eigenvalue
    std::vector<double> phi_d;   // L2-normalized, positive, Dirichlet at 0
    double crosscheck = 0.0;     // dense tridiagonal eigenvalue (Richardson)
    double decay_rate = 0.0;     // fitted log-slope, expect -sqrt(|xi_d|)
    double residual = 0.0;       // grid residual of (L - xi_d) phi_d
};

// Shooting + bisection on the Dirichlet regular solution, cross-checked by a
// Sturm-sequence bisection eigensolver on the finite-difference matrix.
DiscreteMode discrete_mode_solve(const RadialGrid& grid, double tol = 1e-10);

struct TableConfig {
    double r_max = 200.0;
    double dr = 0.05;
    double xi_min = 1e-9;
    double xi_max = 400.0;
    int n_xi = 400;
    double discrete_tol = 1e-10;

    bool operator==(const TableConfig&) const = default;
};

struct SpectralTable {
    TableConfig config;
    RadialGrid grid_R;
    FreqGrid grid_xi;

    double xi_d = 0.0;
    std::vector<double> phi_d;
    std::vector<std::vector<double>> phi; // phi[i][j] = phi(R_j, xi_i)
    std::vector<double> rho;
    std::vector<double> amp;
    std::vector<double> phase;            // unwrapped asymptotic phase theta(xi)
    std::vector<double> phi0;

    // Pruefer data of phi: phi = env * sin(pph) with the local wavenumber
    // kappa = sqrt(xi + 5W^4); exact per node, drives the oscillation-aware
    // inverse transform.
    std::vector<std::vector<double>> env;
    std::vector<std::vector<double>> pph; // principal value in (-pi, pi]

    // dense inverse-transform matrix (row-major nR x nxi), assembled from the
    // Filon cells at build time
    std::vector<double> invmat;
    std::vector<double> logrho; // cache for smooth off-grid evaluation

    // diagnostics recorded at build time
    double sup_phi_over_R = 0.0;
    double max_fit_residual = 0.0;
    double max_ode_residual = 0.0;
    double xi_d_crosscheck = 0.0;
    double phi_d_decay_rate = 0.0;

    std::size_t n_xi() const { return grid_xi.size(); }
    std::size_t n_R() const { return grid_R.size(); }

    // rho evaluated off-grid: log-log interpolation inside the table,
    // power-law continuation rho ~ xi^{-1/2} below and ~ xi^{1/2} above.
    double rho_at(double xi) const;
    double sqrt_rho_ratio(double xi_num, double xi_den) const;
};

SpectralTable build_table(const TableConfig& config);

// ---------------------------------------------------------------------------
// distorted Fourier transform pair

struct FourierState {
    const SpectralTable* table = nullptr;
    double xd = 0.0;
    std::vector<double> xc;

    static FourierState zero(const SpectralTable& t);
    bool same_grid(const FourierState& o) const { return table == o.table; }
};

FourierState dft_forward(const SpectralTable& table, const std::vector<double>& f);
std::vector<double> dft_inverse(const SpectralTable& table, const FourierState& s);
// Oscillation-aware quadrature of int x(xi) phi(R, xi) rho(xi) dxi as a dense
// matrix acting on the coefficient vector (row-major nR x nxi).
std::vector<double> dft_inverse_matrix(const SpectralTable& table);
// Continuous part only: int x(xi) phi(R, xi) rho(xi) dxi.
std::vector<double> dft_inverse_continuous(const SpectralTable& table, const FourierState& s);

void axpy(double a, const FourierState& x, FourierState& y); // y += a x
double l2_rho_norm(const SpectralTable& table, const FourierState& s); // (xd^2 + int x^2 rho)^{1/2}

} // namespace renwave
