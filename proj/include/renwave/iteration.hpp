#pragma once

#include "renwave/conditions.hpp"
#include "renwave/nonlinear.hpp"
#include "renwave/propagator.hpp"
#include "renwave/transference.hpp"

#include <array>

namespace renwave {

// Full state trajectory on a uniform fine grid [tau0, t_max]; continuous
// coefficients and discrete mode with their D_tau derivatives.
struct StateHistory {
    const SpectralTable* table = nullptr;
    double tau0 = 0.0;
    double dt = 0.0;
    std::vector<double> taus;
    std::vector<std::vector<double>> xc;
    std::vector<std::vector<double>> dxc;
    std::vector<double> xd;
    std::vector<double> dxd;

    std::size_t size() const { return taus.size(); }
    std::size_t index_at(double tau) const;
    FourierState state_at(std::size_t k) const;
    FourierState dstate_at(std::size_t k) const;
    void add(const StateHistory& other, double factor = 1.0);
};

struct IterationConfig {
    double t_max = 200.0;
    double dt = 0.05;
    int j_max = 3;
    std::vector<double> tau_samples; // measurement ladder inside the window
    RSourceOptions r_opts{};
    BulkProfile bulk = BulkProfile::zero_profile();
    double C_cut = 1.0;
    int nl_stride = 4;     // nonlinear tabulation stride on the fine grid
    double delta2 = 1.0;   // smallness gate on the data
};

// Zeroth iterate: free continuous flow plus the decaying discrete evolution,
// with x_{1d} tied to x_{0d} through the solved gamma_d.
StateHistory zeroth_iterate(const ScalingLaw& law, const SpectralTable& table, const CauchyPair& pair,
                            const IterationConfig& cfg);

struct IterateRecord {
    int j = 0;
    CauchyPair data_correction; // free-part data of the increment; satisfies (3.1)
    CauchyPair raw_shift;       // tau0-anchored backward integrals (d0, d1)
    CauchyPair slice0;          // the increment's data at tau0 (bookkeeping)
    double alpha = 0.0;         // profile multiple on x1
    double beta = 0.0;          // profile multiple on x0
    double xd0 = 0.0, xd1 = 0.0; // discrete data increments at tau0
    double tail_bound = 0.0;

    double ledger = 0.0;                       // Delta A_j
    std::array<double, 6> ledger_terms{};      // high sup, high dyadic, low sup, low dyadic, data, discrete
    double ledger_linear = 0.0;                // same ledger on the linear-source component
    double ledger_nonlinear = 0.0;             // and on the nonlinear-source component
};

struct IterationResult {
    std::vector<IterateRecord> records;
    bool converged = false;
    CauchyPair corrected_data; // pair plus all increment data
    StateHistory total;        // accumulated solution
};

// Runs increments j = 1..j_max of the scheme: source R(tau, Delta x^{(j-1)}) +
// Delta f^{(j-1)}, backward-in-tau integration with vanishing data at the
// horizon, data corrections keeping the vanishing conditions, discrete
// fixed point, and the Def-11.1 ledger.
IterationResult run_iteration(const ScalingLaw& law, const SpectralTable& table,
                              const TransferenceMatrices& tm, const CauchyPair& pair,
                              const IterationConfig& cfg);

// Physical field of a full spectral state (continuous plus discrete term).
std::vector<double> reconstruct_field(const SpectralTable& table, const FourierState& s);

// Transference of initial data between physical pairs (eps, eps_t) at t = t0
// and Fourier data (x0, x1) at tau = tau0; beta_scale = 0 decouples (hook).
struct PhysicalPair {
    std::vector<double> eps;
    std::vector<double> eps_t;
};

PhysicalPair data_map_to_physical(const ScalingLaw& law, const SpectralTable& table,
                                  const TransferenceMatrices& tm, const CauchyPair& fourier,
                                  double beta_scale = 1.0);
CauchyPair data_map_to_fourier(const ScalingLaw& law, const SpectralTable& table,
                               const TransferenceMatrices& tm, const PhysicalPair& physical,
                               double beta_scale = 1.0);

// E_loc(t) = 4 pi int_{r <= t} 1/2 (eps_t^2 + eps_r^2) r^2 dr from a full
// slice; the cone radius in R is nu tau.
double local_energy(const ScalingLaw& law, const SpectralTable& table, const TransferenceMatrices& tm,
                    double tau, const FourierState& x, const FourierState& dx);

} // namespace renwave
