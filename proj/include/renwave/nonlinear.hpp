#pragma once

#include "renwave/propagator.hpp"
#include "renwave/scaling.hpp"
#include "renwave/spectral.hpp"

#include <functional>

namespace renwave {

// Bulk correction u_nu - u_0 above the rescaled ground state.  The true
// construction is replaced by a model with the right amplitude law
// lambda^{1/2} (lambda t)^{-2} g(R, a), a = r/t = R/(nu tau) clamped to [0,1).
struct BulkProfile {
    enum class Mode { zero, model };
    Mode mode = Mode::zero;
    std::function<double(double R, double a)> g = nullptr;

    static BulkProfile zero_profile() { return BulkProfile{}; }
    static BulkProfile model_profile()
    {
        BulkProfile b;
        b.mode = Mode::model;
        b.g = [](double R, double /*a*/) { return R / (1.0 + R * R); };
        return b;
    }
};

// u_nu - u_0 sampled on the R-grid at renormalized time tau.
std::vector<double> bulk_difference(const ScalingLaw& law, const SpectralTable& table,
                                    const BulkProfile& bulk, double tau);

// lambda^{-2} [5 (u_nu^4 - u_0^4) eps + R (u_nu + eps/R)^5 - R u_nu^5 - 5 u_nu^4 eps],
// assembled in the cancellation-free binomial form.
std::vector<double> rn_physical(const ScalingLaw& law, const SpectralTable& table, const BulkProfile& bulk,
                                double tau, const std::vector<double>& eps_tilde);

// Fourier image of the nonlinear source of the state's reconstruction.
FourierState rn_fourier(const ScalingLaw& law, const SpectralTable& table, const BulkProfile& bulk,
                        double tau, const FourierState& state);

// Resonance coefficient g(tau) of the free evolution of the pair: the two
// explicit lambda(tau0)-anchored spectral integrals.
double resonance_coefficient(const ScalingLaw& law, const SpectralTable& table, const CauchyPair& pair,
                             double tau);

struct SourceSplit {
    std::vector<double> E1;
    std::vector<double> E2;
    double g_tilde = 0.0;
};

// E2 = tau^{-2} g(tau) <R>^{-3} g(R, a) from the bulk interaction with the
// resonance multiple; E1 is the exact remainder so E1 + E2 reassembles the
// source identically.  bulk = zero gives E2 = 0.
SourceSplit source_split(const ScalingLaw& law, const SpectralTable& table, const BulkProfile& bulk,
                         double tau, const CauchyPair& pair, const FourierState& state);

// grid-H^1 + L^1 proxy over R <= cutoff (first differences for the derivative)
double h1l1_proxy(const SpectralTable& table, const std::vector<double>& field, double cutoff);

} // namespace renwave
