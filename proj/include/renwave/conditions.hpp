#pragma once

#include "renwave/propagator.hpp"
#include "renwave/scaling.hpp"
#include "renwave/spectral.hpp"

#include <vector>

namespace renwave {

// Exponent bookkeeping for the weighted norms; every "0+" is a delta0 offset.
struct NormConfig {
    double delta0 = 0.05;
    double tau0 = 10.0;
    double dyadic_base = 2.0;
    int dyadic_levels = 3;

    static NormConfig from_law(const ScalingLaw& law, int levels = 3)
    {
        return NormConfig{law.delta0, law.tau0, 2.0, levels};
    }
};

// Weights on the continuous coefficients, L^2_{dxi}:
//   S1t = <xi>^{1/2+2d} min{tau0 xi^{1/2}, 1}^{-1} xi^{1/2-d}
//   S2t = <xi>^{1/2+2d} xi^{-d}
//   S1  = <xi>^{1+2d} xi^{-d}
//   S2  = <xi>^{1/2+2d} xi^{-d}
//   S3  = min{xi^d, 1} <xi>^{1/2+d}
enum class NormKind { S1t, S2t, S1, S2, S3 };

double weighted_norm(const NormConfig& nc, NormKind kind, const FourierState& s);

// Pair norms: Stilde = S1t(x0) + S2t(x1), S = S1(x0) + S2(x1).
double pair_norm_tilde(const NormConfig& nc, const CauchyPair& p);
double pair_norm_strong(const NormConfig& nc, const CauchyPair& p);

// Oscillatory spectral integral int rho^{1/2}(xi) x(xi) xi^{power}
// trig(c sqrt(xi)) dxi, by per-cell Filon in k = sqrt(xi).
double oscillatory_xi_integral(const SpectralTable& table, const std::vector<double>& x, double power,
                               bool use_sin, double phase_coeff);

// Weight convention of the x0 functional: the proposition print carries
// xi^{-3/4}, its own proof (and the later stages) xi^{-1/4}.  Both are
// computable; the proof weight is the default everywhere.
enum class X0Weight { proof_quarter, printed_three_quarter };

struct VanishingValues {
    double v0; // cos functional of x0
    double v1; // sin functional of x1
};

VanishingValues vanishing_functionals(const SpectralTable& table, const NormConfig& nc, double nu,
                                      const CauchyPair& pair, X0Weight w = X0Weight::proof_quarter);

// Correction profile F(chi_{R <= C tau0} phi(R, 0)) on the continuous spectrum.
FourierState correction_profile(const SpectralTable& table, double tau0, double C_cut = 1.0);

struct CorrectionResult {
    CauchyPair corrected;
    double alpha; // multiple added to x1
    double beta;  // multiple added to x0
};

// Adds (beta, alpha) multiples of the correction profile to (x0, x1) so both
// functionals vanish; throws when the profile is degenerate against either.
CorrectionResult admissible_correction(const SpectralTable& table, const NormConfig& nc, double nu,
                                       const CauchyPair& pair, double C_cut = 1.0,
                                       X0Weight w = X0Weight::proof_quarter);

// (sum over dyadic blocks [N, 2N), N = tau0 2^l of
//  [sup_{tau in block} (tau/tau0)^w q(tau)]^2)^{1/2}, truncated at dyadic_levels.
double dyadic_diagnostic(const NormConfig& nc, const std::vector<double>& taus,
                         const std::vector<double>& q, double weight_exponent);

struct GrowthReport {
    std::vector<double> taus;
    std::vector<double> sup_eps1_over_R;
    std::vector<double> sup_eps2;
    std::vector<double> sup_total;
    std::vector<double> g_tilde;
    double fitted_exponent = 0.0;
};

// Free evolution of the pair, reconstruction of P_c eps, and the resonance
// split eps1 = phi(R, 0) g(tau), eps2 = P_c eps - eps1; the growth exponent is
// fitted on the last half of the window.
GrowthReport growth_split_measure(const ScalingLaw& law, const SpectralTable& table, const NormConfig& nc,
                                  const CauchyPair& pair, const std::vector<double>& taus);

} // namespace renwave
