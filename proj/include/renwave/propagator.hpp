#pragma once

#include "renwave/scaling.hpp"
#include "renwave/spectral.hpp"

#include <functional>

namespace renwave {

// Cauchy data (x, D_tau x) at tau0 for the transport equation, both spectral
// components inside the FourierStates.
struct CauchyPair {
    FourierState x0;
    FourierState x1;
};

struct EvolvedSlice {
    FourierState x;
    FourierState dx; // D_tau x, analytic from the same formula
};

// Homogeneous propagator S(tau) of the decoupled transport equation for the
// continuous spectral part: cos/sin parametrix with rescaled arguments read
// off the data by interpolation in log xi, zero-extended above the grid.
EvolvedSlice free_evolve(const ScalingLaw& law, const SpectralTable& table, const CauchyPair& pair,
                         double tau);

// Same propagator with analytic data profiles; bypasses the grid
// interpolation of the rescaled argument (used by residual oracles).
EvolvedSlice free_evolve_fn(const ScalingLaw& law, const SpectralTable& table,
                            const std::function<double(double)>& x0, const std::function<double(double)>& x1,
                            double tau);

// A time-indexed source on the continuous spectrum.  eval(sigma, xi) must be
// defined for sigma in the integration window and any xi > 0 (zero outside
// the table frequency range).
using FreqSource = std::function<double(double sigma, double xi)>;

// Tabulated slices with linear interpolation in sigma and log-linear,
// zero-extended interpolation in xi.
struct GriddedSource {
    const SpectralTable* table = nullptr;
    std::vector<double> taus;                // strictly increasing
    std::vector<std::vector<double>> slices; // slices[k] on grid_xi

    double operator()(double sigma, double xi) const;
};

struct DuhamelOptions {
    double panel_phase = 0.78539816339744831; // max phase advance per panel (pi/4)
    double panel_frac = 0.25;                 // max panel width as fraction of sigma
    double tail_tol = 0.05;                   // relative tail bound accepted by backward
    bool with_derivative = true;
};

struct DuhamelResult {
    FourierState x;
    FourierState dx;
    double tail_bound = 0.0; // backward only: truncation estimate, absolute
};

// Retarded solution with trivial data at tau0:
//   x(tau) = int_{tau0}^{tau} (lam(tau)/lam(sig))^{3/2} sqrt(rho(q)/rho(xi))
//            sin[lam(tau) sqrt(xi) int_sig^tau 1/lam] / sqrt(xi) f(sig, q) dsig,
// q = (lam(tau)/lam(sig))^2 xi.  Gauss-Legendre 7 per oscillation-sized panel.
DuhamelResult duhamel_forward(const ScalingLaw& law, const SpectralTable& table, const FreqSource& f,
                              double tau, const DuhamelOptions& opt = {});

// Vanishing data at infinity, truncated at t_max; the integral runs over
// [tau, t_max] with the same kernel.  Throws accuracy_error when the recorded
// tail estimate exceeds tail_tol * |result|.
DuhamelResult duhamel_backward(const ScalingLaw& law, const SpectralTable& table, const FreqSource& f,
                               double tau, double t_max, const DuhamelOptions& opt = {});

// Discrete-mode Green's function H_d(tau, sigma) = -1/2 |xi_d|^{-1/2}
// exp(-|xi_d|^{1/2} |tau - sigma|), applied to linearly interpolated samples
// by exact piecewise-exponential quadrature.
double discrete_green_apply(double xi_d, const std::vector<double>& sigmas,
                            const std::vector<double>& f_d, double tau);

struct DiscreteModeFit {
    double c_d = 0.0;
    double gamma_d = 0.0;
};

struct DiscreteFreeResult {
    std::vector<double> taus;
    std::vector<double> x_d;
    DiscreteModeFit fit;
    double x1d = 0.0; // gamma_d x_{0d}, the co-dimension one compatibility value
};

// H_d * g on a uniform grid (spacing dt) by two recursive exponential scans.
std::vector<double> exp_green_apply(double xi_d, double dt, const std::vector<double>& g);

// Decaying discrete-mode evolution: fixed point of the implicit relation with
// an exponential free term matched to x_{0d} at tau0.  Contraction requires
// tau0 |xi_d|^{1/2} >> 1.  beta_scale = 0 is the decoupled test hook.
DiscreteFreeResult discrete_free_evolve(const ScalingLaw& law, double xi_d, double x0d, double tau0,
                                        double t_max, double dt = 0.05, double beta_scale = 1.0);

} // namespace renwave
