#pragma once

#include "renwave/spectral.hpp"

#include <random>
#include <vector>

namespace renwave::testing {

// One modest table shared by the unit tests; built on first use.
inline const SpectralTable& small_table()
{
    static SpectralTable t = [] {
        TableConfig cfg;
        cfg.r_max = 80.0;
        cfg.dr = 0.05;
        cfg.xi_min = 1e-6;
        cfg.xi_max = 150.0;
        cfg.n_xi = 240;
        return build_table(cfg);
    }();
    return t;
}

// deeper-frequency table for growth/drainage experiments
inline const SpectralTable& growth_table()
{
    static SpectralTable t = [] {
        TableConfig cfg;
        cfg.r_max = 150.0;
        cfg.dr = 0.05;
        cfg.xi_min = 1e-9;
        cfg.xi_max = 100.0;
        cfg.n_xi = 320;
        return build_table(cfg);
    }();
    return t;
}

// smooth bump in log xi, compactly supported on [lo, hi]
inline FourierState log_bump(const SpectralTable& t, double lo, double hi, double amplitude = 1.0)
{
    FourierState s = FourierState::zero(t);
    double ulo = std::log(lo), uhi = std::log(hi);
    for (std::size_t i = 0; i < t.n_xi(); ++i) {
        double u = std::log(t.grid_xi.xis[i]);
        if (u <= ulo || u >= uhi) continue;
        double z = (u - ulo) / (uhi - ulo); // in (0,1)
        s.xc[i] = amplitude * std::exp(-1.0 / (z * (1.0 - z)) + 4.0);
    }
    return s;
}

inline FourierState random_band_state(const SpectralTable& t, std::mt19937& rng, double lo, double hi)
{
    FourierState s = FourierState::zero(t);
    std::normal_distribution<double> n(0.0, 1.0);
    // random smooth combination of three bumps inside [lo, hi]
    double w1 = n(rng), w2 = n(rng), w3 = n(rng);
    double lmid = std::sqrt(lo * hi);
    FourierState b1 = log_bump(t, lo, lmid), b2 = log_bump(t, lmid, hi), b3 = log_bump(t, lo, hi);
    for (std::size_t i = 0; i < t.n_xi(); ++i) s.xc[i] = w1 * b1.xc[i] + w2 * b2.xc[i] + w3 * b3.xc[i];
    return s;
}

} // namespace renwave::testing
