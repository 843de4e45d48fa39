#pragma once

#include <vector>

namespace renwave {

// Half-line grid starting at R = 0 with trapezoid quadrature weights.
struct RadialGrid {
    double r_max = 0.0;
    double dr = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    static RadialGrid uniform(double r_max, double dr);
    std::size_t size() const { return nodes.size(); }

    // Integrals of decaying Dirichlet-class integrands; trapezoid is
    // effectively spectral for them (all boundary derivative terms vanish).
    double integrate(const std::vector<double>& f) const;
    double inner(const std::vector<double>& f, const std::vector<double>& g) const;
    double norm(const std::vector<double>& f) const;
};

// Log-spaced frequency grid with trapezoid weights in xi.
struct FreqGrid {
    std::vector<double> xis;
    std::vector<double> weights;

    static FreqGrid log_spaced(double xi_min, double xi_max, int n);
    std::size_t size() const { return xis.size(); }
    double log_step() const; // mean spacing of log(xi); the grid is uniform in it
};

} // namespace renwave
