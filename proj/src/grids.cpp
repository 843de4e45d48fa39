#include "renwave/grids.hpp"

#include "renwave/util.hpp"

#include <cmath>
#include <stdexcept>

namespace renwave {

RadialGrid RadialGrid::uniform(double r_max, double dr)
{
    if (!(r_max > 0.0) || !(dr > 0.0)) throw std::invalid_argument("RadialGrid: bad extents");
    RadialGrid g;
    g.dr = dr;
    std::size_t n = static_cast<std::size_t>(std::llround(r_max / dr)) + 1;
    g.nodes.resize(n);
    for (std::size_t j = 0; j < n; ++j) g.nodes[j] = static_cast<double>(j) * dr;
    g.r_max = g.nodes.back();
    g.weights = trapezoid_weights(g.nodes);
    return g;
}

double RadialGrid::integrate(const std::vector<double>& f) const
{
    if (f.size() != nodes.size()) throw grid_mismatch("RadialGrid::integrate: size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += weights[j] * f[j];
    return s;
}

double RadialGrid::inner(const std::vector<double>& f, const std::vector<double>& g) const
{
    if (f.size() != nodes.size() || g.size() != nodes.size())
        throw grid_mismatch("RadialGrid::inner: size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += weights[j] * f[j] * g[j];
    return s;
}

double RadialGrid::norm(const std::vector<double>& f) const { return std::sqrt(inner(f, f)); }

FreqGrid FreqGrid::log_spaced(double xi_min, double xi_max, int n)
{
    if (!(xi_min > 0.0) || !(xi_max > xi_min) || n < 2) throw std::invalid_argument("FreqGrid: bad extents");
    FreqGrid g;
    g.xis.resize(n);
    double lmin = std::log(xi_min), lmax = std::log(xi_max);
    for (int i = 0; i < n; ++i)
        g.xis[i] = std::exp(lmin + (lmax - lmin) * static_cast<double>(i) / (n - 1));
    g.xis.front() = xi_min;
    g.xis.back() = xi_max;
    g.weights = trapezoid_weights(g.xis);
    return g;
}

double FreqGrid::log_step() const
{
    return std::log(xis.back() / xis.front()) / static_cast<double>(xis.size() - 1);
}

} // namespace renwave
