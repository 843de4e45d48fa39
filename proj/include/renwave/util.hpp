#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace renwave {

// Thrown when a requested accuracy cannot be certified (quadrature tails,
// amplitude fits, horizon truncation).
struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when grids of two objects do not belong to the same table.
struct grid_mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sq(double x) { return x * x; }

// <xi> = (1 + xi^2)^{1/2}
inline double jbracket(double xi) { return std::sqrt(1.0 + xi * xi); }

// FNV-1a over raw bytes; used for config hashes and payload checksums.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL)
{
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::vector<double>& v, std::uint64_t seed = 0xcbf29ce484222325ULL)
{
    return v.empty() ? seed : fnv1a(v.data(), v.size() * sizeof(double), seed);
}

// Deterministic parallel loop: fixed chunking, each index writes its own slot.
// Never use for reductions; those stay serial so payloads are byte-stable.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

int default_thread_count();
void set_default_thread_count(int n);

// ---------------------------------------------------------------------------
// interpolation helpers

// Linear interpolation of y(x) with x strictly increasing; clamped at the ends.
double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double xq);

// Linear in log(x); zero outside [x.front(), x.back()] when zero_extend is set.
double interp_loglin(const std::vector<double>& x, const std::vector<double>& y, double xq,
                     bool zero_extend_above, bool zero_extend_below);

// 4-point Lagrange interpolation in log(x); zero above the grid when
// requested, clamped below.  Smooth enough for tau-differencing of evolved
// slices.
double interp_cubiclog(const std::vector<double>& x, const std::vector<double>& y, double xq,
                       bool zero_extend_above);

// ---------------------------------------------------------------------------
// quadrature

// Adaptive Simpson; test-grade oracle, not used on hot paths.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre7 {
    static const double node[7];
    static const double weight[7];
};

// Composite trapezoid weights for an arbitrary strictly increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& x);

// Filon cell: int_0^d (linear amplitude) sin(p0 + p1 u) du, expressed through
// the amplitude endpoints: I = A0 c0 + A1 c1.  Stable for small |p1 d|.
void filon_cell_coeffs(double p0, double p1, double d, double& c0, double& c1);

// ---------------------------------------------------------------------------
// small least squares

// Fit y = a + b*x; returns {a, b}.
std::pair<double, double> linfit(const std::vector<double>& x, const std::vector<double>& y);

// Fit y ~ sum c_k x^k, degree <= 6, normal equations with partial pivoting.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree);
double polyval(const std::vector<double>& c, double x);
double polyder(const std::vector<double>& c, double x);

} // namespace renwave
