#include "renwave/util.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cassert>
#include <cmath>

namespace renwave {

namespace {
int g_threads = 0;
}

int default_thread_count()
{
    if (g_threads > 0) return g_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_default_thread_count(int n) { g_threads = n; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads)
{
    if (threads <= 0) threads = default_thread_count();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(threads, n);
    std::atomic<std::size_t> next(0);
    std::atomic<bool> failed(false);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double xq)
{
    assert(x.size() == y.size() && x.size() >= 2);
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

double interp_loglin(const std::vector<double>& x, const std::vector<double>& y, double xq,
                     bool zero_extend_above, bool zero_extend_below)
{
    assert(x.size() == y.size() && x.size() >= 2);
    if (xq > x.back()) return zero_extend_above ? 0.0 : y.back();
    if (xq < x.front()) return zero_extend_below ? 0.0 : y.front();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i == 0) return y.front();
    if (i == x.size()) return y.back();
    double t = std::log(xq / x[i - 1]) / std::log(x[i] / x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

double interp_cubiclog(const std::vector<double>& x, const std::vector<double>& y, double xq,
                       bool zero_extend_above)
{
    assert(x.size() == y.size() && x.size() >= 4);
    if (xq > x.back()) return zero_extend_above ? 0.0 : y.back();
    if (xq <= x.front()) return y.front();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin()); // cell [i-1, i]
    std::size_t base = i >= 2 ? i - 2 : 0;
    if (base + 4 > x.size()) base = x.size() - 4;
    double u = std::log(xq);
    double u0 = std::log(x[base]), u1 = std::log(x[base + 1]);
    double u2 = std::log(x[base + 2]), u3 = std::log(x[base + 3]);
    double l0 = (u - u1) * (u - u2) * (u - u3) / ((u0 - u1) * (u0 - u2) * (u0 - u3));
    double l1 = (u - u0) * (u - u2) * (u - u3) / ((u1 - u0) * (u1 - u2) * (u1 - u3));
    double l2 = (u - u0) * (u - u1) * (u - u3) / ((u2 - u0) * (u2 - u1) * (u2 - u3));
    double l3 = (u - u0) * (u - u1) * (u - u2) / ((u3 - u0) * (u3 - u1) * (u3 - u2));
    return l0 * y[base] + l1 * y[base + 1] + l2 * y[base + 2] + l3 * y[base + 3];
}

namespace {

double simpson_val(double a, double fa, double b, double fb, double fm)
{
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adsimp(const std::function<double(double)>& f, double a, double fa, double b, double fb,
              double m, double fm, double whole, double tol, int depth)
{
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_val(a, fa, m, fm, flm);
    double right = simpson_val(m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adsimp(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
         + adsimp(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth)
{
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson_val(a, fa, b, fb, fm);
    return adsimp(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

const double GaussLegendre7::node[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585
};
const double GaussLegendre7::weight[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697
};

void filon_cell_coeffs(double p0, double p1, double d, double& c0, double& c1)
{
    double z = p1 * d;
    double I0, I1;
    if (std::abs(z) < 1e-4) {
        double s0 = std::sin(p0), cc = std::cos(p0);
        I0 = d * (s0 + 0.5 * z * cc - z * z / 6.0 * s0);
        I1 = d * d * (0.5 * s0 + z / 3.0 * cc - 0.125 * z * z * s0);
    } else {
        double cp0 = std::cos(p0), sp0 = std::sin(p0);
        double cp1 = std::cos(p0 + z), sp1 = std::sin(p0 + z);
        I0 = (cp0 - cp1) / p1;
        I1 = (sp1 - z * cp1 - sp0) / (p1 * p1);
    }
    c1 = I1 / d;
    c0 = I0 - c1;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x)
{
    std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    w[0] = 0.5 * (x[1] - x[0]);
    w[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (x[i + 1] - x[i - 1]);
    return w;
}

std::pair<double, double> linfit(const std::vector<double>& x, const std::vector<double>& y)
{
    assert(x.size() == y.size() && !x.empty());
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (det == 0.0) return {sy / n, 0.0};
    double b = (n * sxy - sx * sy) / det;
    double a = (sy - b * sx) / n;
    return {a, b};
}

std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree)
{
    assert(degree >= 0 && degree <= 6 && x.size() == y.size());
    int m = degree + 1;
    std::vector<double> A(m * m, 0.0), rhs(m, 0.0);
    std::vector<double> pw(2 * degree + 1, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        double p = 1.0;
        for (int j = 0; j <= 2 * degree; ++j) {
            pw[j] += p;
            p *= x[k];
        }
        p = 1.0;
        for (int j = 0; j < m; ++j) {
            rhs[j] += p * y[k];
            p *= x[k];
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A[i * m + j] = pw[i + j];
    // Gaussian elimination with partial pivoting
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int c = 0; c < m; ++c) {
        int best = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(A[r * m + c]) > std::abs(A[best * m + c])) best = r;
        if (best != c) {
            for (int j = 0; j < m; ++j) std::swap(A[c * m + j], A[best * m + j]);
            std::swap(rhs[c], rhs[best]);
        }
        double d = A[c * m + c];
        if (d == 0.0) throw std::runtime_error("polyfit: singular normal equations");
        for (int r = c + 1; r < m; ++r) {
            double f = A[r * m + c] / d;
            for (int j = c; j < m; ++j) A[r * m + j] -= f * A[c * m + j];
            rhs[r] -= f * rhs[c];
        }
    }
    std::vector<double> coef(m, 0.0);
    for (int r = m - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int j = r + 1; j < m; ++j) s -= A[r * m + j] * coef[j];
        coef[r] = s / A[r * m + r];
    }
    return coef;
}

double polyval(const std::vector<double>& c, double x)
{
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
    return s;
}

double polyder(const std::vector<double>& c, double x)
{
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) s = s * x + static_cast<double>(i) * c[i];
    return s;
}

} // namespace renwave
