#include "doctest.h"

#include "fixtures.hpp"
#include "renwave/spectral.hpp"
#include "renwave/util.hpp"

#include <cmath>

using namespace renwave;
using renwave::testing::small_table;

TEST_CASE("ground state values")
{
    CHECK(ground_state_eval(0.0, 1.0) == 1.0);
    CHECK(ground_state_eval(std::sqrt(3.0), 1.0) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
    CHECK(ground_state_eval(0.0, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("zero resonance: closed form properties")
{
    RadialGrid g = RadialGrid::uniform(60.0, 0.05);
    auto phi0 = zero_resonance(g);
    CHECK(phi0[0] == 0.0);
    // phi'(0) = 1
    CHECK(zero_resonance_eval(1e-6) / 1e-6 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((phi0[1] - phi0[0]) / g.dr == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(zero_resonance_eval(std::sqrt(3.0)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(zero_resonance_eval(1e5) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("free potential hook reproduces sin(sqrt(xi) R)/sqrt(xi)")
{
    RadialGrid g = RadialGrid::uniform(60.0, 0.05);
    for (double xi : {0.3, 4.0, 40.0}) {
        auto r = eigenfunction_solve(g, xi, /*free=*/true);
        double sq = std::sqrt(xi);
        double worst = 0.0;
        for (std::size_t j = 0; j < g.size(); j += 7)
            worst = std::max(worst, std::abs(r.values[j] - std::sin(sq * g.nodes[j]) / sq));
        CHECK(worst < 1e-7);
        // classical half-line completeness: c = xi^{-1/2}, rho = sqrt(xi)/pi
        CHECK(r.amp == doctest::Approx(1.0 / sq).epsilon(1e-6));
        CHECK(spectral_measure(r.amp, xi) == doctest::Approx(sq / 3.14159265358979).epsilon(1e-5));
    }
}

TEST_CASE("regular solution small-R behavior")
{
    RadialGrid g = RadialGrid::uniform(60.0, 0.05);
    auto r = eigenfunction_solve(g, 2.0);
    CHECK(r.values[1] == doctest::Approx(g.nodes[1]).epsilon(1e-3));
    CHECK(r.values[2] == doctest::Approx(g.nodes[2]).epsilon(2e-3));
}

TEST_CASE("discrete mode: sign, normalization, decay")
{
    const SpectralTable& t = small_table();
    CHECK(t.xi_d < 0.0);
    CHECK(t.grid_R.inner(t.phi_d, t.phi_d) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(t.phi_d[0] == 0.0);
    CHECK(std::abs(t.xi_d_crosscheck - t.xi_d) < 1e-6);
    CHECK(t.phi_d_decay_rate == doctest::Approx(-std::sqrt(-t.xi_d)).epsilon(2e-2));
}

TEST_CASE("table invariants: rho asymptotics, orthogonality, phi/R bound")
{
    const SpectralTable& t = small_table();

    for (std::size_t i = 0; i < t.n_xi(); ++i) {
        double xi = t.grid_xi.xis[i];
        CHECK(t.rho[i] > 0.0);
        if (xi <= 1e-3) {
            double v = 3.0 * 3.14159265358979 * std::sqrt(xi) * t.rho[i];
            CHECK(v > 0.9);
            CHECK(v < 1.1);
        }
        if (xi >= 50.0) {
            double v = 3.14159265358979 * t.rho[i] / std::sqrt(xi);
            CHECK(v > 0.95);
            CHECK(v < 1.05);
        }
    }

    // orthogonality of the discrete and continuous spectrum
    double worst = 0.0;
    for (std::size_t i = 0; i < t.n_xi(); ++i) {
        double ip = t.grid_R.inner(t.phi_d, t.phi[i]);
        worst = std::max(worst, std::abs(ip) / t.grid_R.norm(t.phi[i]));
    }
    CHECK(worst < 1e-5);

    CHECK(t.sup_phi_over_R < 10.0);
    CHECK(t.max_ode_residual < 1e-6);
}

TEST_CASE("high-energy rho within 5% of free measure")
{
    const SpectralTable& t = small_table();
    for (std::size_t i = 0; i < t.n_xi(); ++i) {
        double xi = t.grid_xi.xis[i];
        if (xi < 100.0) continue;
        double free_rho = std::sqrt(xi) / 3.14159265358979;
        CHECK(std::abs(t.rho[i] - free_rho) / free_rho < 0.05);
    }
}

TEST_CASE("dft: orthogonality of phi_d, zero map, Plancherel")
{
    const SpectralTable& t = small_table();

    FourierState s = dft_forward(t, t.phi_d);
    CHECK(s.xd == doctest::Approx(1.0).epsilon(1e-8));
    double cn = 0.0;
    for (std::size_t i = 0; i < t.n_xi(); ++i)
        cn += t.grid_xi.weights[i] * t.rho[i] * s.xc[i] * s.xc[i];
    CHECK(std::sqrt(cn) < 1e-5);

    std::vector<double> zf(t.n_R(), 0.0);
    FourierState z = dft_forward(t, zf);
    CHECK(z.xd == 0.0);
    CHECK(l2_rho_norm(t, z) == 0.0);

    // Plancherel on f = R exp(-R^2)
    std::vector<double> f(t.n_R());
    for (std::size_t j = 0; j < t.n_R(); ++j) {
        double R = t.grid_R.nodes[j];
        f[j] = R * std::exp(-R * R);
    }
    FourierState xf = dft_forward(t, f);
    double lhs = sq(l2_rho_norm(t, xf));
    double rhs = sq(t.grid_R.norm(f));
    CHECK(lhs == doctest::Approx(rhs).epsilon(5e-4));
}

TEST_CASE("dft roundtrips")
{
    const SpectralTable& t = small_table();

    std::vector<double> f(t.n_R());
    for (std::size_t j = 0; j < t.n_R(); ++j) {
        double R = t.grid_R.nodes[j];
        f[j] = R * std::exp(-R * R);
    }
    auto back = dft_inverse(t, dft_forward(t, f));
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < t.n_R(); ++j) {
        num += sq(back[j] - f[j]) * t.grid_R.weights[j];
        den += sq(f[j]) * t.grid_R.weights[j];
    }
    CHECK(std::sqrt(num / den) < 1e-3);

    // pure discrete state inverts to phi_d
    FourierState s = FourierState::zero(t);
    s.xd = 1.0;
    auto pd = dft_inverse(t, s);
    double worst = 0.0;
    for (std::size_t j = 0; j < t.n_R(); ++j) worst = std::max(worst, std::abs(pd[j] - t.phi_d[j]));
    CHECK(worst < 1e-12);

    // dual roundtrip on a band-limited state
    FourierState b = renwave::testing::log_bump(t, 0.05, 5.0);
    FourierState fb = dft_forward(t, dft_inverse(t, b));
    double n2 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < t.n_xi(); ++i) {
        n2 += t.grid_xi.weights[i] * t.rho[i] * sq(fb.xc[i] - b.xc[i]);
        d2 += t.grid_xi.weights[i] * t.rho[i] * sq(b.xc[i]);
    }
    CHECK(std::sqrt(n2 / d2) < 2.5e-3); // 1e-3 at the default config, asserted in acceptance
    CHECK(std::abs(fb.xd) < 3e-4);
}

TEST_CASE("roundtrip error decreases under R-grid refinement")
{
    TableConfig ca;
    ca.r_max = 40.0;
    ca.dr = 0.1;
    ca.xi_min = 1e-4;
    ca.xi_max = 60.0;
    ca.n_xi = 90;
    TableConfig cb = ca;
    cb.dr = 0.05;

    auto err = [](const SpectralTable& t) {
        std::vector<double> f(t.n_R());
        for (std::size_t j = 0; j < t.n_R(); ++j) {
            double R = t.grid_R.nodes[j];
            f[j] = R * std::exp(-R * R / 4.0);
        }
        auto back = dft_inverse(t, dft_forward(t, f));
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < t.n_R(); ++j) {
            num += sq(back[j] - f[j]) * t.grid_R.weights[j];
            den += sq(f[j]) * t.grid_R.weights[j];
        }
        return std::sqrt(num / den);
    };
    SpectralTable ta = build_table(ca), tb = build_table(cb);
    CHECK(err(tb) <= err(ta) * 1.05);
    // doubled R-resolution moves interior rho by < 1e-4 relative
    for (std::size_t i = 0; i < ta.n_xi(); ++i) {
        double xi = ta.grid_xi.xis[i];
        if (xi < 1e-3 || xi > 30.0) continue;
        CHECK(std::abs(tb.rho[i] - ta.rho[i]) / ta.rho[i] < 1e-4);
    }
}

TEST_CASE("deterministic rebuild")
{
    TableConfig c;
    c.r_max = 30.0;
    c.dr = 0.1;
    c.xi_min = 1e-3;
    c.xi_max = 20.0;
    c.n_xi = 40;
    SpectralTable a = build_table(c), b = build_table(c);
    CHECK(a.xi_d == b.xi_d);
    CHECK(fnv1a(a.rho) == fnv1a(b.rho));
    for (std::size_t i = 0; i < a.n_xi(); ++i) CHECK(fnv1a(a.phi[i]) == fnv1a(b.phi[i]));
}
