#include "doctest.h"

#include "fixtures.hpp"
#include "renwave/conditions.hpp"
#include "renwave/nonlinear.hpp"
#include "renwave/util.hpp"

#include <cmath>
#include <random>

using namespace renwave;
using renwave::testing::growth_table;
using renwave::testing::small_table;

namespace {

std::vector<double> test_eps(const RadialGrid& g, double amp)
{
    std::vector<double> f(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        double R = g.nodes[j];
        f[j] = amp * R * std::exp(-R * R / 9.0);
    }
    return f;
}

} // namespace

TEST_CASE("rn_physical: zero input, binomial oracle, quadratic leading order")
{
    const auto& t = small_table();
    ScalingLaw law(0.5, 10.0, 0.05, true);
    BulkProfile zero = BulkProfile::zero_profile();

    std::vector<double> z(t.n_R(), 0.0);
    auto out = rn_physical(law, t, zero, 12.0, z);
    for (double v : out) CHECK(v == 0.0);

    // direct power-difference oracle at order-one amplitude
    double tau = 12.0;
    auto eps = test_eps(t.grid_R, 0.8);
    auto got = rn_physical(law, t, zero, tau, eps);
    double lam = law.lambda(tau), sqlam = std::sqrt(lam);
    for (std::size_t j = 1; j < t.n_R(); j += 13) {
        double R = t.grid_R.nodes[j];
        double u0 = sqlam * ground_state_eval(R);
        double v = eps[j] / R;
        double direct = (R * std::pow(u0 + v, 5.0) - R * std::pow(u0, 5.0) - 5.0 * std::pow(u0, 4.0) * eps[j])
                      / (lam * lam);
        // the direct difference has its own rounding floor ~ eps_mach u0^5
        double floor = 2e-15 * R * std::pow(u0 + std::abs(v), 5.0) / (lam * lam);
        CHECK(std::abs(got[j] - direct) <= 1e-12 * std::abs(direct) + floor);
    }

    // sign flip follows the binomial pattern
    std::vector<double> neg(eps.size());
    for (std::size_t j = 0; j < eps.size(); ++j) neg[j] = -eps[j];
    auto got_neg = rn_physical(law, t, zero, tau, neg);
    for (std::size_t j = 1; j < t.n_R(); j += 13) {
        double R = t.grid_R.nodes[j];
        double u0 = sqlam * ground_state_eval(R);
        double v = eps[j] / R;
        double predict = R
                       * (10.0 * u0 * u0 * u0 * v * v - 10.0 * u0 * u0 * v * v * v + 5.0 * u0 * v * v * v * v
                          - v * v * v * v * v)
                       / (lam * lam);
        CHECK(got_neg[j] == doctest::Approx(predict).epsilon(1e-12).scale(1e-300));
    }

    // quadratic leading order: RN(2 eps) ~ 4 RN(eps) for small eps
    auto small1 = rn_physical(law, t, zero, tau, test_eps(t.grid_R, 1e-4));
    auto small2 = rn_physical(law, t, zero, tau, test_eps(t.grid_R, 2e-4));
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < t.n_R(); ++j) {
        num += sq(small2[j] - 4.0 * small1[j]) * t.grid_R.weights[j];
        den += sq(small2[j]) * t.grid_R.weights[j];
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("rn_fourier: zero state and pure-discrete unrolling")
{
    const auto& t = small_table();
    ScalingLaw law(0.5, 10.0, 0.05, true);
    BulkProfile zero = BulkProfile::zero_profile();

    FourierState zs = FourierState::zero(t);
    auto fz = rn_fourier(law, t, zero, 12.0, zs);
    CHECK(l2_rho_norm(t, fz) == 0.0);

    FourierState d = FourierState::zero(t);
    d.xd = 1e-3;
    auto fd = rn_fourier(law, t, zero, 12.0, d);
    std::vector<double> phid_scaled(t.n_R());
    for (std::size_t j = 0; j < t.n_R(); ++j) phid_scaled[j] = 1e-3 * t.phi_d[j];
    auto direct = rn_physical(law, t, zero, 12.0, phid_scaled);
    CHECK(fd.xd == doctest::Approx(t.grid_R.inner(t.phi_d, direct)).epsilon(1e-10));
}

TEST_CASE("source split: exact partition and bulk regularity")
{
    const auto& t = small_table();
    ScalingLaw law(1.0 / 3.0, 10.0, 0.05);
    BulkProfile model = BulkProfile::model_profile();
    std::mt19937 rng(9);
    CauchyPair pair{renwave::testing::random_band_state(t, rng, 0.05, 4.0),
                    renwave::testing::random_band_state(t, rng, 0.05, 4.0)};

    double tau = 14.0;
    auto slice = free_evolve(law, t, pair, tau);
    auto split = source_split(law, t, model, tau, pair, slice.x);
    auto full = rn_physical(law, t, model, tau, [&] {
        auto f = dft_inverse(t, slice.x);
        f[0] = 0.0;
        return f;
    }());
    for (std::size_t j = 0; j < t.n_R(); j += 11)
        CHECK(split.E1[j] + split.E2[j] == doctest::Approx(full[j]).epsilon(1e-14).scale(1e-14 + std::abs(full[j])));

    // bulk = zero has no structured component
    auto z = source_split(law, t, BulkProfile::zero_profile(), tau, pair, slice.x);
    for (std::size_t j = 0; j < t.n_R(); j += 17) CHECK(z.E2[j] == 0.0);

    // tau^{-1} |g| + |dg/dtau| bounded over the window
    double bound = pair_norm_tilde(NormConfig::from_law(law), pair) + std::abs(pair.x0.xd);
    for (double tt : {12.0, 20.0, 35.0}) {
        double h = 0.05;
        double g0 = resonance_coefficient(law, t, pair, tt);
        double gp = resonance_coefficient(law, t, pair, tt + h);
        double gm = resonance_coefficient(law, t, pair, tt - h);
        double reg = std::abs(g0) / tt + std::abs(gp - gm) / (2.0 * h);
        CHECK(reg <= 30.0 * bound);
    }
}

TEST_CASE("nonlinear source decay for admissible free data")
{
    const auto& t = growth_table();
    ScalingLaw law(1.0 / 3.0, 10.0, 0.05);
    NormConfig nc = NormConfig::from_law(law);
    std::mt19937 rng(41);
    CauchyPair raw{renwave::testing::random_band_state(t, rng, 0.05, 4.0),
                   renwave::testing::random_band_state(t, rng, 0.05, 4.0)};
    double nrm = pair_norm_tilde(nc, raw);
    for (auto* s : {&raw.x0, &raw.x1})
        for (auto& v : s->xc) v /= nrm;
    auto adm = admissible_correction(t, nc, law.nu, raw);

    // past 4 tau0 the lambda ratio amplifies the quadrature error of the
    // vanishing-condition cancellation above the source itself, so the decay
    // window stops there
    BulkProfile zero = BulkProfile::zero_profile();
    std::vector<double> lx, ly;
    for (double tau = 10.0; tau <= 40.0; tau *= 1.12) {
        auto slice = free_evolve(law, t, adm.corrected, tau);
        auto field = dft_inverse_continuous(t, slice.x);
        field[0] = 0.0;
        auto rn = rn_physical(law, t, zero, tau, field);
        double v = h1l1_proxy(t, rn, tau);
        lx.push_back(std::log(tau));
        ly.push_back(std::log(v + 1e-300));
    }
    double slope = linfit(lx, ly).second;
    CHECK(slope <= -1.8);
}
