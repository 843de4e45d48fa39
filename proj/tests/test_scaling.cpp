#include "doctest.h"

#include "renwave/scaling.hpp"
#include "renwave/util.hpp"

#include <cmath>
#include <random>

using namespace renwave;

TEST_CASE("eval_scaling worked values")
{
    ScalingLaw law(0.5, 2.0, 0.05, true);

    // nu*tau = 1 makes every power equal 1
    auto p = eval_scaling(law, 2.0);
    CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.beta == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(p.t == doctest::Approx(1.0).epsilon(1e-14));

    // (nu*tau)^3 = 8, (nu*tau)^{-2} = 1/4; cross-check lambda = t^{-1-nu}
    auto q = eval_scaling(law, 4.0);
    CHECK(q.lambda == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(q.t == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q.lambda == doctest::Approx(std::pow(q.t, -1.5)).epsilon(1e-13));

    ScalingLaw law3(1.0 / 3.0, 3.0);
    CHECK(law3.beta(3.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(eval_scaling(law, -1.0), std::domain_error);
}

TEST_CASE("lambda(t) t^{1+nu} = 1 and parameter validation")
{
    for (double nu : {0.2, 1.0 / 3.0, 0.5}) {
        ScalingLaw law(nu, 10.0, 0.05, true);
        for (double tau : {10.0, 31.0, 500.0}) {
            auto p = eval_scaling(law, tau);
            CHECK(p.lambda * std::pow(p.t, 1.0 + nu) == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(law.kappa() == doctest::Approx(2.0 * (1.0 + 1.0 / nu) * 0.05));
    }
    CHECK_THROWS_AS(ScalingLaw(0.5, 10.0), std::domain_error);     // nu > 1/3 without the flag
    CHECK_THROWS_AS(ScalingLaw(0.25, 0.5), std::domain_error);     // tau0 < 1
    CHECK_THROWS_AS(ScalingLaw(0.25, 10.0, 0.5), std::domain_error); // delta0 too large
}

TEST_CASE("phase integral: worked values and anchor scaling")
{
    ScalingLaw law(0.5, 2.0, 0.05, true);

    // nu tau0 - nu tau0^{1+1/nu} tau^{-1/nu} = 1 - 0.5*8/16 = 0.75
    CHECK(law.phase_integral(2.0, 4.0, 2.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(law.phase_integral(2.0, 2.0, 2.0) == 0.0);
    CHECK(law.phase_integral(4.0, 2.0, 2.0) == doctest::Approx(-0.75).epsilon(1e-14));
    // anchor at tau: lambda(4)/lambda(2) * 0.75 = 6
    CHECK(law.phase_integral(2.0, 4.0, 4.0) == doctest::Approx(6.0).epsilon(1e-13));

    // quadrature oracle: int_2^4 8 u^{-3} du = 3/4, anchored by lambda(anchor)
    double quad = adaptive_simpson([](double u) { return 8.0 / (u * u * u); }, 2.0, 4.0, 1e-14);
    CHECK(law.phase_integral(2.0, 4.0, 2.0) == doctest::Approx(quad).epsilon(1e-12));
    CHECK(law.phase_integral(2.0, 4.0, 4.0) == doctest::Approx(8.0 * quad).epsilon(1e-12));
}

TEST_CASE("closed form matches adaptive quadrature on random configs")
{
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> unu(0.15, 1.0), utau(1.0, 60.0), ustretch(1.0, 12.0);
    for (int k = 0; k < 100; ++k) {
        double nu = unu(rng), tau0 = utau(rng), tau1 = tau0 * ustretch(rng);
        ScalingLaw law(nu, tau0, 0.05, true);
        for (double anchor : {tau0, tau1}) {
            double closed = law.phase_integral(tau0, tau1, anchor);
            double lam_anchor = law.lambda(anchor);
            double quad = adaptive_simpson(
                [&](double u) { return lam_anchor / law.lambda(u); }, tau0, tau1, 1e-15 * std::abs(closed) + 1e-300);
            CHECK(std::abs(closed - quad) <= 1e-10 * std::abs(closed));
        }
    }
}

TEST_CASE("beta * tau constant; lambda ratios exact powers")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unu(0.15, 1.0), utau(1.0, 200.0);
    for (int k = 0; k < 50; ++k) {
        double nu = unu(rng);
        ScalingLaw law(nu, 1.0, 0.05, true);
        double a = utau(rng), b = utau(rng);
        CHECK(law.beta(a) * a == doctest::Approx(law.beta(b) * b).epsilon(1e-13));
        CHECK(law.lambda(a) / law.lambda(b) == doctest::Approx(std::pow(a / b, 1.0 + 1.0 / nu)).epsilon(1e-12));
    }
}
