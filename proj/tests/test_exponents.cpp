#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "eulerlab/exponents.hpp"

using namespace eulerlab;

TEST_CASE("thm1_parameters closed forms") {
    SUBCASE("alpha = 1/2") {
        const Thm1Params p = thm1_parameters(0.5, 0.75);
        CHECK(p.eta == doctest::Approx(1.0));
        CHECK(p.q == doctest::Approx(4.0));
        CHECK((2.0 - p.eta) * p.q / (p.q - (1.0 + p.eta)) == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("alpha = 0.4, beta = 0.5") {
        const Thm1Params p = thm1_parameters(0.4, 0.5);
        CHECK(p.eta == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(p.q == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
        CHECK(p.beta * p.eta + p.beta - 1.0 == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(p.flux_exponent == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(p.time_exponent == doctest::Approx(2.5).epsilon(1e-14));
    }

    SUBCASE("q > 3 exactly when alpha > 1/3") {
        for (double a : {0.34, 0.4, 0.6, 0.9}) CHECK(thm1_parameters(a, 0.95).q > 3.0);
        CHECK_THROWS_AS(thm1_parameters(1.0 / 3.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(thm1_parameters(0.2, 0.5), std::invalid_argument);
    }

    SUBCASE("rejections name the constraint") {
        CHECK_THROWS_WITH_AS(thm1_parameters(0.3, 0.5), doctest::Contains("alpha > 1/3"), std::invalid_argument);
        CHECK_THROWS_WITH_AS(thm1_parameters(0.5, 0.4), doctest::Contains("beta > alpha"), std::invalid_argument);
        CHECK_THROWS_WITH_AS(thm1_parameters(0.5, 1.0), doctest::Contains("beta < 1"), std::invalid_argument);
        CHECK_THROWS_WITH_AS(thm1_parameters(1.0, 0.5), doctest::Contains("alpha < 1"), std::invalid_argument);
    }

    SUBCASE("constraint system residuals vanish across the range") {
        for (double a = 0.35; a < 0.99; a += 0.04)
            for (double b = a + 0.01; b < 0.995; b += 0.07) {
                const Thm1Params p = thm1_parameters(a, b);
                const Thm1ConstraintCheck c = thm1_check(p);
                CHECK(c.positivity > 0.0);
                CHECK(c.eta_margin > 0.0);
                CHECK(std::abs(c.duality_defect) < 1e-13);
            }
    }

    SUBCASE("exact rational cross-check") {
        CHECK(thm1_exact_check(2, 5, 1, 2));   // alpha=2/5, beta=1/2
        CHECK(thm1_exact_check(1, 2, 3, 4));   // alpha=1/2, beta=3/4
        CHECK(thm1_exact_check(3, 7, 5, 8));
        CHECK_FALSE(thm1_exact_check(2, 5, 1, 3));  // beta < alpha: positivity fails
    }
}

TEST_CASE("thm2_parameters interval and critical rate") {
    SUBCASE("q = 3") {
        const Thm2Params p = thm2_parameters(3.0);
        CHECK(p.r_critical == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
        CHECK(p.p_lower == doctest::Approx(1.125).epsilon(1e-15));
        CHECK(p.p_upper == doctest::Approx(1.5).epsilon(1e-15));
    }

    SUBCASE("q <= 2 rejected") {
        CHECK_THROWS_AS(thm2_parameters(2.0), std::invalid_argument);
        CHECK_THROWS_AS(thm2_parameters(1.5), std::invalid_argument);
    }

    SUBCASE("r_critical > 1 and strictly decreasing; interval non-empty") {
        double prev = 1e300;
        for (double lq = std::log(2.0001); lq < std::log(1e6); lq += 0.35) {
            const double q = std::exp(lq);
            const Thm2Params p = thm2_parameters(q);
            CHECK(p.r_critical > 1.0);
            CHECK(p.r_critical < prev);
            CHECK(p.p_lower < p.p_upper);
            prev = p.r_critical;
        }
    }

    SUBCASE("q = 4, p = 1.2") {
        const Thm2Params p = thm2_parameters(4.0, 1.2);
        CHECK(p.theta == doctest::Approx((1.0 / 2.4 - 0.25) / (0.5 - 0.25)).epsilon(1e-14));
        CHECK(p.eps_exponent >= 0.0);
        // independent re-evaluation of the exponent formula
        const double pc = 1.2 / 0.2;
        const double expo = 2.0 * 4.0 * 0.2 / (1.2 * 2.0) - 3.0 * (0.25 - 1.0 / pc);
        CHECK(p.eps_exponent == doctest::Approx(expo).epsilon(1e-14));
        // interpolation identity 1/(2p) = theta/2 + (1-theta)/q
        CHECK(1.0 / 2.4 == doctest::Approx(p.theta / 2.0 + (1.0 - p.theta) / 4.0).epsilon(1e-14));
    }

    SUBCASE("p outside the interval rejected with the violated bound named") {
        CHECK_THROWS_WITH_AS(thm2_parameters(3.0, 1.0), doctest::Contains("lower bound"), std::invalid_argument);
        CHECK_THROWS_WITH_AS(thm2_parameters(3.0, 1.6), doctest::Contains("upper bound"), std::invalid_argument);
    }
}

TEST_CASE("thm3_rates") {
    SUBCASE("alpha = 0.4, beta = 0.5 (low branch)") {
        const Thm3Rates r = thm3_rates(0.4, 0.5);
        CHECK(r.low_branch);
        CHECK(r.eps_exponent == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(r.defect_exponent == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(r.dissipation_eps_power == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK_FALSE(r.branch_warning);
    }

    SUBCASE("alpha = 0.6, beta = 0.75 (high branch)") {
        const Thm3Rates r = thm3_rates(0.6, 0.75);
        CHECK_FALSE(r.low_branch);
        CHECK(r.eps_exponent == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(r.defect_exponent == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(r.dissipation_eps_power == doctest::Approx(-1.0));
    }

    SUBCASE("defect exponent vanishes as beta -> alpha+") {
        CHECK(thm3_rates(0.4, 0.4 + 1e-9).defect_exponent == doctest::Approx(0.0).epsilon(1e-7));
        CHECK(thm3_rates(0.6, 0.6 + 1e-9).defect_exponent == doctest::Approx(0.0).epsilon(1e-7));
    }

    SUBCASE("branch continuity at beta = 1/2") {
        for (double a : {0.35, 0.4, 0.45, 0.49}) {
            const Thm3Rates low = thm3_rates(a, 0.5);
            const double high_defect = (0.5 - a) / 0.5;
            const double high_eps = a / 0.5;
            CHECK(std::abs(low.defect_exponent - high_defect) < 1e-14);
            CHECK(std::abs(low.eps_exponent - high_eps) < 1e-14);
        }
    }

    SUBCASE("dissipation balances the flux at the chosen coupling") {
        for (double a : {0.35, 0.38, 0.42, 0.46})
            for (double b : {0.44, 0.47, 0.5}) {
                if (b <= a) continue;
                const Thm3Rates r = thm3_rates(a, b);
                const double e = r.eps_exponent;
                CHECK(std::abs(1.0 + 2.0 * (b - 1.0) * e - (b - a) / a * e) < 1e-12);
            }
    }

    SUBCASE("branch warning when alpha and beta straddle 1/2") {
        CHECK(thm3_rates(0.4, 0.6).branch_warning);
        CHECK_FALSE(thm3_rates(0.6, 0.7).branch_warning);
        CHECK_FALSE(thm3_rates(0.4, 0.5).branch_warning);
    }

    SUBCASE("range rejections") {
        CHECK_THROWS_AS(thm3_rates(0.3, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(thm3_rates(0.5, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(thm3_rates(0.5, 1.0), std::invalid_argument);
    }
}
