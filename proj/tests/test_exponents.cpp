#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <latept/errors.hpp>
#include <latept/exponents.hpp>

#include <cmath>

using namespace latept;

TEST_CASE("expectation exponent: first branch closed form") {
    const ExponentValue v = rho_hat({2, 0.25, 0.5});
    CHECK(v.value == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK(v.branch == Branch::first);
}

TEST_CASE("expectation exponent: second branch kicks in past the crossover") {
    const ExponentValue v = rho_hat({2, 0.81, 0.9});
    CHECK(v.branch == Branch::second);
    CHECK(v.value == doctest::Approx(2.0 * (3.0 - 2.0 * std::sqrt(1.62))).epsilon(1e-15));
    CHECK(v.value == doctest::Approx(0.9088311755).epsilon(1e-9));

    // The second branch does not depend on beta.
    CHECK(rho_hat({2, 0.81, 0.95}).value == rho_hat({2, 0.81, 0.99}).value);
}

TEST_CASE("expectation exponent: order-one case is linear in alpha, exactly") {
    for (double a : {0.1, 0.25, 0.3, 0.5, 0.77}) {
        const ExponentValue v = rho_hat({1, a, 0.5});
        CHECK(v.value == 2.0 - 2.0 * a);
        CHECK(v.branch == Branch::first);
        // Any cluster scale gives the same value at order one.
        CHECK(rho_hat({1, a, 0.9}).value == v.value);
    }
}

TEST_CASE("in-probability exponent examples") {
    const ExponentValue first = rho({2, 0.25, 0.9});
    CHECK(first.branch == Branch::first);
    CHECK(first.value == doctest::Approx(2.890909090909091).epsilon(1e-14));

    const ExponentValue second = rho({2, 0.81, 0.5});
    CHECK(second.branch == Branch::second);
    CHECK(second.value == doctest::Approx(0.72).epsilon(1e-12));

    // Order one: identical to the expectation exponent.
    CHECK(rho({1, 0.3, 0.5}).value == 2.0 - 2.0 * 0.3);
}

TEST_CASE("crossover scales") {
    auto b = crossover_beta(2, 0.25);
    REQUIRE(b.has_value());
    CHECK(*b == doctest::Approx(1.2928932188134524).epsilon(1e-14));

    auto bp = rho_crossover_beta(2, 0.25);
    REQUIRE(bp.has_value());
    CHECK(*bp == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_FALSE(crossover_beta(1, 0.25).has_value());
    CHECK_FALSE(rho_crossover_beta(1, 0.25).has_value());

    SUBCASE("branch selection flips at the crossover") {
        // crossover for alpha = 0.81 sits at 1 - (sqrt(1.62) - 1) ~ 0.7272.
        CHECK(rho_hat({2, 0.81, 0.72}).branch == Branch::first);
        CHECK(rho_hat({2, 0.81, 0.73}).branch == Branch::second);
        CHECK(rho({2, 0.81, 0.19}).branch == Branch::first);
        CHECK(rho({2, 0.81, 0.21}).branch == Branch::second);
    }
}

TEST_CASE("branch formulas agree at their crossover") {
    for (int j : {2, 3, 5}) {
        for (double alpha : {0.05, 0.2, 0.45, 0.81}) {
            const double bh = *crossover_beta(j, alpha);
            CHECK(rho_hat_branch_value({j, alpha, bh}, Branch::first) ==
                  doctest::Approx(rho_hat_branch_value({j, alpha, bh}, Branch::second))
                      .epsilon(1e-12));
            const double bp = *rho_crossover_beta(j, alpha);
            CHECK(rho_branch_value({j, alpha, bp}, Branch::first) ==
                  doctest::Approx(rho_branch_value({j, alpha, bp}, Branch::second))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("expectation exponent grows with the tuple order") {
    std::vector<double> alphas, betas;
    for (int i = 1; i <= 10; ++i) {
        alphas.push_back(0.016 * i);
        betas.push_back(0.095 * i);
    }
    for (const MonotonicityEntry& e : monotonicity_table(alphas, betas, 5))
        CHECK(e.diff >= -1e-12);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(rho_hat({0, 0.5, 0.5}), domain_error);
    CHECK_THROWS_AS(rho_hat({2, 0.0, 0.5}), domain_error);
    CHECK_THROWS_AS(rho_hat({2, 1.0, 0.5}), domain_error);
    CHECK_THROWS_AS(rho_hat({2, 0.5, 0.0}), domain_error);
    CHECK_THROWS_AS(rho_hat({2, 0.5, 1.0}), domain_error);
    CHECK_THROWS_AS(rho({2, 0.5, 1.0}), domain_error);
    CHECK_THROWS_AS(rho_hat_branch_value({1, 0.5, 0.5}, Branch::second), domain_error);
    CHECK_THROWS_AS(rho_branch_value({1, 0.5, 0.5}, Branch::second), domain_error);
    CHECK_THROWS_AS(crossover_beta(2, 1.5), domain_error);
    // Branch evaluators accept cluster scales past 1 (crossovers can sit there).
    CHECK(rho_hat_branch_value({2, 0.25, 1.2}, Branch::first) ==
          doctest::Approx(2.0 + 2.0 * 1.2 - 1.0 / ((1.0 - 1.2) + 1.0)).epsilon(1e-14));
}
