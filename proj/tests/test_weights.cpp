#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "carleman/errors.hpp"
#include "carleman/weights.hpp"

#include <cmath>
#include <random>

using namespace carleman;

TEST_CASE("gevrey tables")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 8);
    const double expect[] = {0, 0, std::log(2.0), std::log(6.0), std::log(24.0), std::log(120.0)};
    for (int j = 0; j <= 5; ++j)
        CHECK(M.log_M(j) == doctest::Approx(expect[j]).epsilon(1e-15));
    for (int j = 0; j < 8; ++j)
        CHECK(std::exp(M.log_m(j)) == doctest::Approx(j + 1.0).epsilon(1e-14));
    auto G2 = make_sequence(FamilySpec::gevrey(2.0), 8);
    CHECK(std::exp(G2.log_m(2)) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(make_sequence(FamilySpec::exp_square(), 8).log_M(3) == 9.0);
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(make_sequence(FamilySpec::gevrey(0.0), 16), InputError);
    CHECK_THROWS_AS(make_sequence(FamilySpec::gevrey(1.0), 7), InputError);
    CHECK_THROWS_AS(FamilySpec::tabulated({1, -2, 3}), InputError);
    CHECK_THROWS_AS(make_sequence(FamilySpec::tabulated({2, 3, 4}), 0), InputError);
    auto M = make_sequence(FamilySpec::gevrey(1.0), 16);
    CHECK_THROWS_AS(M.log_M(17), BudgetError);
    CHECK_THROWS_AS(quotients(M, 17), BudgetError);
}

TEST_CASE("tabulated non log-convex is built and fails Mlogc")
{
    auto T = make_sequence(FamilySpec::tabulated({1, 1, 3, 5, 9, 20, 50}), 0);
    CHECK_FALSE(T.quotients_monotone());
    bool mono = true;
    quotients(T, 3, &mono);
    CHECK_FALSE(mono);
    auto c = check_regularity(T, 6);
    CHECK_FALSE(c.mlogc_ok);
    CHECK_FALSE(c.strongly_regular());
    // h_M uses the convex minorant, which has the same infimum
    for (double t : {0.4, 0.45, 0.5, 0.9, 1.5})
        CHECK(log_hM(T, t) == doctest::Approx(log_hM_brute(T, t, 6)).epsilon(1e-14));
    CHECK_THROWS_AS(log_hM(T, 0.3), BudgetError);
}

TEST_CASE("log_hM examples")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 64);
    CHECK(log_hM(M, 2.0) == 0.0);
    CHECK(std::exp(log_hM(M, 1.0 / 3.0)) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(std::exp(log_hM(M, 0.5)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(M.table_piece(-std::log(0.5)) == 1); // tie toward smaller j
    CHECK_THROWS_AS(log_hM(M, 1e-3), BudgetError);
    CHECK_THROWS_AS(log_hM(M, 0.0), InputError);
}

TEST_CASE("log_hM agrees with brute force")
{
    std::mt19937_64 rng(7);
    for (auto spec : {FamilySpec::gevrey(0.5), FamilySpec::gevrey(1.0), FamilySpec::gevrey(2.0),
                      FamilySpec::log_gevrey(1.0, -1.0), FamilySpec::log_gevrey(1.0, 1.0),
                      FamilySpec::exp_square()}) {
        auto M = make_sequence(spec, 500);
        auto grid = resolvable_t_grid(M, 400);
        for (double t : grid)
            CHECK(std::abs(log_hM(M, t) - log_hM_brute(M, t, 500)) <= 1e-10);
    }
}

TEST_CASE("h_M is non-decreasing, non-positive, zero on the plateau")
{
    auto M = make_sequence(FamilySpec::log_gevrey(1.0, 1.0), 2000);
    auto grid = resolvable_t_grid(M, 2000, 10.0);
    double prev = -INFINITY;
    for (double t : grid) {
        double v = log_hM(M, t);
        CHECK(v <= 0.0);
        CHECK(v >= prev);
        prev = v;
        if (t >= std::exp(-M.log_m(0)))
            CHECK(v == 0.0);
    }
}

TEST_CASE("log-gevrey regularization keeps M_0 = 1, convexity and the exact tail")
{
    for (double beta : {-1.0, 1.0, 2.5}) {
        auto M = make_sequence(FamilySpec::log_gevrey(1.0, beta), 3000);
        CHECK(M.log_M(0) == 0.0);
        CHECK(M.quotients_monotone());
        for (int j = 0; j < 3000; ++j)
            CHECK(M.log_m(j) >= 0.0);
        for (int j = std::max(M.closed_from(), 100); j <= 3000; j += 97) {
            double raw = std::lgamma(j + 1.0) + beta * j * std::log(std::log(double(j)));
            CHECK(M.log_M(j) == doctest::Approx(raw).epsilon(1e-13));
        }
    }
}

TEST_CASE("extended h_M continues the table")
{
    for (auto spec : {FamilySpec::gevrey(1.0), FamilySpec::gevrey(0.5), FamilySpec::log_gevrey(1.0, -1.0),
                      FamilySpec::log_gevrey(1.0, 1.0), FamilySpec::exp_square()}) {
        auto small = make_sequence(spec, 64);
        auto big = make_sequence(spec, 20000);
        auto grid = resolvable_t_grid(big, 300);
        for (double t : grid) {
            double ref = log_hM(big, t);
            CHECK(log_hM_ext(small, t) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    auto T = make_sequence(FamilySpec::tabulated({1, 1, 2, 6, 24}), 0);
    CHECK_THROWS_AS(log_hM_ext(T, 1e-3), BudgetError);
}

TEST_CASE("batch h_M: OpenMP matches serial")
{
    auto M = make_sequence(FamilySpec::gevrey(1.5), 256);
    std::vector<double> t;
    for (int i = 0; i < 5000; ++i)
        t.push_back(std::exp(-30.0 + 31.0 * i / 4999.0));
    CHECK(log_hM_batch(M, t) == log_hM_batch_serial(M, t));
}

TEST_CASE("gevrey envelope")
{
    for (double a : {0.5, 1.0, 2.0}) {
        auto M = make_sequence(FamilySpec::gevrey(a), 2000);
        for (double t : resolvable_t_grid(M, 500)) {
            if (t > 0.5)
                continue;
            double lh = log_hM(M, t);
            CHECK(lh >= -2.0 * a * std::pow(t, -1.0 / a));
            if (t < 0.01)
                CHECK(lh <= -(a / 2.0) * std::pow(t, -1.0 / a));
        }
    }
}

TEST_CASE("recover_logM")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 64);
    auto grid = resolvable_t_grid(M, 10000);
    CHECK(recover_logM(M, 0, grid) == doctest::Approx(0.0));
    CHECK(std::abs(recover_logM(M, 3, grid) - std::log(6.0)) <= 1e-8);
    for (int j = 0; j < 60; ++j)
        CHECK(recover_logM(M, j, grid) <= M.log_M(j) + 1e-12);
}

TEST_CASE("regularity verdicts")
{
    for (double a : {0.5, 1.0, 2.0}) {
        auto c = check_regularity(make_sequence(FamilySpec::gevrey(a), 4096), 4096);
        CHECK(c.strongly_regular());
        CHECK(c.A_mg >= 1.0);
        CHECK(c.A_snqa >= 1.0);
        CHECK(c.mfast_ok);
        CHECK(c.quot1_ok);
        CHECK(c.quot2_ok);
    }
    for (double b : {-1.0, 1.0})
        CHECK(check_regularity(make_sequence(FamilySpec::log_gevrey(1.0, b), 4096), 4096).strongly_regular());
    auto e = check_regularity(make_sequence(FamilySpec::exp_square(), 512), 512);
    CHECK(e.mnorm_ok);
    CHECK(e.mlogc_ok);
    CHECK(e.msnqa_ok);
    CHECK_FALSE(e.mmodg_ok);
    REQUIRE(e.failed.size() == 1);
    CHECK(e.failed[0] == Condition::mmodg);
}

TEST_CASE("moderate growth: OpenMP matches serial and the closed form for gevrey")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 1500);
    auto a = moderate_growth(M, 1500), b = moderate_growth_serial(M, 1500);
    CHECK(a.log_A == b.log_A);
    CHECK(a.min_excess == b.min_excess);
    // oracle: log binom(n, n/2)/n is the max for j! and increases in n
    double n = 1500;
    double ref = (std::lgamma(n + 1) - 2 * std::lgamma(n / 2 + 1)) / n;
    CHECK(a.log_A == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("power")
{
    auto G1 = make_sequence(FamilySpec::gevrey(1.0), 400);
    auto G2 = make_sequence(FamilySpec::gevrey(2.0), 400);
    auto P = power(G1, 2.0);
    for (int j = 0; j <= 400; ++j)
        CHECK(P.log_M(j) == doctest::Approx(G2.log_M(j)).epsilon(1e-14));
    std::mt19937_64 rng(3);
    for (double s : {0.5, 2.0, 3.0}) {
        auto Ms = power(G1, s);
        auto grid = resolvable_t_grid(G1, 2);
        std::uniform_real_distribution<double> u(std::log(grid[0]), 0.5);
        for (int i = 0; i < 100; ++i) {
            double t = std::exp(u(rng));
            CHECK(std::abs(log_hM(Ms, std::pow(t, s)) - s * log_hM(G1, t)) <= 1e-12 * (1 + std::abs(log_hM(G1, t))));
        }
    }
    // M_j <= M_{2j}^{1/2} <= A^j M_j
    auto c = check_regularity(G2, 400);
    double lA = std::log(c.A_mg);
    for (int j = 0; j <= 200; ++j) {
        CHECK(G2.log_M(j) <= 0.5 * G2.log_M(2 * j) + 1e-12);
        CHECK(0.5 * G2.log_M(2 * j) <= G2.log_M(j) + j * lA + 1e-12);
    }
}

TEST_CASE("rho estimate")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 2000);
    auto grid = resolvable_t_grid(M, 400, 1.0);
    auto r1 = rho_estimate(M, 1.0, grid);
    CHECK(r1.ok);
    CHECK(r1.rho == 1.0);
    auto r2 = rho_estimate(M, 2.0, grid);
    REQUIRE(r2.ok);
    for (double t : grid)
        CHECK(log_hM(M, t) <= 2.0 * log_hM_ext(M, r2.rho * t) + 1e-12 * (1 + std::abs(log_hM(M, t))));
    // one step smaller must fail somewhere
    if (r2.rho > 1.0) {
        bool fails = false;
        for (double t : grid)
            fails |= log_hM(M, t) > 2.0 * log_hM_ext(M, r2.rho / 1.25 * t) + 1e-12 * (1 + std::abs(log_hM(M, t)));
        CHECK(fails);
    }
    auto E = make_sequence(FamilySpec::exp_square(), 200);
    CHECK_FALSE(rho_estimate(E, 2.0, resolvable_t_grid(E, 200, 1.0)).ok);
}

TEST_CASE("tail exponent fit and remainder")
{
    std::vector<double> lt(5000);
    for (int j = 0; j < 5000; ++j)
        lt[j] = -1.5 * std::log(j + 1.0);
    CHECK(tail_exponent(lt) == doctest::Approx(1.5).epsilon(1e-12));
    // oracle: partial sums of (j+1)^{-1.5} to 2e6 plus their own integral tail
    double direct = 0;
    for (int j = 5000; j < 2000000; ++j)
        direct += std::pow(j + 1.0, -1.5);
    direct += std::pow(2000000.5, -0.5) / 0.5;
    CHECK(power_tail_remainder(lt.back(), 5000, 1.5) == doctest::Approx(direct).epsilon(1e-6));
}
