#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "carleman/errors.hpp"
#include "carleman/index.hpp"

#include <cmath>

using namespace carleman;

TEST_CASE("witness examples on gevrey(1)")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 4096);
    auto w1 = pgamma_witness(M, 1.0, 4096);
    CHECK(w1.feasible);
    CHECK(w1.a_bound == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 4096; j += 101)
        CHECK(w1.logm_prime[j] == doctest::Approx(M.log_m(j)).epsilon(1e-12));
    auto w05 = pgamma_witness(M, 0.5, 4096);
    CHECK(w05.feasible);
    CHECK(w05.a_bound == 1.0);
    // n_j = -0.5 log(j+1): gap at J is 0.5 log J
    auto w15 = pgamma_witness(M, 1.5, 4096);
    CHECK_FALSE(w15.feasible);
    CHECK(std::log(w15.a_bound) == doctest::Approx(0.5 * std::log(4096.0)).epsilon(1e-12));
    CHECK(witness_clauses_hold(M, w1));
    CHECK(witness_clauses_hold(M, w15));
    CHECK_THROWS_AS(pgamma_witness(M, 0.0, 100), InputError);
}

TEST_CASE("witness clauses and monotone feasibility on a gamma grid")
{
    for (auto spec : {FamilySpec::gevrey(0.7), FamilySpec::log_gevrey(1.0, -1.0), FamilySpec::log_gevrey(1.0, 1.0)}) {
        auto M = make_sequence(spec, 8192);
        bool seen_infeasible = false;
        for (double g = 0.05; g < 3.0; g += 0.05) {
            auto w = pgamma_witness(M, g, 8192);
            CHECK(witness_clauses_hold(M, w));
            if (seen_infeasible)
                CHECK_FALSE(w.feasible);
            seen_infeasible |= !w.feasible;
        }
        CHECK(seen_infeasible);
    }
}

TEST_CASE("gamma index")
{
    auto sched = dyadic_schedule(1024, 16384);
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
        auto M = make_sequence(FamilySpec::gevrey(a), 16384);
        auto e = gamma_index(M, sched, 0.01);
        CHECK(std::abs(e.gamma_hat - a) <= 0.05);
        CHECK(e.lo < e.hi);
        CHECK(e.diagnostics.size() == sched.size());
        auto e2 = gamma_index(power(M, 2.0), sched, 0.01);
        CHECK(std::abs(e2.gamma_hat - 2 * e.gamma_hat) <= 0.1);
        auto eh = gamma_index(power(M, 0.5), sched, 0.01);
        CHECK(std::abs(eh.gamma_hat - 0.5 * e.gamma_hat) <= 0.02);
    }
    for (double b : {-1.0, 1.0}) {
        auto e = gamma_index(make_sequence(FamilySpec::log_gevrey(1.0, b), 16384), sched, 0.01);
        MESSAGE("loggevrey(1," << b << ") gamma_hat = " << e.gamma_hat);
        CHECK(std::abs(e.gamma_hat - 1.0) <= 0.1);
    }
    CHECK_THROWS_AS(gamma_index(make_sequence(FamilySpec::gevrey(1.0), 64), {64}, 0.001), InputError);
}

TEST_CASE("light sequences")
{
    auto M = make_sequence(FamilySpec::gevrey(2.0), 4096);
    auto est = known_gamma(2.0);
    auto [M1, M2] = light_sequences(M, 1.0, est);
    CHECK(check_regularity(M1, 4096).strongly_regular());
    CHECK(check_regularity(M2, 4096).strongly_regular());
    auto w = pgamma_witness(M, 1.5, 4096);
    for (int j = 0; j <= 4096; j += 37)
        CHECK(std::abs(M1.log_M(j) - M.log_M(j)) <= j * std::log(w.a_bound) + 1e-9);

    auto G = make_sequence(FamilySpec::gevrey(1.0), 2048);
    auto [G1, G2] = light_sequences(G, 0.5, known_gamma(1.0));
    for (int j = 0; j <= 2048; j += 13)
        CHECK(G1.log_M(j) == doctest::Approx(G.log_M(j)).epsilon(1e-12));
    CHECK_THROWS_AS(light_sequences(G, 1.5, known_gamma(1.0)), InputError);
}

TEST_CASE("korenblum")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 8192);
    auto c = korenblum(M, 0.5, 8192);
    CHECK(c.classification == KorenblumClass::convergent);
    CHECK(c.fitted_exponent == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(korenblum(M, 1.0, 8192).classification == KorenblumClass::divergent);
    for (double a : {0.5, 1.0, 2.0}) {
        auto G = make_sequence(FamilySpec::gevrey(a), 8192);
        for (double g : {a / 2, a - 0.1, a, a + 0.1, 2 * a}) {
            auto r = korenblum(G, g, 8192);
            CHECK(r.fitted_exponent == doctest::Approx((1 + a) / (1 + g)).epsilon(1e-10));
            if (g < a)
                CHECK(r.classification == KorenblumClass::convergent);
            else
                CHECK(r.classification == KorenblumClass::divergent);
        }
    }
}

TEST_CASE("strong korenblum b9")
{
    auto M = make_sequence(FamilySpec::gevrey(1.0), 16384);
    auto r = strong_korenblum_b9(M, 0.5, 2000);
    REQUIRE(r.ok);
    // oracle: tail of (j+1)^{-4/3} over (l+1)^{-1/3} tends to 3
    CHECK(r.b9 >= 1.0);
    CHECK(r.b9 <= 3.7);
    auto r2 = strong_korenblum_b9(M, 0.5, 8000);
    CHECK(r2.b9 == doctest::Approx(r.b9).epsilon(1e-3));
    CHECK_FALSE(strong_korenblum_b9(M, 2.0, 2000).ok);
    // l = 0 ratio includes its own head
    CHECK(strong_korenblum_b9(M, 0.5, 0).b9 >= 1.0);
}
