#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "carleman/divide.hpp"
#include "carleman/errors.hpp"

#include <cmath>
#include <numbers>

using namespace carleman;
using cd = std::complex<double>;

namespace {

const FlatHandle& handle()
{
    static const FlatHandle h =
        build_flat(make_sequence(FamilySpec::gevrey(1.0), 4096), 0.5, known_gamma(1.0));
    return h;
}

} // namespace

TEST_CASE("phi and the subspace")
{
    SubspaceSpec s21(2, 1), s32(3, 2);
    CHECK(phi(std::vector<double>{0.3, 7.0}, s21) == doctest::Approx(0.3));
    CHECK(phi(std::vector<double>{0.0, 7.0}, s21) == 0.0);
    CHECK(phi(std::vector<double>{3.0, 4.0, -1.0}, s32) == doctest::Approx(5.0));
    CHECK_THROWS_AS(SubspaceSpec(2, 3), InputError);
    CHECK_THROWS_AS(SubspaceSpec(4, 1), InputError);
    CHECK_THROWS_AS(phi(std::vector<double>{1.0}, s21), InputError);
    // dist(zeta, V) for a real point is phi (d4 = 1)
    std::vector<cd> z{cd(0.3), cd(7.0)};
    CHECK(complex_dist(z, s21) == doctest::Approx(0.3));
}

TEST_CASE("epsilon selection and the real part bound")
{
    SubspaceSpec s21(2, 1), s32(3, 2);
    const double e = epsilon_select(s21, 0.5);
    CHECK(e >= 0.1);
    CHECK(1 - e * e - 2 * e > std::cos(std::numbers::pi / 4));
    // next grid value up is not admissible
    const double up = e * std::exp2(1.0 / 16);
    CHECK_FALSE(1 - up * up - 2 * up > std::cos(std::numbers::pi / 4));
    // 1 - e^2 - 2e > cos(delta pi/2): e -> sqrt(2) - 1 as delta -> 1, e -> 0 as delta -> 0
    const double e99 = epsilon_select(s21, 0.99);
    CHECK(e99 < std::sqrt(2.0) - 1);
    CHECK(e99 > 0.39);
    const double e01 = epsilon_select(s21, 0.01);
    CHECK(e01 > 0.0);
    CHECK(e01 < 1e-4);
    CHECK_THROWS_AS(epsilon_select(s21, 1.0), InputError);

    for (const auto& s : {s21, s32}) {
        for (double delta : {0.3, 0.75, 0.95}) {
            auto r = realpart_check(s, epsilon_select(s, delta), 1000, 17);
            CHECK(r.samples == 1000);
            CHECK(r.violations == 0);
            CHECK(r.min_margin > 0.0);
        }
    }
}

TEST_CASE("v_tau")
{
    const auto& h = handle();
    SubspaceSpec s(2, 1);
    CHECK(eval_vtau(h, 1.0, std::vector<double>{0.0, 0.4}, s) == -INFINITY);
    const double a = eval_vtau(h, 2.0, std::vector<double>{0.05, 0.4}, s);
    const double b = eval_vtau(h, 1.0, std::vector<double>{0.1, -3.0}, s);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
    CHECK(a < 0.0);
    // same x1 on both sides of V
    CHECK(eval_vtau(h, 1.0, std::vector<double>{-0.05, 0.0}, s) ==
          doctest::Approx(eval_vtau(h, 1.0, std::vector<double>{0.05, 0.0}, s)));
    CHECK(select_tau(2.0, 1.0, 1.0) == 2.0);
    CHECK(select_tau(2.0, 2.0, 1.0) > select_tau(2.0, 1.0, 1.0));
    CHECK_THROWS_AS(select_tau(2.0, 0.0, 1.0), InputError);
}

TEST_CASE("finite differences in log form")
{
    SubspaceSpec s(2, 1);
    // f = exp(-1/x1) at x1 = 0.01: f' = f/x1^2, f'' = f (1 - 2 x1)/x1^4
    LogField f = [](std::span<const double> x) { return LogReal{-1.0 / x[0], 1}; };
    std::vector<double> x{0.01, 0.3};
    auto d = log_fd_derivatives(f, x, 2, 0.01);
    REQUIRE(d.multi.size() == 6);
    CHECK(d.multi[1] == std::vector<int>{1, 0});
    const double l0 = -100.0;
    CHECK(d.log_abs[0] == l0);
    CHECK(d.log_abs[1] == doctest::Approx(l0 - 2 * std::log(0.01)).epsilon(1e-6));
    CHECK(d.log_abs[2] == -INFINITY); // no dependence on x2
    CHECK(d.log_abs[3] == doctest::Approx(l0 + std::log(0.98) - 4 * std::log(0.01)).epsilon(1e-6));
    CHECK(multi_indices(3, 4).size() == 35);
    CHECK_THROWS_AS(log_fd_derivatives(f, x, 5, 0.01), InputError);

    // derivatives of v_tau die out on rings shrinking to V
    auto v = vtau_field(handle(), 2.0, s);
    double prev = INFINITY;
    for (double r : {1e-1, 1e-2, 3e-3, 1e-3}) {
        double m = ring_log_derivative_max(v, s, r, 4);
        CHECK(m < prev);
        prev = m;
    }
    CHECK(prev < -500.0);
}

TEST_CASE("division")
{
    const auto& h = handle();
    SubspaceSpec s(2, 1);
    auto grid = division_grid(s);
    CHECK(grid.size() == 19 * 4);

    // self-division: q = 1
    auto self = divide_verify(vtau_field(h, 1.0, s), h, 1.0, s, grid, 4);
    CHECK(self.accepted);
    CHECK(self.log_C == 0.0);
    CHECK(self.round_trip_error <= 1e-12);

    // tau from the fitted constants, dividend v_1
    auto rho = rho_estimate(h.M, 2.0, resolvable_t_grid(h.M, 200));
    REQUIRE(rho.ok);
    const double tau = select_tau(rho.rho, self.d11, self.d13);
    CHECK(tau > 2.0);
    auto r = divide_verify(vtau_field(h, 1.0, s), h, tau, s, grid, 4);
    CHECK(r.accepted);
    CHECK(r.dividend_flat);
    CHECK(r.round_trip_error <= 1e-12);
    CHECK(r.elem_violations == 0);
    CHECK(r.d13 == r.d3);

    // dividend at half the divisor's tau
    auto half = divide_verify(vtau_field(h, tau / 2, s), h, tau, s, grid, 4);
    CHECK(half.accepted);

    // v_{2 tau} is less flat than v_tau: the quotient blows up at V
    auto twice = divide_verify(vtau_field(h, 2 * tau, s), h, tau, s, grid, 4);
    CHECK_FALSE(twice.accepted);
    CHECK(twice.quotient_violations > 0);

    // phi^2 is not flat
    auto sq = divide_verify(phi_power_field(2.0, s), h, tau, s, grid, 4);
    CHECK_FALSE(sq.accepted);
    CHECK_FALSE(sq.dividend_flat);

    std::vector<std::vector<double>> near{{1e-4, 0.0}, {0.1, 0.0}, {1.0, 0.0}, {0.5, 0.0}};
    CHECK_THROWS_AS(divide_verify(vtau_field(h, 1.0, s), h, 1.0, s, near, 4), InputError);
    CHECK_THROWS_AS(divide_verify(vtau_field(h, 1.0, s), h, 1.0, s, grid, 5), InputError);
}

TEST_CASE("division in codimension 2")
{
    const auto& h = handle();
    SubspaceSpec s(3, 2);
    auto grid = division_grid(s);
    auto r = divide_verify(vtau_field(h, 1.0, s), h, 3.0, s, grid, 2);
    CHECK(r.accepted);
    CHECK(r.round_trip_error <= 1e-12);
}
