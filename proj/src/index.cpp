#include "carleman/index.hpp"

#include "carleman/errors.hpp"

#include <algorithm>
#include <cmath>

namespace carleman {

namespace {

// log a over j0 <= j < J of the running-max gap max_{j0<=k<=j} n_k - n_j.
double log_gap(const std::vector<double>& n, int J, int j0 = 0)
{
    double run = n[j0], gap = 0.0;
    for (int j = j0; j < J; ++j) {
        run = std::max(run, n[j]);
        gap = std::max(gap, run - n[j]);
    }
    return gap;
}

std::vector<double> korenblum_log_terms(const WeightSequence& M, double gamma, int J)
{
    const auto& lm = M.log_m_table();
    std::vector<double> lt(J);
    for (int j = 0; j < J; ++j)
        lt[j] = -(std::log(j + 1.0) + lm[j]) / (gamma + 1.0);
    return lt;
}

} // namespace

PgammaWitness pgamma_witness(const WeightSequence& M, double gamma, int J)
{
    if (!(gamma > 0.0))
        throw InputError("gamma must be positive");
    if (J > M.j_max())
        throw BudgetError("extend budget: J exceeds J_max");
    if (J < 4)
        throw InputError("witness needs J >= 4");
    const auto& lm = M.log_m_table();
    std::vector<double> n(J);
    for (int j = 0; j < J; ++j)
        n[j] = lm[j] - gamma * std::log(j + 1.0);
    PgammaWitness w;
    w.gamma = gamma;
    w.J_used = J;
    w.logm_prime.resize(J);
    double run = n[0];
    for (int j = 0; j < J; ++j) {
        run = std::max(run, n[j]);
        w.logm_prime[j] = run + gamma * std::log(j + 1.0);
    }
    double la = log_gap(n, J), la_half = log_gap(n, J / 2);
    w.a_bound = std::exp(la);
    w.a_bound_half = std::exp(la_half);
    // A dip in the pre-asymptotic head can dominate the sup for any
    // reachable J; the trend is judged on the gap over the window [J/16, J).
    double lt = log_gap(n, J, J / 16), lt_half = log_gap(n, J / 2, J / 16);
    w.feasible = std::expm1(la - la_half) < 1e-3 && std::expm1(lt - lt_half) < 1e-3;
    return w;
}

bool witness_clauses_hold(const WeightSequence& M, const PgammaWitness& w)
{
    const auto& lm = M.log_m_table();
    const double la = std::log(w.a_bound);
    for (int j = 0; j < w.J_used; ++j) {
        double tol = 1e-12 * (1.0 + std::abs(lm[j]));
        if (std::abs(w.logm_prime[j] - lm[j]) > la + tol)
            return false;
        if (j + 1 < w.J_used) {
            double a = w.logm_prime[j] - w.gamma * std::log(j + 1.0);
            double b = w.logm_prime[j + 1] - w.gamma * std::log(j + 2.0);
            if (b < a - tol)
                return false;
        }
    }
    return true;
}

std::vector<int> dyadic_schedule(int J_lo, int J_hi)
{
    std::vector<int> s;
    for (int J = J_lo; J <= J_hi; J *= 2)
        s.push_back(J);
    return s;
}

GammaEstimate gamma_index(const WeightSequence& M, const std::vector<int>& J_schedule, double tol)
{
    if (J_schedule.empty())
        throw InputError("empty J schedule");
    if (tol < 0.01)
        throw InputError("gamma tolerance must be >= 0.01");
    const int J = *std::max_element(J_schedule.begin(), J_schedule.end());
    auto feasible = [&](double g) { return pgamma_witness(M, g, J).feasible; };

    // geometric scan for the first infeasible gamma
    const double g0 = 1e-2, ratio = std::pow(2.0, 0.25);
    if (!feasible(g0))
        throw NumericError("growth index below scan range");
    double lo = g0, hi = 0.0;
    for (double g = g0 * ratio; g < 1e3; g *= ratio) {
        if (!feasible(g)) {
            hi = g;
            break;
        }
        lo = g;
    }
    if (hi == 0.0)
        throw NumericError("growth index above scan range");
    for (double g = hi * ratio, k = 0; k < 2; ++k, g *= ratio)
        if (feasible(g))
            throw NumericError("feasibility not monotone in gamma");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    GammaEstimate e;
    e.lo = lo;
    e.hi = hi;
    e.gamma_hat = 0.5 * (lo + hi);
    e.J_schedule = J_schedule;
    for (int Js : J_schedule) {
        if (Js < 4 || Js > M.j_max())
            throw BudgetError("extend budget: scheduled J exceeds J_max");
        auto w = pgamma_witness(M, lo, Js);
        e.diagnostics.push_back(w.a_bound / w.a_bound_half - 1.0);
    }
    return e;
}

GammaEstimate known_gamma(double gamma)
{
    GammaEstimate e;
    e.gamma_hat = e.lo = e.hi = gamma;
    return e;
}

std::pair<WeightSequence, WeightSequence> light_sequences(const WeightSequence& M, double gamma,
                                                          const GammaEstimate& est)
{
    if (!(gamma > 0.0) || !(gamma < est.gamma_hat))
        throw InputError("light sequences need 0 < gamma < gamma_hat");
    const double delta = 0.5 * (gamma + est.gamma_hat);
    const int J = M.j_max();
    auto w = pgamma_witness(M, delta, J);
    if (!w.feasible)
        throw NumericError("witness infeasible at delta");
    // m'_0 >= 1, then restore monotonicity of (j+1)^{-delta} m'_j
    std::vector<double> lmp = w.logm_prime;
    lmp[0] = std::max(lmp[0], 0.0);
    double run = lmp[0];
    for (int j = 0; j < J; ++j) {
        run = std::max(run, lmp[j] - delta * std::log(j + 1.0));
        lmp[j] = run + delta * std::log(j + 1.0);
    }
    std::vector<double> lM1(J + 1, 0.0), lM2(J + 1, 0.0);
    for (int j = 0; j < J; ++j)
        lM1[j + 1] = lM1[j] + lmp[j];
    for (int j = 0; j <= J; ++j)
        lM2[j] = lM1[j] - gamma * std::lgamma(j + 1.0);
    return {WeightSequence(FamilySpec::tabulated_log(lM1), 0),
            WeightSequence(FamilySpec::tabulated_log(lM2), 0)};
}

std::string to_string(KorenblumClass c)
{
    switch (c) {
    case KorenblumClass::convergent:
        return "Convergent";
    case KorenblumClass::divergent:
        return "Divergent";
    case KorenblumClass::inconclusive:
        return "Inconclusive";
    }
    return "?";
}

KorenblumResult korenblum(const WeightSequence& M, double gamma, int J)
{
    if (!(gamma > 0.0))
        throw InputError("gamma must be positive");
    if (J > M.j_max())
        throw BudgetError("extend budget: J exceeds J_max");
    if (J < 16)
        throw InputError("korenblum needs J >= 16");
    auto lt = korenblum_log_terms(M, gamma, J);
    KorenblumResult r;
    r.J_used = J;
    r.fitted_exponent = tail_exponent(lt);
    double S = 0.0;
    int next = 16;
    for (int j = 0; j < J; ++j) {
        S += std::exp(lt[j]);
        if (j + 1 == next) {
            r.partial_sums_tail.emplace_back(next, S);
            next *= 2;
        }
    }
    r.partial_sum = S;
    const double p = r.fitted_exponent;
    // an exponent at 1 to rounding is the harmonic series
    if (p > 1.0 + 1e-2)
        r.classification = KorenblumClass::convergent;
    else if (p <= 1.0 + 1e-8)
        r.classification = KorenblumClass::divergent;
    else
        r.classification = KorenblumClass::inconclusive;
    return r;
}

B9Result strong_korenblum_b9(const WeightSequence& M, double gamma, int L)
{
    if (!(gamma > 0.0))
        throw InputError("gamma must be positive");
    const int J = M.j_max();
    if (L < 0 || L > J / 2)
        throw BudgetError("extend budget: L exceeds J_max/2");
    auto lt = korenblum_log_terms(M, gamma, J);
    B9Result r;
    r.fitted_exponent = tail_exponent(lt);
    if (!(r.fitted_exponent > 1.0 + 1e-2)) {
        r.reason = "divergent tail";
        return r;
    }
    double tail = power_tail_remainder(lt[J - 1], J, r.fitted_exponent);
    for (int j = J - 1; j > L; --j)
        tail += std::exp(lt[j]);
    for (int l = L; l >= 0; --l) {
        tail += std::exp(lt[l]);
        r.b9 = std::max(r.b9, tail / ((l + 1.0) * std::exp(lt[l])));
    }
    r.ok = std::isfinite(r.b9);
    if (!r.ok)
        r.reason = "non-finite tail";
    return r;
}

} // namespace carleman
