#pragma once

#include "carleman/weights.hpp"

#include <string>
#include <utility>
#include <vector>

namespace carleman {

// Running-max witness for P_gamma: n_j = log m_j - gamma log(j+1),
// n'_j = max_{k<=j} n_k, m'_j = exp(n'_j + gamma log(j+1)).
struct PgammaWitness {
    double gamma = 0.0;
    std::vector<double> logm_prime;
    double a_bound = 1.0;      // at J_used
    double a_bound_half = 1.0; // at J_used/2
    bool feasible = false;
    int J_used = 0;
};

PgammaWitness pgamma_witness(const WeightSequence& M, double gamma, int J);

// Re-checks both clauses of P_gamma for a witness, independently of how it
// was built: (j+1)^{-gamma} m'_j non-decreasing and |log m'_j - log m_j| <= log a.
bool witness_clauses_hold(const WeightSequence& M, const PgammaWitness& w);

struct GammaEstimate {
    double gamma_hat = 0.0;
    double lo = 0.0; // feasible
    double hi = 0.0; // infeasible
    std::vector<int> J_schedule;
    // a(J)/a(J/2) - 1 at gamma = lo for each scheduled J
    std::vector<double> diagnostics;
};

std::vector<int> dyadic_schedule(int J_lo, int J_hi);
GammaEstimate gamma_index(const WeightSequence& M, const std::vector<int>& J_schedule, double tol);
// Estimate with a degenerate bracket at a known index, for callers that
// already know gamma(M) (e.g. Gevrey sequences).
GammaEstimate known_gamma(double gamma);

// M' from the witness at delta = (gamma + gamma_hat)/2 and M''_j = M'_j / j!^gamma,
// as tabulated sequences over J_max.
std::pair<WeightSequence, WeightSequence> light_sequences(const WeightSequence& M, double gamma,
                                                          const GammaEstimate& est);

enum class KorenblumClass { convergent, divergent, inconclusive };
std::string to_string(KorenblumClass c);

struct KorenblumResult {
    KorenblumClass classification = KorenblumClass::inconclusive;
    double fitted_exponent = 0.0;
    double partial_sum = 0.0;
    std::vector<std::pair<int, double>> partial_sums_tail; // (J', S_{J'}) at dyadic J'
    int J_used = 0;
};

KorenblumResult korenblum(const WeightSequence& M, double gamma, int J);

struct B9Result {
    bool ok = false;
    double b9 = 0.0;
    double fitted_exponent = 0.0;
    std::string reason;
};

B9Result strong_korenblum_b9(const WeightSequence& M, double gamma, int L);

} // namespace carleman
