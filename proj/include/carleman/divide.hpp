#pragma once

#include "carleman/outerflat.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace carleman {

// V = { x : x_1 = ... = x_k = 0 } in R^n; desk scale n <= 3, k <= 2
struct SubspaceSpec {
    SubspaceSpec(int n, int k);
    int n;
    int k;
};

// sqrt(x_1^2 + ... + x_k^2) = dist(x, V)
double phi(std::span<const double> x, const SubspaceSpec& spec);

// Q(zeta) = zeta_1^2 + ... + zeta_k^2 and dist(zeta, V) for zeta = xi + i eta
std::complex<double> Q(std::span<const std::complex<double>> zeta, const SubspaceSpec& spec);
double complex_dist(std::span<const std::complex<double>> zeta, const SubspaceSpec& spec);

// Largest eps = 2^{-m/16}, m >= 1, with 1 - eps^2 - 2 k eps > cos(delta pi/2).
double epsilon_select(const SubspaceSpec& spec, double delta);

struct RealpartCheck {
    int samples = 0;
    int violations = 0;
    double min_margin = 0.0; // min of Re Q / dist^2 - (1 - eps^2 - 2 k eps)
};
// random zeta in V_eps = { |Im zeta| < eps dist(zeta, V) }
RealpartCheck realpart_check(const SubspaceSpec& spec, double eps, int samples, std::uint64_t seed);

// log v_tau(x) = Re log G(tau phi(x)), -inf on V
double eval_vtau(const FlatHandle& h, double tau, std::span<const double> x, const SubspaceSpec& spec);

// tau = rho(2) d11/d13
double select_tau(double rho2, double d11, double d13);

// sign * exp(log_abs); sign 0 is the zero value
struct LogReal {
    double log_abs;
    int sign;
};
using LogField = std::function<LogReal(std::span<const double>)>;

LogField vtau_field(const FlatHandle& h, double tau, const SubspaceSpec& spec);
// phi(x)^p, not flat on V
LogField phi_power_field(double p, const SubspaceSpec& spec);

// log |D^K f(x)| for every multi-index |K| <= order_max, from central
// differences of exp(g(x + y) - g(x)), g = log|f|, with one Richardson level.
struct LogDerivatives {
    std::vector<std::vector<int>> multi;
    std::vector<double> log_abs;
    double step = 0.0;
};
LogDerivatives log_fd_derivatives(const LogField& f, std::span<const double> x, int order_max, double dist);
std::vector<std::vector<int>> multi_indices(int n, int order_max);

// max over the normal directions of max_{|K| <= order_max} log|D^K f| at dist r
double ring_log_derivative_max(const LogField& f, const SubspaceSpec& spec, double r, int order_max);

// points at dist 1e-3..1 (6 per decade) along 2 (k = 1) or 3 (k = 2) normal
// directions, tangential offsets 0 and 0.5
std::vector<std::vector<double>> division_grid(const SubspaceSpec& spec);

struct DivisionReport {
    double tau = 0.0;
    int order_max = 0;
    std::vector<std::vector<double>> grid;
    std::vector<double> dist;
    // dividend: |D^K u| <= d9 d10^k k! M_k h_M(d11 dist)
    bool dividend_flat = false;
    double log_d9 = 0.0, d10 = 0.0, d11 = 0.0;
    // divisor: |D^J (1/v_tau)| <= d1 (d2 tau)^j j! M_j / h_M(d3 tau dist); d13 = d3
    bool reciprocal_fit = false;
    double log_d1 = 0.0, d2 = 0.0, d3 = 0.0, d13 = 0.0;
    // quotient q = u/v_tau: |D^K q| <= C sigma^k k! M_k, fitted away from V
    // and checked on the decade next to V
    bool quotient_ok = false;
    double log_C = 0.0, sigma = 0.0;
    std::vector<double> quotient_log_p; // log p_sigma(q, x), orders <= order_max
    int quotient_violations = 0;
    double round_trip_error = 0.0;
    // p_{s1+s2}(u, x) <= p_{s1}(q, x) p_{s2}(v, x) with s1 = sigma, s2 = d2 tau
    int elem_violations = 0;
    double elem_min_slack = 0.0; // in logs
    bool accepted = false;
    std::string reason;
};

DivisionReport divide_verify(const LogField& u, const FlatHandle& h, double tau, const SubspaceSpec& spec,
                             std::span<const std::vector<double>> grid, int order_max);

} // namespace carleman
